#pragma once

// Response forgeries a malicious service provider can attempt. Each strategy
// starts from an honest response and has full access to the ledger; the
// verifier must reject every result with the kind recorded in the Forgery.

#include <netchain/client.hpp>
#include <netchain/ledger.hpp>
#include <netchain/protocol.hpp>

#include <optional>
#include <random>
#include <span>
#include <string_view>

namespace netchain::adversary {

enum class Strategy {
    identity,
    forge_object,               // rewrite a returned vertex
    drop_matched_block,         // remove one matched block's proof and items
    shorten_chain,              // withhold the tail of a returned chain
    relabel_valid_as_boundary,  // present a valid item as the out-boundary one
    swap_weight,                // exchange weights inside a chain
    reorder_items,              // exchange two adjacent chain items
    stale_boundary,             // answer with the MPT state of an older header
    foreign_proof,              // prove another key of the same block
};

std::span<const Strategy> all_strategies() noexcept;
std::string_view strategy_name(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

struct Forgery {
    Response response;
    std::optional<client::ErrorKind> expected;  // nullopt: must still verify
};

/// nullopt when the strategy has nothing to act on in this response or
/// mode (e.g. no matched block, or a NetChain+ only attack on NetChain).
std::optional<Forgery> tamper(const ledger::Ledger& store, const Response& honest, Strategy s,
                              std::mt19937_64& rng);

}  // namespace netchain::adversary
