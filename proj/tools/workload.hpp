#pragma once

// Helpers shared by the CLI and the acceptance runner.

#include <netchain/ingest.hpp>
#include <netchain/ledger.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace netchain::tools {

struct Timing {
    double median_ms = 0;
    double mean_ms = 0;
};

Timing time_repeats(std::size_t repeats, const std::function<void()>& body);

/// NETCHAIN_SEED when set and numeric, else `fallback`.
std::uint64_t seed_from_env(std::uint64_t fallback);

/// Key whose number of matched blocks in [lb, ub] is closest to `target`;
/// ties go to the key with more objects, then to the smaller key.
std::optional<CompoundKey> pick_key(const ledger::Ledger& store, BlockId lb, BlockId ub, std::size_t target);

std::size_t matched_blocks(const ledger::Ledger& store, const CompoundKey& key, BlockId lb, BlockId ub);

struct MineSummary {
    std::size_t blocks = 0;
    std::size_t objects = 0;
    double ads_seconds = 0;  // summed build_block_ads time
    std::size_t ads_bytes = 0;
    std::size_t mpt_bytes = 0;
};

/// Batch `objects` into `store`, stopping after `max_blocks` when set.
MineSummary mine(ledger::Ledger& store, std::vector<Object> objects, const ingest::BatchPlan& plan,
                 std::optional<std::size_t> max_blocks = std::nullopt);

}  // namespace netchain::tools
