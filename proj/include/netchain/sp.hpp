#pragma once

// Service-provider side of the query protocol. All functions are read-only
// over sealed blocks and may run concurrently.

#include <netchain/ledger.hpp>
#include <netchain/protocol.hpp>

#include <optional>

namespace netchain::sp {

/// Every block in [lb, ub] gets a proof; matched blocks also return the
/// first min(l, k) items of their chain.
Response search_netchain(const ledger::Ledger& store, const Query& q);

struct Boundaries {
    std::optional<BlockId> a;  // newest matched block inside or below the window
    std::optional<BlockId> b;  // newest matched block when <= ub, else first above ub
    std::optional<smt::MerkleProof> b_proof;  // when b > ub
    mpt::Proof mpt_proof;                     // lookup of the key against the latest root
    std::optional<BlockId> latest;            // value found in the MPT
};

Boundaries find_boundaries(const ledger::Ledger& store, const Query& q);

/// Two-round scan over the matched blocks reachable from a.
Response search_netchain_plus(const ledger::Ledger& store, const Query& q);

/// Dispatch on the ledger mode. Throws std::invalid_argument or
/// std::out_of_range for an invalid query.
Response search(const ledger::Ledger& store, const Query& q);

}  // namespace netchain::sp
