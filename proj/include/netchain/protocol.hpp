#pragma once

// Query, response and the response file shared by the service provider and
// the light client.
//
// Response file:
//   "NCRESP" | version:u8 | mode:u8 | query | R | VO
//   query = key | k:u32 | lb:i64 | ub:i64
//   R     = count:u32 | (block:i64 | items:u32 | chain item*)*
//   VO    = count:u32 | (block:i64 | kind:u8 | proof)*
//           | has_mpt:u8 [| mpt proof] | has_b:u8 [| b:i64]
// kind 1 is an SMT existence proof, kind 2 a non-existence proof.

#include <netchain/mpt.hpp>
#include <netchain/smt.hpp>
#include <netchain/types.hpp>

#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

namespace netchain {

struct Query {
    CompoundKey key;
    std::size_t k = 1;
    BlockId lb = 0;
    BlockId ub = 0;

    bool operator==(const Query&) const = default;
};

/// Throws std::invalid_argument unless k >= 1 and 0 <= lb <= ub, and
/// std::out_of_range when ub is not below `chain_size`.
void validate(const Query& q, std::size_t chain_size);

/// r_i: a prefix of the chain stored under the query key in one block.
struct BlockResult {
    BlockId block_id = 0;
    std::vector<ChainItem> items;

    bool operator==(const BlockResult&) const = default;
};

using BlockProof = std::variant<smt::MerkleProof, smt::NonExistenceProof>;

struct ProofEntry {
    BlockId block_id = 0;
    BlockProof proof;

    bool operator==(const ProofEntry&) const = default;
};

struct Response {
    Mode mode = Mode::netchain;
    Query query;
    std::vector<BlockResult> results;  // ascending block id
    std::vector<ProofEntry> proofs;    // ascending block id
    std::optional<mpt::Proof> mpt_proof;
    std::optional<BlockId> out_boundary;  // b

    const BlockResult* result_for(BlockId id) const;
    const ProofEntry* proof_for(BlockId id) const;

    /// SMT proofs plus the MPT proof when present.
    std::size_t proof_count() const noexcept { return proofs.size() + (mpt_proof ? 1 : 0); }
    std::size_t item_count() const noexcept;

    bool operator==(const Response&) const = default;
};

/// One entry of a top-k answer.
struct Hit {
    CompoundValue value;
    BlockId block_id = 0;

    bool operator==(const Hit&) const = default;
};

/// Position of a returned chain item: (block, index inside r_i).
struct ItemRef {
    BlockId block_id = 0;
    std::size_t position = 0;

    auto operator<=>(const ItemRef&) const = default;
};

/// Global top-k over the returned items: weight descending, then block id
/// ascending, then chain position ascending. SP and client both use this.
std::vector<ItemRef> select_top_k(const std::vector<BlockResult>& results, std::size_t k);

namespace wire {

void write_query(Writer& w, const Query& q);
Query read_query(Reader& r);

Bytes encode(const Response& resp);
/// Throws DecodeError on malformed input.
Response decode(ByteView bytes);

/// Byte split of encode(resp): R section and VO section.
std::size_t result_bytes(const Response& resp);
std::size_t vo_bytes(const Response& resp);

void save(const std::filesystem::path& path, const Response& resp);
Response load(const std::filesystem::path& path);

}  // namespace wire
}  // namespace netchain
