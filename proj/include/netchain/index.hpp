#pragma once

// Per-block authenticated two-layer index: one weight-ordered hash chain per
// compound key, and a sorted Merkle tree whose leaves commit to the chain
// heads. In NetChain+ mode every leaf also carries the id of the previous
// block holding the same key, read from (and then written to) the MPT.

#include <netchain/mpt.hpp>
#include <netchain/smt.hpp>
#include <netchain/types.hpp>

#include <optional>
#include <span>
#include <vector>

namespace netchain {

struct HashChain {
    std::vector<ChainItem> items;

    Digest head_digest() const { return codec::chain_item_digest(items.front()); }
    bool operator==(const HashChain&) const = default;
};

/// Sort by weight descending (ties: v ascending, then input order) and link
/// back to front. Throws ConstructionError on empty input.
HashChain build_chain(std::vector<CompoundValue> values);

/// Every ptr equals the digest of its successor and the last ptr is bottom.
bool chain_links_valid(const HashChain& chain);

struct BlockAds {
    smt::Tree tree;
    std::vector<HashChain> chains;  // chains[i] belongs to tree.leaf(i)

    const HashChain* chain_for(const CompoundKey& key) const;
    bool operator==(const BlockAds&) const = default;
};

struct AdsBuild {
    BlockAds ads;
    std::optional<Digest> mpt_root;  // set in NetChain+ mode
};

/// Build the ADS for one block. `mpt` must be non-null exactly in NetChain+
/// mode; it is advanced to map every key in the block to `block_id`.
AdsBuild build_block_ads(std::span<const Object> objects, Mode mode, mpt::Store* mpt, BlockId block_id);

/// Dictionary records, then SMT leaves, then the internal SMT levels.
void write_ads(Writer& w, const BlockAds& ads);

/// Parse and re-verify: the tree is rebuilt from the stored leaves and must
/// match the stored levels; chain heads must match leaf ptr_h and links must
/// recompute. Throws IntegrityError on mismatch and DecodeError on bad bytes.
BlockAds read_ads(Reader& r);

}  // namespace netchain
