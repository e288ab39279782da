#pragma once

// Sorted Merkle tree over compound-key leaves.
//
// Leaves are strictly increasing by key. Each level pairs adjacent digests
// left to right; when a level has odd width its last digest is promoted to
// the next level unchanged. Proofs carry the leaf index and tree size so the
// verifier can derive the path shape, which is also what makes adjacency of
// two leaves checkable for non-existence proofs.

#include <netchain/codec.hpp>
#include <netchain/types.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace netchain::smt {

struct Leaf {
    CompoundKey key;
    Digest ptr_h;                   // digest of the head item of the key's chain
    std::optional<BlockId> id_pre;  // NetChain+ inter-block link

    bool operator==(const Leaf&) const = default;

    Bytes encode() const { return codec::encode_leaf(key, ptr_h, id_pre); }
    Digest digest() const { return hash(encode()); }
};

struct MerkleProof {
    Leaf leaf;
    std::uint64_t leaf_index = 0;
    std::uint64_t tree_size = 0;
    std::vector<Digest> siblings;  // bottom-up

    bool operator==(const MerkleProof&) const = default;
};

/// Proofs of the leaves bracketing an absent key. One side is omitted when
/// the key falls outside the leaf range.
struct NonExistenceProof {
    std::optional<MerkleProof> left;
    std::optional<MerkleProof> right;

    bool operator==(const NonExistenceProof&) const = default;
};

class Tree {
public:
    /// Throws ConstructionError for empty input, unsorted or duplicate keys,
    /// or leaves that mix NetChain and NetChain+ encodings.
    static Tree build(std::vector<Leaf> leaves);

    const Digest& root() const noexcept { return levels_.back().front(); }
    std::size_t size() const noexcept { return leaves_.size(); }
    std::span<const Leaf> leaves() const noexcept { return leaves_; }
    const Leaf& leaf(std::size_t index) const { return leaves_.at(index); }

    /// levels()[0] holds leaf digests; levels().back() is {root}.
    const std::vector<std::vector<Digest>>& levels() const noexcept { return levels_; }

    std::optional<std::size_t> find(const CompoundKey& key) const;

    /// Index of the first leaf whose key is not less than `key`.
    std::size_t lower_bound(const CompoundKey& key) const;

    MerkleProof prove_index(std::size_t index) const;

    bool operator==(const Tree&) const = default;

private:
    std::vector<Leaf> leaves_;
    std::vector<std::vector<Digest>> levels_;
};

inline Tree build(std::vector<Leaf> leaves) { return Tree::build(std::move(leaves)); }

/// Throws LookupError when `key` is absent.
MerkleProof prove_existence(const Tree& tree, const CompoundKey& key);

/// Throws LookupError when `key` is present.
NonExistenceProof prove_non_existence(const Tree& tree, const CompoundKey& key);

bool verify_existence(const Digest& root, const CompoundKey& key, const MerkleProof& proof);
bool verify_non_existence(const Digest& root, const CompoundKey& key, const NonExistenceProof& proof);

/// Root implied by `proof`, or nullopt when the sibling count does not match
/// the path shape implied by leaf_index and tree_size.
std::optional<Digest> root_from_proof(const MerkleProof& proof);

/// Root of a plain Merkle tree over `leaf_digests` using the same pairing and
/// odd-node promotion as Tree. Returns an all-zero digest for no leaves.
Digest merkle_root(std::vector<Digest> leaf_digests);

/// Number of siblings on the path of `index` in a tree of `size` leaves.
std::size_t path_length(std::uint64_t index, std::uint64_t size) noexcept;

void write_leaf(Writer& w, const Leaf& leaf);
Leaf read_leaf(Reader& r);
void write_proof(Writer& w, const MerkleProof& proof);
MerkleProof read_proof(Reader& r);
void write_proof(Writer& w, const NonExistenceProof& proof);
NonExistenceProof read_non_existence_proof(Reader& r);

}  // namespace netchain::smt
