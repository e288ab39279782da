#include <netchain/smt.hpp>
#include <netchain/sha256.hpp>

#include <algorithm>

namespace netchain::smt {
namespace {

// Hash one level into the next. Pairs are independent, so the whole level
// goes through the batch hasher.
std::vector<Digest> next_level(const std::vector<Digest>& level) {
    const std::size_t pairs = level.size() / 2;
    std::vector<Digest> out(pairs + level.size() % 2);

    Bytes buffer(pairs * 65);
    std::vector<ByteView> messages(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
        std::uint8_t* p = buffer.data() + i * 65;
        p[0] = tag::kSmtInternal;
        std::copy(level[2 * i].bytes.begin(), level[2 * i].bytes.end(), p + 1);
        std::copy(level[2 * i + 1].bytes.begin(), level[2 * i + 1].bytes.end(), p + 33);
        messages[i] = ByteView(p, 65);
    }
    sha256::digest_many(messages, std::span<Digest>(out.data(), pairs));
    if (level.size() % 2 == 1) out.back() = level.back();
    return out;
}

bool key_between(const MerkleProof* left, const CompoundKey& key, const MerkleProof* right) {
    if (left && !(left->leaf.key < key)) return false;
    if (right && !(key < right->leaf.key)) return false;
    return true;
}

}  // namespace

Tree Tree::build(std::vector<Leaf> leaves) {
    if (leaves.empty()) throw ConstructionError("sorted Merkle tree needs at least one leaf");
    const bool plus = leaves.front().id_pre.has_value();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (leaves[i].id_pre.has_value() != plus) {
            throw ConstructionError("leaves mix NetChain and NetChain+ encodings");
        }
        if (i > 0 && !(leaves[i - 1].key < leaves[i].key)) {
            throw ConstructionError("leaf keys must be strictly increasing");
        }
    }

    Tree tree;
    tree.leaves_ = std::move(leaves);

    std::vector<Bytes> encoded;
    encoded.reserve(tree.leaves_.size());
    for (const Leaf& leaf : tree.leaves_) encoded.push_back(leaf.encode());
    std::vector<ByteView> views(encoded.begin(), encoded.end());
    std::vector<Digest> level(views.size());
    sha256::digest_many(views, level);

    tree.levels_.push_back(std::move(level));
    while (tree.levels_.back().size() > 1) tree.levels_.push_back(next_level(tree.levels_.back()));
    return tree;
}

std::size_t Tree::lower_bound(const CompoundKey& key) const {
    const auto it = std::lower_bound(leaves_.begin(), leaves_.end(), key,
                                     [](const Leaf& leaf, const CompoundKey& k) { return leaf.key < k; });
    return static_cast<std::size_t>(it - leaves_.begin());
}

std::optional<std::size_t> Tree::find(const CompoundKey& key) const {
    const std::size_t i = lower_bound(key);
    if (i < leaves_.size() && leaves_[i].key == key) return i;
    return std::nullopt;
}

MerkleProof Tree::prove_index(std::size_t index) const {
    MerkleProof proof;
    proof.leaf = leaves_.at(index);
    proof.leaf_index = index;
    proof.tree_size = leaves_.size();
    std::size_t idx = index;
    for (std::size_t depth = 0; depth + 1 < levels_.size(); ++depth) {
        const auto& level = levels_[depth];
        if (idx % 2 == 1) {
            proof.siblings.push_back(level[idx - 1]);
        } else if (idx + 1 < level.size()) {
            proof.siblings.push_back(level[idx + 1]);
        }
        idx /= 2;
    }
    return proof;
}

MerkleProof prove_existence(const Tree& tree, const CompoundKey& key) {
    const auto index = tree.find(key);
    if (!index) throw LookupError("key absent from tree; use prove_non_existence");
    return tree.prove_index(*index);
}

NonExistenceProof prove_non_existence(const Tree& tree, const CompoundKey& key) {
    if (tree.find(key)) throw LookupError("key present in tree; use prove_existence");
    const std::size_t i = tree.lower_bound(key);
    NonExistenceProof proof;
    if (i > 0) proof.left = tree.prove_index(i - 1);
    if (i < tree.size()) proof.right = tree.prove_index(i);
    return proof;
}

Digest merkle_root(std::vector<Digest> level) {
    if (level.empty()) return Digest{};
    while (level.size() > 1) level = next_level(level);
    return level.front();
}

std::size_t path_length(std::uint64_t index, std::uint64_t size) noexcept {
    std::size_t n = 0;
    for (std::uint64_t width = size; width > 1; width = (width + 1) / 2, index /= 2) {
        if (index % 2 == 1 || index + 1 < width) ++n;
    }
    return n;
}

std::optional<Digest> root_from_proof(const MerkleProof& proof) {
    if (proof.tree_size == 0 || proof.leaf_index >= proof.tree_size) return std::nullopt;
    if (proof.siblings.size() != path_length(proof.leaf_index, proof.tree_size)) return std::nullopt;

    Digest h = proof.leaf.digest();
    std::size_t s = 0;
    std::uint64_t idx = proof.leaf_index;
    for (std::uint64_t width = proof.tree_size; width > 1; width = (width + 1) / 2, idx /= 2) {
        if (idx % 2 == 1) {
            h = codec::internal_digest(proof.siblings[s++], h);
        } else if (idx + 1 < width) {
            h = codec::internal_digest(h, proof.siblings[s++]);
        }
    }
    return h;
}

bool verify_existence(const Digest& root, const CompoundKey& key, const MerkleProof& proof) {
    if (proof.leaf.key != key) return false;
    const auto computed = root_from_proof(proof);
    return computed && *computed == root;
}

bool verify_non_existence(const Digest& root, const CompoundKey& key, const NonExistenceProof& proof) {
    const MerkleProof* left = proof.left ? &*proof.left : nullptr;
    const MerkleProof* right = proof.right ? &*proof.right : nullptr;
    if (!left && !right) return false;
    if (!key_between(left, key, right)) return false;

    for (const MerkleProof* side : {left, right}) {
        if (!side) continue;
        const auto computed = root_from_proof(*side);
        if (!computed || *computed != root) return false;
    }

    if (left && right) {
        return left->tree_size == right->tree_size && right->leaf_index == left->leaf_index + 1;
    }
    if (right) return right->leaf_index == 0;
    return left->leaf_index + 1 == left->tree_size;
}

// ---------------------------------------------------------------------------
// Serialization

void write_leaf(Writer& w, const Leaf& leaf) { w.blob(leaf.encode()); }

Leaf read_leaf(Reader& outer) {
    const Bytes bytes = outer.blob();
    Reader r(bytes);
    if (r.u8() != tag::kSmtLeaf) throw DecodeError("expected SMT leaf tag");
    Leaf leaf;
    leaf.key = codec::read_key(r);
    leaf.ptr_h = r.digest();
    if (r.remaining() == 8) {
        leaf.id_pre = r.i64();
    }
    r.expect_end();
    return leaf;
}

void write_proof(Writer& w, const MerkleProof& proof) {
    write_leaf(w, proof.leaf);
    w.u64(proof.leaf_index).u64(proof.tree_size);
    w.u32(static_cast<std::uint32_t>(proof.siblings.size()));
    for (const Digest& d : proof.siblings) w.digest(d);
}

MerkleProof read_proof(Reader& r) {
    MerkleProof proof;
    proof.leaf = read_leaf(r);
    proof.leaf_index = r.u64();
    proof.tree_size = r.u64();
    const std::size_t n = r.count(Digest::size);
    proof.siblings.reserve(n);
    for (std::size_t i = 0; i < n; ++i) proof.siblings.push_back(r.digest());
    return proof;
}

void write_proof(Writer& w, const NonExistenceProof& proof) {
    w.u8(static_cast<std::uint8_t>((proof.left ? 1 : 0) | (proof.right ? 2 : 0)));
    if (proof.left) write_proof(w, *proof.left);
    if (proof.right) write_proof(w, *proof.right);
}

NonExistenceProof read_non_existence_proof(Reader& r) {
    const std::uint8_t sides = r.u8();
    if (sides == 0 || sides > 3) throw DecodeError("invalid non-existence proof sides");
    NonExistenceProof proof;
    if (sides & 1) proof.left = read_proof(r);
    if (sides & 2) proof.right = read_proof(r);
    return proof;
}

}  // namespace netchain::smt
