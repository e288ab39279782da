#pragma once

// Merkle Patricia trie mapping compound keys to the id of the block where
// each key occurred most recently.
//
// Keys enter the trie as the nibble expansion of their canonical encoding.
// Nodes are content-addressed: a node is stored under the hash of its
// encoding and children are referenced by digest, so every historical root
// stays readable. Nodes are never removed.

#include <netchain/codec.hpp>
#include <netchain/types.hpp>

#include <array>
#include <cstring>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netchain::mpt {

using Nibbles = std::vector<std::uint8_t>;

Nibbles to_nibbles(ByteView key);

struct Node {
    enum class Kind : std::uint8_t { empty = 0, leaf = 1, extension = 2, branch = 3 };

    Kind kind = Kind::empty;
    Nibbles path;                                    // leaf, extension
    Digest child;                                    // extension
    std::array<std::optional<Digest>, 16> children;  // branch
    std::optional<BlockId> value;                    // leaf (always), branch (optional)

    /// 0x04 | kind | kind-specific payload (see docs/encoding.md).
    Bytes encode() const;
    /// Strict decode; throws DecodeError on any malformed or trailing byte.
    static Node decode(ByteView bytes);

    bool operator==(const Node&) const = default;
};

/// Node encodings along the lookup path, root first.
struct Proof {
    std::vector<Bytes> nodes;

    bool operator==(const Proof&) const = default;
};

struct Lookup {
    std::optional<BlockId> value;
    Proof proof;
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        std::size_t h;
        std::memcpy(&h, d.data(), sizeof(h));
        return h;
    }
};

/// Root digest of the empty trie.
Digest empty_root();

class Store {
public:
    Store();

    const Digest& root() const noexcept { return root_; }

    /// Insert or overwrite; returns the new root.
    Digest set(const CompoundKey& key, BlockId value);
    Digest set_raw(ByteView key, BlockId value);

    Lookup get(const CompoundKey& key) const { return get_at(root_, key); }
    Lookup get_raw(ByteView key) const { return get_raw_at(root_, key); }

    /// Read against any root this store has produced.
    Lookup get_at(const Digest& root, const CompoundKey& key) const;
    Lookup get_raw_at(const Digest& root, ByteView key) const;

    std::size_t node_count() const noexcept { return nodes_.size(); }
    bool contains(const Digest& d) const { return nodes_.count(d) != 0; }
    const Bytes& node_bytes(const Digest& d) const;

    /// Commit point. Returns the encodings of nodes first stored since the
    /// previous call that the current root reaches, and forgets the rest,
    /// so intermediate roots between two calls stop being readable.
    std::vector<Bytes> take_new_nodes();

    /// Persistence: re-add a logged node, then reset the root to a stored one.
    void insert_encoded(Bytes encoded);
    void reset_root(const Digest& root);

private:
    Digest put(const Node& node);
    Node load(const Digest& d) const;
    Digest insert(const Digest& at, std::span<const std::uint8_t> path, BlockId value);
    Digest put_leaf_or_value(Node& branch, std::span<const std::uint8_t> rest, BlockId value);

    std::unordered_map<Digest, Bytes, DigestHash> nodes_;
    std::vector<Digest> pending_;
    Digest root_;
};

/// True iff `proof` shows that `key` maps to `value` (nullopt: key absent)
/// under `root`. Never throws.
bool kv_check(const Digest& root, const CompoundKey& key, std::optional<BlockId> value, const Proof& proof);
bool kv_check_raw(const Digest& root, ByteView key, std::optional<BlockId> value, const Proof& proof);

void write_proof(Writer& w, const Proof& proof);
Proof read_proof(Reader& r);

}  // namespace netchain::mpt
