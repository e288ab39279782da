#include <netchain/mpt.hpp>

#include <algorithm>

namespace netchain::mpt {
namespace {

using Path = std::span<const std::uint8_t>;

std::size_t common_prefix(Path a, Path b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

void write_nibbles(Writer& w, const Nibbles& path) {
    w.u32(static_cast<std::uint32_t>(path.size()));
    for (std::uint8_t n : path) w.u8(n);
}

Nibbles read_nibbles(Reader& r) {
    const std::size_t n = r.count(1);
    Nibbles path(n);
    for (auto& x : path) {
        x = r.u8();
        if (x > 0x0f) throw DecodeError("nibble out of range");
    }
    return path;
}

Node make_leaf(Path path, BlockId value) {
    Node n;
    n.kind = Node::Kind::leaf;
    n.path.assign(path.begin(), path.end());
    n.value = value;
    return n;
}

Node make_extension(Path path, const Digest& child) {
    Node n;
    n.kind = Node::Kind::extension;
    n.path.assign(path.begin(), path.end());
    n.child = child;
    return n;
}

// Outcome of walking one node toward `remaining`.
struct Step {
    enum class Kind { found, absent, descend } kind;
    std::optional<BlockId> value;
    Digest next;
    std::size_t consumed = 0;
};

Step step(const Node& node, Path remaining) {
    switch (node.kind) {
        case Node::Kind::empty:
            return {Step::Kind::absent, std::nullopt, {}, 0};
        case Node::Kind::leaf:
            if (std::equal(node.path.begin(), node.path.end(), remaining.begin(), remaining.end())) {
                return {Step::Kind::found, node.value, {}, 0};
            }
            return {Step::Kind::absent, std::nullopt, {}, 0};
        case Node::Kind::extension:
            if (remaining.size() >= node.path.size() &&
                std::equal(node.path.begin(), node.path.end(), remaining.begin())) {
                return {Step::Kind::descend, std::nullopt, node.child, node.path.size()};
            }
            return {Step::Kind::absent, std::nullopt, {}, 0};
        case Node::Kind::branch:
            if (remaining.empty()) {
                return {node.value ? Step::Kind::found : Step::Kind::absent, node.value, {}, 0};
            }
            if (const auto& c = node.children[remaining[0]]) {
                return {Step::Kind::descend, std::nullopt, *c, 1};
            }
            return {Step::Kind::absent, std::nullopt, {}, 0};
    }
    return {Step::Kind::absent, std::nullopt, {}, 0};
}

}  // namespace

Nibbles to_nibbles(ByteView key) {
    Nibbles out;
    out.reserve(key.size() * 2);
    for (std::uint8_t b : key) {
        out.push_back(b >> 4);
        out.push_back(b & 0x0f);
    }
    return out;
}

Bytes Node::encode() const {
    Writer w;
    w.u8(tag::kMptNode).u8(static_cast<std::uint8_t>(kind));
    switch (kind) {
        case Kind::empty:
            break;
        case Kind::leaf:
            write_nibbles(w, path);
            w.i64(value.value_or(kNoBlock));
            break;
        case Kind::extension:
            write_nibbles(w, path);
            w.digest(child);
            break;
        case Kind::branch: {
            std::uint16_t bitmap = 0;
            for (int i = 0; i < 16; ++i) {
                if (children[i]) bitmap |= static_cast<std::uint16_t>(1u << i);
            }
            w.u16(bitmap);
            for (const auto& c : children) {
                if (c) w.digest(*c);
            }
            w.u8(value ? 1 : 0);
            if (value) w.i64(*value);
            break;
        }
    }
    return std::move(w).bytes();
}

Node Node::decode(ByteView bytes) {
    Reader r(bytes);
    if (r.u8() != tag::kMptNode) throw DecodeError("expected MPT node tag");
    Node n;
    const std::uint8_t kind = r.u8();
    switch (kind) {
        case 0:
            n.kind = Kind::empty;
            break;
        case 1:
            n.kind = Kind::leaf;
            n.path = read_nibbles(r);
            n.value = r.i64();
            break;
        case 2:
            n.kind = Kind::extension;
            n.path = read_nibbles(r);
            if (n.path.empty()) throw DecodeError("extension with empty path");
            n.child = r.digest();
            break;
        case 3: {
            n.kind = Kind::branch;
            const std::uint16_t bitmap = r.u16();
            for (int i = 0; i < 16; ++i) {
                if (bitmap & (1u << i)) n.children[i] = r.digest();
            }
            const std::uint8_t has_value = r.u8();
            if (has_value > 1) throw DecodeError("invalid branch value flag");
            if (has_value) n.value = r.i64();
            break;
        }
        default:
            throw DecodeError("unknown MPT node kind");
    }
    r.expect_end();
    return n;
}

Digest empty_root() {
    static const Digest root = hash(Node{}.encode());
    return root;
}

// ---------------------------------------------------------------------------
// Store

Store::Store() { root_ = put(Node{}); }

Digest Store::put(const Node& node) {
    Bytes encoded = node.encode();
    const Digest d = hash(encoded);
    if (nodes_.find(d) == nodes_.end()) {
        pending_.push_back(d);
        nodes_.emplace(d, std::move(encoded));
    }
    return d;
}

Node Store::load(const Digest& d) const { return Node::decode(node_bytes(d)); }

const Bytes& Store::node_bytes(const Digest& d) const {
    const auto it = nodes_.find(d);
    if (it == nodes_.end()) throw IntegrityError("MPT node missing from store: " + d.hex());
    return it->second;
}

// Place `value` at `rest` below a branch under construction.
Digest Store::put_leaf_or_value(Node& branch, Path rest, BlockId value) {
    if (rest.empty()) {
        branch.value = value;
        return {};
    }
    const Digest d = put(make_leaf(rest.subspan(1), value));
    branch.children[rest[0]] = d;
    return d;
}

Digest Store::insert(const Digest& at, Path path, BlockId value) {
    Node node = load(at);
    switch (node.kind) {
        case Node::Kind::empty:
            return put(make_leaf(path, value));

        case Node::Kind::leaf: {
            if (std::equal(node.path.begin(), node.path.end(), path.begin(), path.end())) {
                return put(make_leaf(path, value));
            }
            const std::size_t common = common_prefix(node.path, path);
            Node branch;
            branch.kind = Node::Kind::branch;
            put_leaf_or_value(branch, Path(node.path).subspan(common), *node.value);
            put_leaf_or_value(branch, path.subspan(common), value);
            const Digest b = put(branch);
            return common > 0 ? put(make_extension(path.first(common), b)) : b;
        }

        case Node::Kind::extension: {
            const std::size_t common = common_prefix(node.path, path);
            if (common == node.path.size()) {
                const Digest child = insert(node.child, path.subspan(common), value);
                return put(make_extension(node.path, child));
            }
            Node branch;
            branch.kind = Node::Kind::branch;
            const Path rest = Path(node.path).subspan(common);
            branch.children[rest[0]] =
                rest.size() == 1 ? node.child : put(make_extension(rest.subspan(1), node.child));
            put_leaf_or_value(branch, path.subspan(common), value);
            const Digest b = put(branch);
            return common > 0 ? put(make_extension(path.first(common), b)) : b;
        }

        case Node::Kind::branch: {
            if (path.empty()) {
                node.value = value;
                return put(node);
            }
            auto& slot = node.children[path[0]];
            slot = slot ? insert(*slot, path.subspan(1), value) : put(make_leaf(path.subspan(1), value));
            return put(node);
        }
    }
    throw IntegrityError("corrupt MPT node kind");
}

Digest Store::set(const CompoundKey& key, BlockId value) { return set_raw(codec::encode_key(key), value); }

Digest Store::set_raw(ByteView key, BlockId value) {
    const Nibbles path = to_nibbles(key);
    root_ = insert(root_, path, value);
    return root_;
}

Lookup Store::get_at(const Digest& root, const CompoundKey& key) const {
    return get_raw_at(root, codec::encode_key(key));
}

Lookup Store::get_raw_at(const Digest& root, ByteView key) const {
    const Nibbles nibbles = to_nibbles(key);
    Path remaining(nibbles);
    Lookup out;
    Digest cur = root;
    for (;;) {
        const Bytes& bytes = node_bytes(cur);
        out.proof.nodes.push_back(bytes);
        const Step s = step(Node::decode(bytes), remaining);
        if (s.kind == Step::Kind::found) {
            out.value = s.value;
            return out;
        }
        if (s.kind == Step::Kind::absent) return out;
        cur = s.next;
        remaining = remaining.subspan(s.consumed);
    }
}

std::vector<Bytes> Store::take_new_nodes() {
    // A run of set() calls leaves superseded copies of every touched path;
    // only what the current root still reaches is worth keeping.
    std::unordered_map<Digest, std::size_t, DigestHash> fresh;
    for (std::size_t i = 0; i < pending_.size(); ++i) fresh.emplace(pending_[i], i);
    std::vector<bool> keep(pending_.size());
    std::vector<Digest> stack{root_};
    while (!stack.empty()) {
        const Digest d = stack.back();
        stack.pop_back();
        const auto it = fresh.find(d);
        if (it == fresh.end() || keep[it->second]) continue;
        keep[it->second] = true;
        const Node n = load(d);
        if (n.kind == Node::Kind::extension) stack.push_back(n.child);
        for (const auto& c : n.children) {
            if (c) stack.push_back(*c);
        }
    }
    std::vector<Bytes> out;
    for (std::size_t i = 0; i < pending_.size(); ++i) {
        const auto it = nodes_.find(pending_[i]);
        if (keep[i]) {
            out.push_back(it->second);
        } else {
            nodes_.erase(it);
        }
    }
    pending_.clear();
    return out;
}

void Store::insert_encoded(Bytes encoded) {
    Node::decode(encoded);  // validates
    const Digest d = hash(encoded);
    nodes_.emplace(d, std::move(encoded));
}

void Store::reset_root(const Digest& root) {
    if (!contains(root)) throw IntegrityError("MPT root not present in node log: " + root.hex());
    root_ = root;
}

// ---------------------------------------------------------------------------
// Verification

bool kv_check(const Digest& root, const CompoundKey& key, std::optional<BlockId> value, const Proof& proof) {
    return kv_check_raw(root, codec::encode_key(key), value, proof);
}

bool kv_check_raw(const Digest& root, ByteView key, std::optional<BlockId> value, const Proof& proof) {
    const Nibbles nibbles = to_nibbles(key);
    Path remaining(nibbles);
    Digest expected = root;
    for (std::size_t i = 0; i < proof.nodes.size(); ++i) {
        if (hash(proof.nodes[i]) != expected) return false;
        Node node;
        try {
            node = Node::decode(proof.nodes[i]);
        } catch (const DecodeError&) {
            return false;
        }
        const Step s = step(node, remaining);
        if (s.kind != Step::Kind::descend) {
            // The path ends here; the proof must end here too.
            if (i + 1 != proof.nodes.size()) return false;
            return s.kind == Step::Kind::found ? s.value == value : !value.has_value();
        }
        expected = s.next;
        remaining = remaining.subspan(s.consumed);
    }
    return false;  // ran out of nodes mid-path
}

void write_proof(Writer& w, const Proof& proof) {
    w.u32(static_cast<std::uint32_t>(proof.nodes.size()));
    for (const Bytes& n : proof.nodes) w.blob(n);
}

Proof read_proof(Reader& r) {
    Proof proof;
    const std::size_t n = r.count(4);
    proof.nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) proof.nodes.push_back(r.blob());
    return proof;
}

}  // namespace netchain::mpt
