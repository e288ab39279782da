#include <netchain/codec.hpp>
#include <netchain/sha256.hpp>

#include <limits>

namespace netchain {

std::string_view mode_name(Mode mode) noexcept {
    return mode == Mode::netchain ? "netchain" : "netchain-plus";
}

std::optional<Mode> parse_mode(std::string_view name) noexcept {
    if (name == "netchain") return Mode::netchain;
    if (name == "netchain-plus" || name == "plus") return Mode::netchain_plus;
    return std::nullopt;
}

Digest hash(ByteView payload) { return sha256::digest(payload); }

// ---------------------------------------------------------------------------
// Writer / Reader

Writer& Writer::u8(std::uint8_t v) {
    buf_.push_back(v);
    return *this;
}

Writer& Writer::u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
    return *this;
}

Writer& Writer::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Writer& Writer::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

Writer& Writer::raw(ByteView bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    return *this;
}

Writer& Writer::str(std::string_view s) { return blob(as_bytes(s)); }

Writer& Writer::blob(ByteView bytes) {
    if (bytes.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("byte string longer than 2^32-1");
    }
    u32(static_cast<std::uint32_t>(bytes.size()));
    return raw(bytes);
}

ByteView Reader::raw(std::size_t n) {
    if (n > remaining()) throw DecodeError("unexpected end of input");
    ByteView out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint16_t Reader::u16() {
    const ByteView b = raw(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t Reader::u32() {
    const ByteView b = raw(4);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
}

std::uint64_t Reader::u64() {
    const ByteView b = raw(8);
    std::uint64_t v = 0;
    for (std::uint8_t x : b) v = (v << 8) | x;
    return v;
}

Digest Reader::digest() {
    Digest d;
    const ByteView b = raw(Digest::size);
    std::copy(b.begin(), b.end(), d.bytes.begin());
    return d;
}

std::string Reader::str() {
    const std::uint32_t n = u32();
    const ByteView b = raw(n);
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

Bytes Reader::blob() {
    const std::uint32_t n = u32();
    const ByteView b = raw(n);
    return {b.begin(), b.end()};
}

std::size_t Reader::count(std::size_t min_element_size) {
    const std::uint32_t n = u32();
    if (min_element_size > 0 && n > remaining() / min_element_size) {
        throw DecodeError("element count exceeds remaining input");
    }
    return n;
}

void Reader::expect_end() const {
    if (!at_end()) throw DecodeError("trailing bytes after encoded value");
}

// ---------------------------------------------------------------------------
// Encoders

namespace codec {

void write_key(Writer& w, const CompoundKey& key) { w.str(key.u).str(key.type); }

CompoundKey read_key(Reader& r) {
    CompoundKey key;
    key.u = r.str();
    key.type = r.str();
    return key;
}

Bytes encode_key(const CompoundKey& key) {
    Writer w(8 + key.u.size() + key.type.size());
    write_key(w, key);
    return std::move(w).bytes();
}

namespace {

void write_ptr(Writer& w, const std::optional<Digest>& ptr) {
    if (ptr) {
        w.u8(tag::kPtrDigest).digest(*ptr);
    } else {
        w.u8(tag::kPtrBottom).digest(Digest{});
    }
}

std::optional<Digest> read_ptr(Reader& r) {
    const std::uint8_t marker = r.u8();
    const Digest d = r.digest();
    if (marker == tag::kPtrDigest) return d;
    if (marker == tag::kPtrBottom && d.is_zero()) return std::nullopt;
    throw DecodeError("invalid chain pointer encoding");
}

}  // namespace

void write_chain_item(Writer& w, const ChainItem& item) {
    w.u8(tag::kChainItem).str(item.value.v).i64(item.value.w);
    write_ptr(w, item.ptr);
}

ChainItem read_chain_item(Reader& r) {
    if (r.u8() != tag::kChainItem) throw DecodeError("expected chain item tag");
    ChainItem item;
    item.value.v = r.str();
    item.value.w = r.i64();
    item.ptr = read_ptr(r);
    return item;
}

Bytes encode_chain_item(std::string_view v, Weight weight, const std::optional<Digest>& ptr) {
    Writer w(1 + 4 + v.size() + 8 + 33);
    w.u8(tag::kChainItem).str(v).i64(weight);
    write_ptr(w, ptr);
    return std::move(w).bytes();
}

Bytes encode_chain_item(const ChainItem& item) {
    return encode_chain_item(item.value.v, item.value.w, item.ptr);
}

ChainItem decode_chain_item(ByteView bytes) {
    Reader r(bytes);
    ChainItem item = read_chain_item(r);
    r.expect_end();
    return item;
}

Digest chain_item_digest(const ChainItem& item) { return hash(encode_chain_item(item)); }

Bytes encode_leaf(const CompoundKey& key, const Digest& ptr_h, std::optional<BlockId> id_pre) {
    Writer w(1 + 8 + key.u.size() + key.type.size() + 32 + 8);
    w.u8(tag::kSmtLeaf);
    write_key(w, key);
    w.digest(ptr_h);
    if (id_pre) w.i64(*id_pre);
    return std::move(w).bytes();
}

Bytes encode_internal(const Digest& left, const Digest& right) {
    Writer w(65);
    w.u8(tag::kSmtInternal).digest(left).digest(right);
    return std::move(w).bytes();
}

Digest internal_digest(const Digest& left, const Digest& right) {
    std::uint8_t buf[65];
    buf[0] = tag::kSmtInternal;
    std::copy(left.bytes.begin(), left.bytes.end(), buf + 1);
    std::copy(right.bytes.begin(), right.bytes.end(), buf + 33);
    return hash(ByteView(buf, sizeof(buf)));
}

void write_object(Writer& w, const Object& o) {
    w.u8(tag::kObject).str(o.u).str(o.v).str(o.type).i64(o.w);
}

Object read_object(Reader& r) {
    if (r.u8() != tag::kObject) throw DecodeError("expected object tag");
    Object o;
    o.u = r.str();
    o.v = r.str();
    o.type = r.str();
    o.w = r.i64();
    return o;
}

Bytes encode_object(const Object& o) {
    Writer w(1 + 12 + o.u.size() + o.v.size() + o.type.size() + 8);
    write_object(w, o);
    return std::move(w).bytes();
}

}  // namespace codec
}  // namespace netchain
