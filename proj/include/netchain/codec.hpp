#pragma once

// Canonical byte encodings and the hash primitive. Every digest in the
// system is SHA-256 over one of the encodings below; the byte layouts are
// documented in docs/encoding.md and must not change.
//
// Conventions: integers are fixed-width big-endian; strings are prefixed by
// a u32 length; each hashed node kind starts with its own tag byte.

#include <netchain/digest.hpp>
#include <netchain/errors.hpp>
#include <netchain/types.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace netchain {

namespace tag {
inline constexpr std::uint8_t kChainItem = 0x01;
inline constexpr std::uint8_t kSmtLeaf = 0x02;
inline constexpr std::uint8_t kSmtInternal = 0x03;
inline constexpr std::uint8_t kMptNode = 0x04;
inline constexpr std::uint8_t kHeader = 0x05;
inline constexpr std::uint8_t kObject = 0x06;

// Pointer slot markers inside a chain item.
inline constexpr std::uint8_t kPtrBottom = 0x00;
inline constexpr std::uint8_t kPtrDigest = 0x01;
}  // namespace tag

/// SHA-256 of `payload`.
Digest hash(ByteView payload);

/// Append-only big-endian encoder.
class Writer {
public:
    Writer() = default;
    explicit Writer(std::size_t reserve) { buf_.reserve(reserve); }

    Writer& u8(std::uint8_t v);
    Writer& u16(std::uint16_t v);
    Writer& u32(std::uint32_t v);
    Writer& u64(std::uint64_t v);
    Writer& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    Writer& raw(ByteView bytes);
    Writer& digest(const Digest& d) { return raw(d.view()); }
    /// u32 length followed by the bytes.
    Writer& str(std::string_view s);
    Writer& blob(ByteView bytes);

    const Bytes& bytes() const& noexcept { return buf_; }
    Bytes bytes() && noexcept { return std::move(buf_); }
    std::size_t size() const noexcept { return buf_.size(); }

private:
    Bytes buf_;
};

/// Bounds-checked decoder; every read past the end throws DecodeError.
class Reader {
public:
    explicit Reader(ByteView data) noexcept : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    ByteView raw(std::size_t n);
    Digest digest();
    std::string str();
    Bytes blob();

    /// Read a u32 element count and reject counts that cannot fit in the
    /// remaining input at `min_element_size` bytes each.
    std::size_t count(std::size_t min_element_size);

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == data_.size(); }
    void expect_end() const;

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

namespace codec {

/// len(u) u len(type) type. Also the MPT path for the key.
Bytes encode_key(const CompoundKey& key);
void write_key(Writer& w, const CompoundKey& key);
CompoundKey read_key(Reader& r);

/// 0x01 | len(v) v | w:i64 | (0x00 ‖ 32 zero bytes) or (0x01 ‖ ptr)
Bytes encode_chain_item(std::string_view v, Weight w, const std::optional<Digest>& ptr);
Bytes encode_chain_item(const ChainItem& item);
ChainItem decode_chain_item(ByteView bytes);
void write_chain_item(Writer& w, const ChainItem& item);
ChainItem read_chain_item(Reader& r);

/// Digest(ci): hash of the canonical chain-item encoding.
Digest chain_item_digest(const ChainItem& item);

/// 0x02 | len(u) u | len(type) type | ptr_h [| id_pre:i64]
/// `id_pre` is present exactly for NetChain+ leaves.
Bytes encode_leaf(const CompoundKey& key, const Digest& ptr_h, std::optional<BlockId> id_pre);

/// 0x03 | left | right
Bytes encode_internal(const Digest& left, const Digest& right);
Digest internal_digest(const Digest& left, const Digest& right);

/// 0x06 | len(u) u | len(v) v | len(type) type | w:i64
Bytes encode_object(const Object& o);
void write_object(Writer& w, const Object& o);
Object read_object(Reader& r);

}  // namespace codec
}  // namespace netchain
