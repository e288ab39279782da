#pragma once

#include <netchain/digest.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace netchain {

using VertexId = std::string;
using EdgeType = std::string;
using Weight = std::int64_t;
using BlockId = std::int64_t;

/// Inter-block link value meaning "no earlier block holds this key".
inline constexpr BlockId kNoBlock = -1;

enum class Mode : std::uint8_t {
    netchain = 0,
    netchain_plus = 1,
};

std::string_view mode_name(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view name) noexcept;

/// One graph edge <u, v, type, w>.
struct Object {
    VertexId u;
    VertexId v;
    EdgeType type;
    Weight w = 0;

    bool operator==(const Object&) const = default;
};

/// <u, type>; ordered lexicographically by u bytes, then type bytes.
struct CompoundKey {
    VertexId u;
    EdgeType type;

    auto operator<=>(const CompoundKey&) const = default;
};

/// <v, w> stored under a compound key.
struct CompoundValue {
    VertexId v;
    Weight w = 0;

    auto operator<=>(const CompoundValue&) const = default;
};

/// A hash-chain entry. `ptr` is the digest of the next item; nullopt is the
/// terminal pointer of the last item.
struct ChainItem {
    CompoundValue value;
    std::optional<Digest> ptr;

    bool operator==(const ChainItem&) const = default;
};

inline CompoundKey key_of(const Object& o) { return {o.u, o.type}; }
inline CompoundValue value_of(const Object& o) { return {o.v, o.w}; }

}  // namespace netchain
