#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// A 32-byte SHA-256 output.
struct Digest {
    static constexpr std::size_t size = 32;
    std::array<std::uint8_t, size> bytes{};

    auto operator<=>(const Digest&) const = default;

    const std::uint8_t* data() const noexcept { return bytes.data(); }
    std::uint8_t* data() noexcept { return bytes.data(); }
    ByteView view() const noexcept { return {bytes.data(), bytes.size()}; }

    bool is_zero() const noexcept;
    std::string hex() const;
    static Digest from_hex(std::string_view hex);
};

inline ByteView as_bytes(std::string_view s) noexcept {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView bytes);

}  // namespace netchain
