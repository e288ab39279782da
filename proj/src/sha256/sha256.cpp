#include <netchain/sha256.hpp>

#include "kernels.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#define NETCHAIN_X86 1
#include <cpuid.h>
#else
#define NETCHAIN_X86 0
#endif

namespace netchain::sha256 {
namespace {

using detail::kBlockSize;
using detail::kLanes;

struct CpuFeatures {
    bool sha = false;
    bool avx2 = false;
};

CpuFeatures detect_features() noexcept {
    CpuFeatures f;
#if NETCHAIN_X86 && defined(NETCHAIN_HAVE_X86_KERNELS)
    unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return f;
    const bool ssse3 = (ecx & (1u << 9)) != 0;
    const bool sse41 = (ecx & (1u << 19)) != 0;
    const bool osxsave = (ecx & (1u << 27)) != 0;
    const bool avx = (ecx & (1u << 28)) != 0;
    bool ymm_enabled = false;
    if (osxsave && avx) {
        unsigned lo = 0, hi = 0;
        __asm__("xgetbv" : "=a"(lo), "=d"(hi) : "c"(0));
        ymm_enabled = (lo & 0x6u) == 0x6u;
    }
    if (__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) {
        f.sha = ssse3 && sse41 && (ebx & (1u << 29)) != 0;
        f.avx2 = ymm_enabled && (ebx & (1u << 5)) != 0;
    }
#endif
    return f;
}

const CpuFeatures& features() noexcept {
    static const CpuFeatures f = detect_features();
    return f;
}

Kernel detect_kernel() noexcept {
    if (const char* env = std::getenv("NETCHAIN_HASH_KERNEL")) {
        if (auto k = parse_kernel(env); k && kernel_supported(*k)) return *k;
    }
    if (features().sha) return Kernel::shani;
    if (features().avx2) return Kernel::avx2;
    return Kernel::scalar;
}

std::atomic<Kernel>& active() noexcept {
    static std::atomic<Kernel> kernel{detect_kernel()};
    return kernel;
}

using CompressFn = void (*)(std::uint32_t*, const std::uint8_t*, std::size_t);

// The single-message kernel that backs `kernel`. The lane-parallel kernel
// has no single-message form; it falls back to the best one available.
CompressFn single_compress(Kernel kernel) noexcept {
#if defined(NETCHAIN_HAVE_X86_KERNELS)
    if (kernel == Kernel::shani || (kernel == Kernel::avx2 && features().sha)) {
        return detail::compress_shani;
    }
#endif
    (void)kernel;
    return detail::compress_scalar;
}

std::size_t padded_blocks(std::size_t length) noexcept { return (length + 8) / kBlockSize + 1; }

// Write the final `tail` of a message of `message_length` bytes, plus
// SHA-256 padding, into `out` (padded_blocks(tail.size()) * 64 bytes).
void pad_into(ByteView tail, std::uint64_t message_length, std::uint8_t* out) noexcept {
    const std::size_t total = padded_blocks(tail.size()) * kBlockSize;
    if (!tail.empty()) std::memcpy(out, tail.data(), tail.size());
    out[tail.size()] = 0x80;
    std::memset(out + tail.size() + 1, 0, total - tail.size() - 1 - 8);
    const std::uint64_t bits = message_length * 8;
    for (int i = 0; i < 8; ++i) out[total - 1 - i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

Digest state_to_digest(const std::uint32_t state[8]) noexcept {
    Digest d;
    for (int i = 0; i < 8; ++i) {
        d.bytes[4 * i + 0] = static_cast<std::uint8_t>(state[i] >> 24);
        d.bytes[4 * i + 1] = static_cast<std::uint8_t>(state[i] >> 16);
        d.bytes[4 * i + 2] = static_cast<std::uint8_t>(state[i] >> 8);
        d.bytes[4 * i + 3] = static_cast<std::uint8_t>(state[i]);
    }
    return d;
}

Digest digest_with(ByteView message, CompressFn compress) noexcept {
    std::uint32_t state[8];
    std::memcpy(state, detail::kInitialState, sizeof(state));

    const std::size_t full = message.size() / kBlockSize;
    if (full > 0) compress(state, message.data(), full);

    const ByteView tail = message.subspan(full * kBlockSize);
    std::uint8_t buffer[2 * kBlockSize];
    pad_into(tail, message.size(), buffer);
    compress(state, buffer, padded_blocks(tail.size()));
    return state_to_digest(state);
}

#if defined(NETCHAIN_HAVE_X86_KERNELS)
// Hash exactly eight messages that share a padded block count.
void digest_x8(const ByteView* messages, Digest* out, std::size_t nblocks, Bytes& scratch) {
    const std::size_t stride = nblocks * kBlockSize;
    scratch.resize(stride * kLanes);
    const std::uint8_t* lanes[kLanes];
    std::uint32_t states[kLanes][8];
    for (std::size_t lane = 0; lane < kLanes; ++lane) {
        pad_into(messages[lane], messages[lane].size(), scratch.data() + lane * stride);
        lanes[lane] = scratch.data() + lane * stride;
        std::memcpy(states[lane], detail::kInitialState, sizeof(states[lane]));
    }
    detail::compress_x8_avx2(states, lanes, nblocks);
    for (std::size_t lane = 0; lane < kLanes; ++lane) out[lane] = state_to_digest(states[lane]);
}
#endif

}  // namespace

std::string_view kernel_name(Kernel kernel) noexcept {
    switch (kernel) {
        case Kernel::scalar: return "scalar";
        case Kernel::shani: return "shani";
        case Kernel::avx2: return "avx2";
    }
    return "unknown";
}

std::optional<Kernel> parse_kernel(std::string_view name) noexcept {
    for (Kernel k : {Kernel::scalar, Kernel::shani, Kernel::avx2}) {
        if (kernel_name(k) == name) return k;
    }
    return std::nullopt;
}

bool kernel_supported(Kernel kernel) noexcept {
    switch (kernel) {
        case Kernel::scalar: return true;
        case Kernel::shani: return features().sha;
        case Kernel::avx2: return features().avx2;
    }
    return false;
}

Kernel active_kernel() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_kernel(Kernel kernel) {
    if (!kernel_supported(kernel)) {
        throw std::invalid_argument("hash kernel not supported on this CPU: " +
                                    std::string(kernel_name(kernel)));
    }
    active().store(kernel, std::memory_order_relaxed);
}

void reset_active_kernel() { active().store(detect_kernel(), std::memory_order_relaxed); }

Digest digest(ByteView message) { return digest(message, active_kernel()); }

Digest digest(ByteView message, Kernel kernel) {
    return digest_with(message, single_compress(kernel));
}

void digest_many(std::span<const ByteView> messages, std::span<Digest> out) {
    digest_many(messages, out, active_kernel());
}

void digest_many(std::span<const ByteView> messages, std::span<Digest> out, Kernel kernel) {
    if (messages.size() != out.size()) {
        throw std::invalid_argument("digest_many: output size mismatch");
    }
    const CompressFn single = single_compress(kernel);

#if defined(NETCHAIN_HAVE_X86_KERNELS)
    if (kernel == Kernel::avx2 && features().avx2 && messages.size() >= kLanes) {
        // Lanes must agree on block count; bucket by it and run full groups
        // of eight through the vector kernel.
        std::vector<std::size_t> order(messages.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
            return padded_blocks(messages[x].size()) < padded_blocks(messages[y].size());
        });

        Bytes scratch;
        std::array<ByteView, kLanes> group;
        std::array<Digest, kLanes> group_out;
        std::size_t i = 0;
        while (i < order.size()) {
            const std::size_t nblocks = padded_blocks(messages[order[i]].size());
            std::size_t end = i;
            while (end < order.size() && padded_blocks(messages[order[end]].size()) == nblocks) ++end;
            for (; i + kLanes <= end; i += kLanes) {
                for (std::size_t lane = 0; lane < kLanes; ++lane) group[lane] = messages[order[i + lane]];
                digest_x8(group.data(), group_out.data(), nblocks, scratch);
                for (std::size_t lane = 0; lane < kLanes; ++lane) out[order[i + lane]] = group_out[lane];
            }
            for (; i < end; ++i) out[order[i]] = digest_with(messages[order[i]], single);
        }
        return;
    }
#endif

    for (std::size_t i = 0; i < messages.size(); ++i) out[i] = digest_with(messages[i], single);
}

}  // namespace netchain::sha256
