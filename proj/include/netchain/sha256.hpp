#pragma once

// SHA-256 with runtime-selected compression kernels.
//
// Three kernels are provided:
//   scalar  portable reference, always available
//   shani   x86 SHA extensions, one message at a time
//   avx2    eight independent messages per call (lane-parallel)
//
// Every kernel must produce identical digests; the scalar kernel is the
// reference the others are tested against. Single-message hashing uses the
// fastest single-message kernel; batches of independent messages are fed to
// the lane-parallel kernel in groups of eight when it is available.
//
// NETCHAIN_HASH_KERNEL=scalar|shani|avx2 overrides detection at startup.

#include <netchain/digest.hpp>

#include <optional>
#include <span>
#include <string_view>

namespace netchain::sha256 {

enum class Kernel { scalar, shani, avx2 };

std::string_view kernel_name(Kernel kernel) noexcept;
std::optional<Kernel> parse_kernel(std::string_view name) noexcept;

/// True when the CPU (and build) can run `kernel`.
bool kernel_supported(Kernel kernel) noexcept;

/// Kernel currently used by `digest` / `digest_many`.
Kernel active_kernel() noexcept;

/// Force a kernel; throws std::invalid_argument when unsupported.
void set_active_kernel(Kernel kernel);

/// Re-run CPU detection (and the environment override).
void reset_active_kernel();

Digest digest(ByteView message);
Digest digest(ByteView message, Kernel kernel);

/// Hash independent messages; out.size() must equal messages.size().
void digest_many(std::span<const ByteView> messages, std::span<Digest> out);
void digest_many(std::span<const ByteView> messages, std::span<Digest> out, Kernel kernel);

}  // namespace netchain::sha256
