#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mobsim::proto {

/// Ones'-complement summation kernels. All variants return the same folded
/// 16-bit sum of the buffer read as big-endian words (odd tail padded with a
/// zero byte); the SIMD ones exist only for speed.
enum class ChecksumKernel { scalar, sse2, avx2 };

std::string_view to_string(ChecksumKernel k);

/// Kernels usable on this CPU, scalar first.
std::vector<ChecksumKernel> available_kernels();

/// Best available kernel, detected once.
ChecksumKernel default_kernel();

/// Folded ones'-complement sum (not inverted), in [0, 0xffff].
std::uint16_t ones_sum(std::span<const std::uint8_t> data, ChecksumKernel kernel);
std::uint16_t ones_sum(std::span<const std::uint8_t> data);

/// Adds two folded sums in ones'-complement arithmetic.
constexpr std::uint16_t ones_add(std::uint32_t a, std::uint32_t b) {
  std::uint32_t s = a + b;
  s = (s & 0xffff) + (s >> 16);
  s = (s & 0xffff) + (s >> 16);
  return static_cast<std::uint16_t>(s);
}

namespace detail {
std::uint16_t ones_sum_scalar(std::span<const std::uint8_t> data);
std::uint16_t ones_sum_sse2(std::span<const std::uint8_t> data);
std::uint16_t ones_sum_avx2(std::span<const std::uint8_t> data);
}  // namespace detail

}  // namespace mobsim::proto
