#include <immintrin.h>

#include "mobsim/proto/checksum.hpp"

namespace mobsim::proto::detail {

std::uint16_t ones_sum_avx2(std::span<const std::uint8_t> data) {
  const std::uint8_t* p = data.data();
  std::size_t n = data.size();
  std::uint64_t total = 0;
  const __m256i zero = _mm256_setzero_si256();
  constexpr std::size_t kBlock = 32 * 16384;
  while (n >= 32) {
    __m256i acc = zero;
    std::size_t chunk = n < kBlock ? n & ~std::size_t{31} : kBlock;
    n -= chunk;
    for (; chunk != 0; chunk -= 32, p += 32) {
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
      acc = _mm256_add_epi32(acc, _mm256_unpacklo_epi16(v, zero));
      acc = _mm256_add_epi32(acc, _mm256_unpackhi_epi16(v, zero));
    }
    alignas(32) std::uint32_t lanes[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    for (auto l : lanes) total += l;
  }
  // Remainder (< 32 bytes, even offset) through the SSE2 path keeps the
  // little-endian convention consistent.
  const std::uint16_t rest = ones_sum_sse2({p, n});
  // total holds little-endian words; fold and swap before combining.
  while (total >> 16) total = (total & 0xffff) + (total >> 16);
  const auto s = static_cast<std::uint16_t>(total);
  return ones_add(static_cast<std::uint16_t>((s >> 8) | (s << 8)), rest);
}

}  // namespace mobsim::proto::detail
