#include <emmintrin.h>

#include "mobsim/proto/checksum.hpp"

namespace mobsim::proto::detail {

namespace {

// Sums little-endian words; byte order is restored by one swap of the folded
// result, which ones'-complement addition permits.
std::uint16_t finish(std::uint64_t sum, std::span<const std::uint8_t> tail) {
  std::size_t i = 0;
  for (; i + 1 < tail.size(); i += 2) sum += static_cast<std::uint32_t>(tail[i + 1]) << 8 | tail[i];
  if (i < tail.size()) sum += tail[i];
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  const auto s = static_cast<std::uint16_t>(sum);
  return static_cast<std::uint16_t>((s >> 8) | (s << 8));
}

}  // namespace

std::uint16_t ones_sum_sse2(std::span<const std::uint8_t> data) {
  const std::uint8_t* p = data.data();
  std::size_t n = data.size();
  std::uint64_t total = 0;
  const __m128i zero = _mm_setzero_si128();
  // A 32-bit lane absorbs at most 2 words of 0xffff per step; 16k steps stay
  // well below overflow.
  constexpr std::size_t kBlock = 16 * 16384;
  while (n >= 16) {
    __m128i acc = zero;
    std::size_t chunk = n < kBlock ? n & ~std::size_t{15} : kBlock;
    n -= chunk;
    for (; chunk != 0; chunk -= 16, p += 16) {
      const __m128i v = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
      acc = _mm_add_epi32(acc, _mm_unpacklo_epi16(v, zero));
      acc = _mm_add_epi32(acc, _mm_unpackhi_epi16(v, zero));
    }
    alignas(16) std::uint32_t lanes[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(lanes), acc);
    for (auto l : lanes) total += l;
  }
  return finish(total, {p, n});
}

}  // namespace mobsim::proto::detail
