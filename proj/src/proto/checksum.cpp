#include "mobsim/proto/checksum.hpp"

#include <stdexcept>

namespace mobsim::proto {

std::string_view to_string(ChecksumKernel k) {
  switch (k) {
    case ChecksumKernel::scalar: return "scalar";
    case ChecksumKernel::sse2: return "sse2";
    case ChecksumKernel::avx2: return "avx2";
  }
  return "?";
}

namespace detail {

// Reference form: big-endian words, one at a time.
std::uint16_t ones_sum_scalar(std::span<const std::uint8_t> data) {
  std::uint64_t sum = 0;
  std::size_t i = 0;
  for (; i + 1 < data.size(); i += 2) sum += static_cast<std::uint32_t>(data[i]) << 8 | data[i + 1];
  if (i < data.size()) sum += static_cast<std::uint32_t>(data[i]) << 8;
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(sum);
}

}  // namespace detail

namespace {

bool cpu_has(ChecksumKernel k) {
#if defined(MOBSIM_HAVE_X86_KERNELS)
  __builtin_cpu_init();
  switch (k) {
    case ChecksumKernel::scalar: return true;
    case ChecksumKernel::sse2: return __builtin_cpu_supports("sse2");
    case ChecksumKernel::avx2: return __builtin_cpu_supports("avx2");
  }
  return false;
#else
  return k == ChecksumKernel::scalar;
#endif
}

}  // namespace

std::vector<ChecksumKernel> available_kernels() {
  std::vector<ChecksumKernel> out;
  for (auto k : {ChecksumKernel::scalar, ChecksumKernel::sse2, ChecksumKernel::avx2})
    if (cpu_has(k)) out.push_back(k);
  return out;
}

ChecksumKernel default_kernel() {
  static const ChecksumKernel best = [] {
    if (cpu_has(ChecksumKernel::avx2)) return ChecksumKernel::avx2;
    if (cpu_has(ChecksumKernel::sse2)) return ChecksumKernel::sse2;
    return ChecksumKernel::scalar;
  }();
  return best;
}

std::uint16_t ones_sum(std::span<const std::uint8_t> data, ChecksumKernel kernel) {
  switch (kernel) {
    case ChecksumKernel::scalar: return detail::ones_sum_scalar(data);
#if defined(MOBSIM_HAVE_X86_KERNELS)
    case ChecksumKernel::sse2: return detail::ones_sum_sse2(data);
    case ChecksumKernel::avx2: return detail::ones_sum_avx2(data);
#else
    default: break;
#endif
  }
  throw std::invalid_argument("checksum kernel not built for this target");
}

std::uint16_t ones_sum(std::span<const std::uint8_t> data) { return ones_sum(data, default_kernel()); }

}  // namespace mobsim::proto
