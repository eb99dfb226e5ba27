#include "mobsim/mobility/config.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace mobsim::mobility {

namespace {

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [e, n] : table)
    if (e == v) return n;
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view text) {
  for (const auto& [e, n] : table)
    if (n == text) return e;
  return std::nullopt;
}

constexpr std::array<std::pair<Variant, std::string_view>, 3> kVariants{{
    {Variant::mipv6, "mipv6"},
    {Variant::hmipv6, "hmipv6"},
    {Variant::hmipv6_shuffling, "hmipv6-shuffling"},
}};
constexpr std::array<std::pair<DetectionKind, std::string_view>, 3> kDetection{{
    {DetectionKind::router_advertisement, "ra"},
    {DetectionKind::l2_trigger, "l2-trigger"},
    {DetectionKind::fixed, "fixed"},
}};
constexpr std::array<std::pair<MulticastMode, std::string_view>, 3> kMulticast{{
    {MulticastMode::m_hmipv6, "m-hmipv6"},
    {MulticastMode::bidirectional_tunnel, "bidir-tunnel"},
    {MulticastMode::remote_subscription, "remote-subscription"},
}};
constexpr std::array<std::pair<BicastMode, std::string_view>, 2> kBicast{{
    {BicastMode::bicast, "bicast"},
    {BicastMode::probe, "probe"},
}};

}  // namespace

std::string_view to_string(Variant v) { return name_of(kVariants, v); }
std::optional<Variant> parse_variant(std::string_view t) { return value_of(kVariants, t); }
std::string_view to_string(DetectionKind k) { return name_of(kDetection, k); }
std::optional<DetectionKind> parse_detection(std::string_view t) { return value_of(kDetection, t); }
std::string_view to_string(MulticastMode m) { return name_of(kMulticast, m); }
std::optional<MulticastMode> parse_multicast_mode(std::string_view t) { return value_of(kMulticast, t); }
std::string_view to_string(BicastMode m) { return name_of(kBicast, m); }
std::optional<BicastMode> parse_bicast_mode(std::string_view t) { return value_of(kBicast, t); }

void DetectionMode::validate() const {
  if (ra_min_interval <= Duration::zero() || ra_min_interval > ra_max_interval)
    throw std::invalid_argument("RA interval requires 0 < min <= max");
  if (max_rtr_solicitation_delay < Duration::zero() || max_ra_delay_time < Duration::zero() ||
      solicitation_handshake < Duration::zero())
    throw std::invalid_argument("L2-trigger timers must be >= 0");
  if (fixed_t_local < Duration::zero()) throw std::invalid_argument("fixed t_local must be >= 0");
}

}  // namespace mobsim::mobility
