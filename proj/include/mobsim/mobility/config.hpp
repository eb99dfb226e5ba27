#pragma once

#include <chrono>
#include <optional>
#include <string_view>

#include "mobsim/sim/time.hpp"

namespace mobsim::mobility {

using namespace std::chrono_literals;
using sim::Duration;

enum class Variant { mipv6, hmipv6, hmipv6_shuffling };
std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

enum class DetectionKind {
  router_advertisement,  // wait for the next periodic RA
  l2_trigger,            // L2-up triggers a router solicitation
  fixed,                 // constant t_local (analytic experiments)
};
std::string_view to_string(DetectionKind k);
std::optional<DetectionKind> parse_detection(std::string_view text);

struct DetectionMode {
  DetectionKind kind = DetectionKind::router_advertisement;
  // Periodic unsolicited RA interval, drawn uniformly per advertisement.
  Duration ra_min_interval = 37ms;
  Duration ra_max_interval = 50ms;
  // Solicited discovery: MAX_RTR_SOLICITATION_DELAY at the mobile,
  // MAX_RA_DELAY_TIME at the router, plus the RS/RA flight time.
  Duration max_rtr_solicitation_delay = 1ms;
  Duration max_ra_delay_time = 1ms;
  Duration solicitation_handshake = 1ms;
  Duration fixed_t_local = 0ms;

  /// Throws std::invalid_argument on inconsistent timers.
  void validate() const;
};

/// Link-local readdressing time, uniform in [mean - spread, mean + spread].
struct ReaddressDelay {
  Duration mean = 25ms;
  Duration spread = 0ms;
};

enum class MulticastMode { m_hmipv6, bidirectional_tunnel, remote_subscription };
std::string_view to_string(MulticastMode m);
std::optional<MulticastMode> parse_multicast_mode(std::string_view text);

enum class BicastMode { bicast, probe };
std::string_view to_string(BicastMode m);
std::optional<BicastMode> parse_bicast_mode(std::string_view text);

struct MobilityConfig {
  Variant variant = Variant::mipv6;
  DetectionMode detection;
  ReaddressDelay readdress;

  bool route_optimization = true;
  bool cn_binding_ack = false;
  bool dual_entries = true;
  Duration dual_entry_lifetime = 3s;
  Duration binding_lifetime = 420s;

  Duration retransmit_initial = 1s;
  int retransmit_tries = 3;
  Duration rr_retransmit = 1s;

  MulticastMode multicast_mode = MulticastMode::m_hmipv6;
  BicastMode bicast_mode = BicastMode::bicast;
  Duration membership_delay = 30s;   // new branch for a joining router
  Duration tree_convergence = 30s;   // new source tree
  std::optional<Duration> t_bicast;  // default: tree_convergence + 10 %
  Duration probe_interval = 1s;

  Duration bicast_timeout() const { return t_bicast.value_or(tree_convergence + tree_convergence / 10); }
};

}  // namespace mobsim::mobility
