#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "mobsim/sim/time.hpp"
#include "mobsim/sim/topology.hpp"

namespace mobsim::mobility {

using sim::Duration;
using sim::NodeId;
using sim::SimTime;

enum class HandoverKind {
  mipv6,         // plain MIPv6 (or HMIPv6 outside any MAP domain)
  returning_home,
  intra_domain,  // same MAP, local binding update only
  inter_domain,  // HMIPv6 MAP change without shuffling
  shuffling,     // MAP change with a retained previous anchor
};
std::string_view to_string(HandoverKind k);

/// Timeline of one movement. Times are absolute simulation times; the
/// disruption counts from L2-up, the outage from detachment.
struct HandoverReport {
  std::size_t index = 0;
  NodeId mobile{};
  std::optional<NodeId> from_ap;
  NodeId to_ap{};
  HandoverKind kind = HandoverKind::mipv6;

  SimTime detach_at{};
  std::optional<SimTime> l2_up;
  std::optional<SimTime> lcoa_ready;
  Duration t_local{};

  std::optional<NodeId> previous_anchor;  // MAP or home agent kept alive
  std::optional<NodeId> new_map;
  std::optional<SimTime> map_ack;          // registration with the new MAP
  std::optional<SimTime> previous_ack;     // redirect at the previous anchor
  std::optional<SimTime> home_ack;         // home agent BA
  std::optional<SimTime> rr_done;          // last BU to a CN sent
  std::optional<SimTime> cn_bound;         // last CN processed its BU
  std::optional<SimTime> previous_released;
  std::optional<SimTime> restored;

  bool fallback = false;    // previous anchor never answered
  bool superseded = false;  // another movement began before completion
  bool collapsed = false;   // rapid movement dropped an intermediate MAP

  // Multicast source handover.
  std::optional<SimTime> tree_requested;
  std::optional<SimTime> tree_ready;
  std::optional<SimTime> bicast_stop;
  std::uint64_t sent_previous_path = 0;
  std::uint64_t sent_new_path = 0;
  std::uint64_t probes_sent = 0;

  std::optional<Duration> disruption() const {
    if (!restored || !l2_up) return std::nullopt;
    return *restored - *l2_up;
  }
  std::optional<Duration> outage() const {
    if (!restored) return std::nullopt;
    return *restored - detach_at;
  }
};

}  // namespace mobsim::mobility
