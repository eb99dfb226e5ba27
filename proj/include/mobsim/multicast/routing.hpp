#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "mobsim/proto/packet.hpp"
#include "mobsim/sim/network.hpp"

namespace mobsim::multicast {

using proto::Ipv6Addr;
using sim::Duration;
using sim::NodeId;
using sim::SimTime;

/// Abstract multicast routing: no protocol, only two latencies.
///
/// A distribution tree is identified by its root node (where packets enter
/// the tree) and the group. It forwards only once `convergence` has passed
/// since it was requested. A member router receives from a tree once its own
/// branch is ready, `membership_delay` after it joined. Forwarding along the
/// tree uses the unicast path from root to member.
class MulticastRouting {
 public:
  MulticastRouting(sim::Network& net, Duration membership_delay, Duration tree_convergence);

  /// Returns the time the member's branch is ready. Joining again is a no-op.
  SimTime join(const Ipv6Addr& group, NodeId member);
  /// Pre-established membership, ready at `ready`.
  void add_member(const Ipv6Addr& group, NodeId member, SimTime ready);
  void leave(const Ipv6Addr& group, NodeId member);
  bool is_member(const Ipv6Addr& group, NodeId member) const;
  std::optional<SimTime> member_ready(const Ipv6Addr& group, NodeId member) const;

  /// Requests the tree rooted at `root`; returns when it becomes usable.
  /// An existing tree keeps its original readiness.
  SimTime request_tree(NodeId root, const Ipv6Addr& group);
  void install_tree(NodeId root, const Ipv6Addr& group, SimTime ready);
  void release_tree(NodeId root, const Ipv6Addr& group);
  std::optional<SimTime> tree_ready(NodeId root, const Ipv6Addr& group) const;

  /// Sends `packet` from `root` to every ready member. Returns the number of
  /// copies sent; zero (and a counted drop) if the tree is not usable yet.
  std::size_t inject(NodeId root, const proto::Packet& packet);

  struct Counters {
    std::uint64_t injected = 0;
    std::uint64_t dropped_unready = 0;
    std::uint64_t copies = 0;
  };
  const Counters& counters() const { return counters_; }

  Duration membership_delay() const { return membership_delay_; }
  Duration tree_convergence() const { return tree_convergence_; }

 private:
  sim::Network& net_;
  Duration membership_delay_;
  Duration tree_convergence_;
  std::map<Ipv6Addr, std::map<NodeId, SimTime>> members_;
  std::map<std::pair<NodeId, Ipv6Addr>, SimTime> trees_;
  Counters counters_;
};

}  // namespace mobsim::multicast
