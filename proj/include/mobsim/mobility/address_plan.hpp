#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "mobsim/proto/address.hpp"
#include "mobsim/sim/topology.hpp"

namespace mobsim::mobility {

using proto::Ipv6Addr;
using sim::NodeId;

/// Deterministic addressing: fixed node i owns 2001:db8:0:<i+1>::/64 and
/// answers on ::1; a mobile's addresses reuse its interface identifier under
/// the home agent, access point or MAP prefix.
class AddressPlan {
 public:
  explicit AddressPlan(const sim::Topology& topo);

  const Ipv6Addr& prefix_of(NodeId fixed) const;
  Ipv6Addr node_address(NodeId fixed) const;

  void set_home_agent(NodeId mobile, NodeId home_agent);
  NodeId home_agent_of(NodeId mobile) const;

  std::uint64_t interface_id(NodeId mobile) const;
  Ipv6Addr home_address(NodeId mobile) const;
  Ipv6Addr on_link_coa(NodeId mobile, NodeId access_point) const;
  Ipv6Addr regional_coa(NodeId mobile, NodeId map) const;

  struct Target {
    NodeId node;                    // prefix owner
    std::optional<NodeId> mobile;   // set when the address is an LCoA
  };
  /// Owner of the /64 covering `addr`. Multicast addresses have no owner.
  std::optional<Target> resolve(const Ipv6Addr& addr) const;

  /// Mobile owning `home` as its home address.
  std::optional<NodeId> mobile_by_home(const Ipv6Addr& home) const;
  std::optional<NodeId> mobile_by_interface(std::uint64_t iid) const;

 private:
  const sim::Topology& topo_;
  std::vector<Ipv6Addr> prefixes_;
  std::vector<std::optional<NodeId>> home_agent_;
};

}  // namespace mobsim::mobility
