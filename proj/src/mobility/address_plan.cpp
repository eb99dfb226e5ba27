#include "mobsim/mobility/address_plan.hpp"

#include <stdexcept>

namespace mobsim::mobility {

namespace {
constexpr std::uint64_t kInterfaceBase = 0x0200'0000'0000'0000ULL;
}

AddressPlan::AddressPlan(const sim::Topology& topo) : topo_(topo), home_agent_(topo.size()) {
  prefixes_.reserve(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    Ipv6Addr::Bytes b{};
    b[0] = 0x20;
    b[1] = 0x01;
    b[2] = 0x0d;
    b[3] = 0xb8;
    const auto tag = static_cast<std::uint32_t>(i + 1);
    b[4] = static_cast<std::uint8_t>(tag >> 24);
    b[5] = static_cast<std::uint8_t>(tag >> 16);
    b[6] = static_cast<std::uint8_t>(tag >> 8);
    b[7] = static_cast<std::uint8_t>(tag);
    prefixes_.emplace_back(b, 64, proto::AddressRole::plain);
  }
}

const Ipv6Addr& AddressPlan::prefix_of(NodeId fixed) const { return prefixes_.at(sim::index_of(fixed)); }

Ipv6Addr AddressPlan::node_address(NodeId fixed) const {
  return Ipv6Addr::from_prefix(prefix_of(fixed), 1, proto::AddressRole::plain);
}

void AddressPlan::set_home_agent(NodeId mobile, NodeId home_agent) {
  home_agent_.at(sim::index_of(mobile)) = home_agent;
}

NodeId AddressPlan::home_agent_of(NodeId mobile) const {
  const auto& ha = home_agent_.at(sim::index_of(mobile));
  if (!ha) throw std::logic_error("mobile '" + topo_.node(mobile).name + "' has no home agent");
  return *ha;
}

std::uint64_t AddressPlan::interface_id(NodeId mobile) const { return kInterfaceBase + sim::index_of(mobile); }

Ipv6Addr AddressPlan::home_address(NodeId mobile) const {
  return Ipv6Addr::from_prefix(prefix_of(home_agent_of(mobile)), interface_id(mobile), proto::AddressRole::home);
}

Ipv6Addr AddressPlan::on_link_coa(NodeId mobile, NodeId access_point) const {
  return Ipv6Addr::from_prefix(prefix_of(access_point), interface_id(mobile), proto::AddressRole::on_link_coa);
}

Ipv6Addr AddressPlan::regional_coa(NodeId mobile, NodeId map) const {
  return Ipv6Addr::from_prefix(prefix_of(map), interface_id(mobile), proto::AddressRole::regional_coa);
}

std::optional<AddressPlan::Target> AddressPlan::resolve(const Ipv6Addr& addr) const {
  if (addr.is_multicast()) return std::nullopt;
  for (std::size_t i = 0; i < prefixes_.size(); ++i) {
    if (!prefixes_[i].same_prefix(addr)) continue;
    Target t{static_cast<NodeId>(i), std::nullopt};
    if (topo_.nodes()[i].kind == sim::NodeKind::access_point) t.mobile = mobile_by_interface(addr.interface_id());
    return t;
  }
  return std::nullopt;
}

std::optional<NodeId> AddressPlan::mobile_by_home(const Ipv6Addr& home) const {
  auto m = mobile_by_interface(home.interface_id());
  if (!m || !home_agent_[sim::index_of(*m)] || !(home_address(*m) == home)) return std::nullopt;
  return m;
}

std::optional<NodeId> AddressPlan::mobile_by_interface(std::uint64_t iid) const {
  if (iid < kInterfaceBase) return std::nullopt;
  const auto idx = iid - kInterfaceBase;
  if (idx >= topo_.size() || topo_.nodes()[idx].kind != sim::NodeKind::mobile_node) return std::nullopt;
  return static_cast<NodeId>(idx);
}

}  // namespace mobsim::mobility
