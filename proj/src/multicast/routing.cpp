#include "mobsim/multicast/routing.hpp"

#include <stdexcept>

namespace mobsim::multicast {

MulticastRouting::MulticastRouting(sim::Network& net, Duration membership_delay, Duration tree_convergence)
    : net_(net), membership_delay_(membership_delay), tree_convergence_(tree_convergence) {
  if (membership_delay < Duration::zero() || tree_convergence < Duration::zero())
    throw std::invalid_argument("multicast routing delays must be non-negative");
}

SimTime MulticastRouting::join(const Ipv6Addr& group, NodeId member) {
  auto [it, inserted] = members_[group].try_emplace(member, net_.simulator().now() + membership_delay_);
  return it->second;
}

void MulticastRouting::add_member(const Ipv6Addr& group, NodeId member, SimTime ready) {
  members_[group][member] = ready;
}

void MulticastRouting::leave(const Ipv6Addr& group, NodeId member) {
  auto it = members_.find(group);
  if (it != members_.end()) it->second.erase(member);
}

bool MulticastRouting::is_member(const Ipv6Addr& group, NodeId member) const {
  return member_ready(group, member).has_value();
}

std::optional<SimTime> MulticastRouting::member_ready(const Ipv6Addr& group, NodeId member) const {
  auto it = members_.find(group);
  if (it == members_.end()) return std::nullopt;
  auto m = it->second.find(member);
  if (m == it->second.end()) return std::nullopt;
  return m->second;
}

SimTime MulticastRouting::request_tree(NodeId root, const Ipv6Addr& group) {
  auto [it, inserted] = trees_.try_emplace({root, group}, net_.simulator().now() + tree_convergence_);
  return it->second;
}

void MulticastRouting::install_tree(NodeId root, const Ipv6Addr& group, SimTime ready) {
  trees_[{root, group}] = ready;
}

void MulticastRouting::release_tree(NodeId root, const Ipv6Addr& group) { trees_.erase({root, group}); }

std::optional<SimTime> MulticastRouting::tree_ready(NodeId root, const Ipv6Addr& group) const {
  auto it = trees_.find({root, group});
  if (it == trees_.end()) return std::nullopt;
  return it->second;
}

std::size_t MulticastRouting::inject(NodeId root, const proto::Packet& packet) {
  if (!packet.dst.is_multicast()) throw std::invalid_argument("inject: destination is not a group address");
  ++counters_.injected;
  const SimTime now = net_.simulator().now();
  auto tree = trees_.find({root, packet.dst});
  if (tree == trees_.end() || tree->second > now) {
    ++counters_.dropped_unready;
    net_.discard(packet, sim::DropReason::unreachable, root);
    return 0;
  }
  std::size_t copies = 0;
  auto group = members_.find(packet.dst);
  if (group == members_.end()) return 0;
  for (const auto& [member, ready] : group->second) {
    if (ready > now) continue;
    net_.send(root, member, packet);
    ++copies;
  }
  counters_.copies += copies;
  return copies;
}

}  // namespace mobsim::multicast
