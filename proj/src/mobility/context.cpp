#include "mobsim/mobility/context.hpp"

#include <stdexcept>

#include "mobsim/mobility/mobile_node.hpp"

namespace mobsim::mobility {

Context::Context(sim::Simulator& sim_, sim::Network& net_, sim::Topology& topo_, AddressPlan& plan_,
                 multicast::MulticastRouting& mcast_, MobilityConfig cfg_, std::uint64_t seed)
    : sim(sim_), net(net_), topo(topo_), plan(plan_), mcast(mcast_), cfg(std::move(cfg_)), seed_(seed) {
  advertisers_.resize(topo.size());
}

std::optional<NodeId> Context::owner_of(const Ipv6Addr& addr) const {
  auto t = plan.resolve(addr);
  if (!t) return std::nullopt;
  return t->mobile ? *t->mobile : t->node;
}

void Context::forward(NodeId from, proto::Packet packet) {
  const Ipv6Addr& dst = proto::routing_destination(packet);
  if (dst.is_multicast()) throw std::logic_error("forward: group traffic must go through multicast routing");
  auto target = plan.resolve(dst);
  if (!target) {
    net.discard(packet, sim::DropReason::unreachable, from);
    return;
  }
  if (target->mobile)
    net.send_to_mobile(from, target->node, *target->mobile, std::move(packet));
  else
    net.send(from, target->node, std::move(packet));
}

RouterAdvertiser& Context::advertiser(NodeId access_point) {
  auto& slot = advertisers_.at(sim::index_of(access_point));
  if (!slot) {
    // One stream per access router so a router's schedule does not depend
    // on which mobiles visit it or in which order.
    sim::Rng rng{sim::Rng::mix(seed_ ^ sim::Rng::mix(0xa0000 + sim::index_of(access_point)))};
    slot = std::make_unique<RouterAdvertiser>(cfg.detection.ra_min_interval, cfg.detection.ra_max_interval,
                                              std::move(rng));
  }
  return *slot;
}

void Context::notify_cn_binding(NodeId cn, const Ipv6Addr& home, const Ipv6Addr& coa) {
  if (auto m = plan.mobile_by_home(home))
    if (auto* mn = mobile(*m)) mn->on_cn_binding(cn, coa);
}

void Context::notify_release(NodeId anchor, const Ipv6Addr& key) {
  if (auto m = plan.mobile_by_interface(key.interface_id()))
    if (auto* mn = mobile(*m)) mn->on_release(anchor);
}

}  // namespace mobsim::mobility
