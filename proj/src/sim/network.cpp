#include "mobsim/sim/network.hpp"

#include <algorithm>
#include <cmath>

namespace mobsim::sim {

Network::Network(Simulator& sim, Topology& topo, std::uint64_t jitter_seed)
    : sim_(sim), topo_(topo), rng_(jitter_seed), sinks_(topo.size(), nullptr) {}

void Network::bind(NodeId node, PacketSink* sink) {
  if (index_of(node) >= sinks_.size()) sinks_.resize(index_of(node) + 1, nullptr);
  sinks_[index_of(node)] = sink;
}

Duration Network::traverse(const std::vector<Hop>& hops) {
  std::int64_t total = 0;
  for (const Hop& h : hops) {
    total += h.latency.count();
    if (h.epsilon > 0.0) {
      const double span = h.epsilon * static_cast<double>(h.latency.count());
      total += std::llround(rng_.uniform(-span, span));
    }
  }
  return Duration{std::max<std::int64_t>(total, 0)};
}

void Network::drop(const proto::Packet& packet, DropReason reason, NodeId where) {
  ++counters_.dropped;
  if (drop_hook_) drop_hook_(packet, reason, where);
}

void Network::deliver(NodeId to, proto::Packet packet) {
  PacketSink* sink = index_of(to) < sinks_.size() ? sinks_[index_of(to)] : nullptr;
  if (!sink) {
    drop(packet, DropReason::no_handler, to);
    return;
  }
  ++counters_.delivered;
  sink->receive(packet);
}

void Network::send(NodeId from, NodeId to, proto::Packet packet) {
  ++counters_.sent;
  if (packet.tunnel) ++counters_.tunnelled;
  if (topo_.is_mobile(from) && !topo_.attachment(from)) {
    drop(packet, DropReason::sender_detached, from);
    return;
  }
  std::vector<Hop> hops;
  try {
    hops = topo_.route(from, to);
  } catch (const Unreachable&) {
    drop(packet, DropReason::unreachable, from);
    return;
  }
  const Duration delay = traverse(hops);
  sim_.schedule_in(delay, [this, to, p = std::move(packet)]() mutable { deliver(to, std::move(p)); });
}

void Network::send_to_mobile(NodeId from, NodeId access_point, NodeId mobile, proto::Packet packet) {
  ++counters_.sent;
  if (packet.tunnel) ++counters_.tunnelled;
  if (topo_.is_mobile(from) && !topo_.attachment(from)) {
    drop(packet, DropReason::sender_detached, from);
    return;
  }
  std::vector<Hop> hops;
  try {
    hops = topo_.route(from, access_point);
  } catch (const Unreachable&) {
    drop(packet, DropReason::unreachable, from);
    return;
  }
  const Duration leg = traverse(hops);
  sim_.schedule_in(leg, [this, access_point, mobile, p = std::move(packet)]() mutable {
    if (topo_.attachment(mobile) != access_point) {
      drop(p, DropReason::detached_at_ap, access_point);
      return;
    }
    const Duration radio = traverse({topo_.node(access_point).radio});
    sim_.schedule_in(radio, [this, access_point, mobile, q = std::move(p)]() mutable {
      if (topo_.attachment(mobile) != access_point) {
        drop(q, DropReason::detached_at_ap, access_point);
        return;
      }
      deliver(mobile, std::move(q));
    });
  });
}

void Network::move_mobile(NodeId mobile, NodeId access_point, Duration l2_delay, std::function<void()> on_l2_up) {
  if (!topo_.is_mobile(mobile)) throw UnknownNode(topo_.node(mobile).name + " (not mobile)");
  if (topo_.node(access_point).kind != NodeKind::access_point) throw UnknownNode(topo_.node(access_point).name + " (not an access point)");
  topo_.detach(mobile);
  auto reattach = [this, mobile, access_point, cb = std::move(on_l2_up)] {
    topo_.attach(mobile, access_point);
    if (cb) cb();
  };
  if (l2_delay <= Duration::zero())
    reattach();
  else
    sim_.schedule_in(l2_delay, std::move(reattach));
}

}  // namespace mobsim::sim
