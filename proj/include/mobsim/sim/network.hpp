#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mobsim/proto/packet.hpp"
#include "mobsim/sim/rng.hpp"
#include "mobsim/sim/simulator.hpp"
#include "mobsim/sim/topology.hpp"

namespace mobsim::sim {

class PacketSink {
 public:
  virtual ~PacketSink() = default;
  virtual void receive(const proto::Packet& packet) = 0;
};

enum class DropReason {
  sender_detached,   // mobile sender had no attachment
  detached_at_ap,    // destination mobile not on this access point on arrival
  unreachable,       // no route
  no_handler,        // nothing bound at the destination node
  policy,            // a protocol entity refused the packet
};

/// Moves packets between nodes with link latency plus per-hop jitter.
///
/// Packets to a mobile are addressed to a specific access point; if the
/// mobile is not attached there when the packet arrives (at the access point
/// or at the end of the radio hop) the packet is dropped.
class Network {
 public:
  using DropHook = std::function<void(const proto::Packet&, DropReason, NodeId where)>;

  Network(Simulator& sim, Topology& topo, std::uint64_t jitter_seed);

  void bind(NodeId node, PacketSink* sink);

  void send(NodeId from, NodeId to, proto::Packet packet);
  void send_to_mobile(NodeId from, NodeId access_point, NodeId mobile, proto::Packet packet);

  /// Mobility: detach now, reattach to `access_point` after `l2_delay`;
  /// `on_l2_up` runs at reattachment.
  void move_mobile(NodeId mobile, NodeId access_point, Duration l2_delay, std::function<void()> on_l2_up);

  void set_drop_hook(DropHook hook) { drop_hook_ = std::move(hook); }
  /// Records a packet a protocol entity refused or could not place.
  void discard(const proto::Packet& packet, DropReason reason, NodeId where) { drop(packet, reason, where); }

  struct Counters {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t tunnelled = 0;
  };
  const Counters& counters() const { return counters_; }

  Simulator& simulator() { return sim_; }
  Topology& topology() { return topo_; }
  const Topology& topology() const { return topo_; }

 private:
  Duration traverse(const std::vector<Hop>& hops);
  void deliver(NodeId to, proto::Packet packet);
  void drop(const proto::Packet& packet, DropReason reason, NodeId where);

  Simulator& sim_;
  Topology& topo_;
  Rng rng_;
  std::vector<PacketSink*> sinks_;
  DropHook drop_hook_;
  Counters counters_;
};

}  // namespace mobsim::sim
