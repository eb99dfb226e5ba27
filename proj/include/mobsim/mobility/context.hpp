#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "mobsim/mobility/address_plan.hpp"
#include "mobsim/mobility/config.hpp"
#include "mobsim/mobility/detection.hpp"
#include "mobsim/multicast/routing.hpp"
#include "mobsim/sim/network.hpp"

namespace mobsim::mobility {

class MobileNode;
class HomeAgent;
class MapAgent;
class Correspondent;
class AccessRouter;

/// Signalling message as seen by a fixed entity; kept for audits such as
/// "an intra-domain move reaches neither HA nor CN".
struct SignalRecord {
  SimTime at;
  NodeId node;
  proto::MessageType type;
};

/// Shared state for every protocol entity in one simulation run.
class Context {
 public:
  Context(sim::Simulator& sim, sim::Network& net, sim::Topology& topo, AddressPlan& plan,
          multicast::MulticastRouting& mcast, MobilityConfig cfg, std::uint64_t seed);

  sim::Simulator& sim;
  sim::Network& net;
  sim::Topology& topo;
  AddressPlan& plan;
  multicast::MulticastRouting& mcast;
  MobilityConfig cfg;

  SimTime now() const { return sim.now(); }

  /// Sends a packet from a fixed node towards its routing destination.
  void forward(NodeId from, proto::Packet packet);
  /// Node that owns the routing destination, for first-hop decisions.
  std::optional<NodeId> owner_of(const Ipv6Addr& addr) const;

  RouterAdvertiser& advertiser(NodeId access_point);

  // Registries indexed by node; null where the node has another role.
  void register_mobile(NodeId id, MobileNode* mn) { slot(mobiles_, id) = mn; }
  void register_home_agent(NodeId id, HomeAgent* a) { slot(home_agents_, id) = a; }
  void register_map(NodeId id, MapAgent* a) { slot(maps_, id) = a; }
  void register_correspondent(NodeId id, Correspondent* a) { slot(correspondents_, id) = a; }
  void register_access_router(NodeId id, AccessRouter* a) { slot(access_routers_, id) = a; }
  MobileNode* mobile(NodeId id) const { return get(mobiles_, id); }
  HomeAgent* home_agent(NodeId id) const { return get(home_agents_, id); }
  MapAgent* map(NodeId id) const { return get(maps_, id); }
  Correspondent* correspondent(NodeId id) const { return get(correspondents_, id); }
  AccessRouter* access_router(NodeId id) const { return get(access_routers_, id); }

  void log_signal(NodeId node, proto::MessageType type) { signals_.push_back({now(), node, type}); }
  const std::vector<SignalRecord>& signals() const { return signals_; }

  /// Fixed entities report binding changes so handover reports can carry
  /// the instant a peer actually switched.
  void notify_cn_binding(NodeId cn, const Ipv6Addr& home, const Ipv6Addr& coa);
  void notify_release(NodeId anchor, const Ipv6Addr& key);

  std::uint64_t cn_rejected = 0;

 private:
  std::vector<std::unique_ptr<RouterAdvertiser>> advertisers_;
  template <class T>
  T*& slot(std::vector<T*>& v, NodeId id) {
    if (v.size() <= sim::index_of(id)) v.resize(sim::index_of(id) + 1, nullptr);
    return v[sim::index_of(id)];
  }
  template <class T>
  static T* get(const std::vector<T*>& v, NodeId id) {
    return sim::index_of(id) < v.size() ? v[sim::index_of(id)] : nullptr;
  }

  std::vector<MobileNode*> mobiles_;
  std::vector<HomeAgent*> home_agents_;
  std::vector<MapAgent*> maps_;
  std::vector<Correspondent*> correspondents_;
  std::vector<AccessRouter*> access_routers_;
  std::vector<SignalRecord> signals_;
  std::uint64_t seed_;
};

}  // namespace mobsim::mobility
