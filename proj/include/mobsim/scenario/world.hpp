#pragma once

#include <map>
#include <memory>
#include <set>
#include <string_view>
#include <vector>

#include "mobsim/metrics/flow_stats.hpp"
#include "mobsim/mobility/agents.hpp"
#include "mobsim/mobility/mobile_node.hpp"
#include "mobsim/scenario/scenario.hpp"

namespace mobsim::scenario {

using proto::Ipv6Addr;
using sim::NodeId;

/// One fully wired simulation run of a scenario: topology, protocol
/// entities and traffic sources, all seeded from `trial_seed`.
class World {
 public:
  struct ProbeFlow {
    std::uint32_t flow = 0;
    NodeId mobile{};
    NodeId correspondent{};
    metrics::ProbeConfig cfg;
    metrics::FlowRecorder forward;  // receptions at the correspondent
    metrics::FlowRecorder echo;     // reflections back at the mobile
  };
  struct Listener {
    metrics::FlowRecorder rec;
    std::set<Ipv6Addr> identities;
  };
  struct GroupFlow {
    std::uint32_t flow = 0;
    Ipv6Addr group;
    NodeId source{};
    Duration interval{};
    std::size_t size = 0;
    SimTime start{};
    SimTime stop{};
    std::map<NodeId, Listener> listeners;
    std::uint64_t sent = 0;
  };

  World(const Scenario& s, std::uint64_t trial_seed);
  ~World();
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  /// Runs to the scenario duration.
  void run();
  /// Runs to `t` (for step-wise inspection in tests).
  void run_until(SimTime t);

  const Scenario& scenario() const { return s_; }
  sim::Simulator& simulator() { return sim_; }
  sim::Topology& topology() { return topo_; }
  sim::Network& network() { return *net_; }
  mobility::AddressPlan& plan() { return *plan_; }
  multicast::MulticastRouting& multicast() { return *mcast_; }
  mobility::Context& context() { return *ctx_; }

  NodeId node(std::string_view name) const { return topo_.require(name); }
  mobility::MobileNode& mobile(std::string_view name);
  mobility::HomeAgent& home_agent(std::string_view name);
  mobility::MapAgent& map(std::string_view name);
  mobility::Correspondent& correspondent(std::string_view name);
  /// Mobiles in declaration order.
  std::vector<mobility::MobileNode*> mobiles();
  /// L2 delay applied to each scripted move, in script order.
  const std::vector<Duration>& l2_delays() const { return l2_delays_; }

  const std::vector<ProbeFlow>& probes() const { return probes_; }
  const std::vector<GroupFlow>& groups() const { return groups_; }
  const GroupFlow* group(const Ipv6Addr& g) const;

  /// The flow a mobile's handover rows are scored on: its probe if any,
  /// else a group it listens to, else the first listener of a group it sends.
  const metrics::FlowRecorder* primary_flow(NodeId mobile) const;
  /// Echo recorder for RTT, when the primary flow is a reflected probe.
  const metrics::FlowRecorder* echo_flow(NodeId mobile) const;

 private:
  void build_topology();
  void build_agents();
  void build_traffic();
  void schedule_moves(sim::Rng& rng);
  void probe_tick(std::size_t index);
  void group_tick(std::size_t index);
  void on_mobile_data(NodeId mobile, const proto::Packet& p, const Ipv6Addr& identity);
  void on_correspondent_data(NodeId cn, const proto::Packet& p, const Ipv6Addr& identity);
  void on_group_packet(NodeId listener, const proto::Packet& p, const Ipv6Addr& identity);

  Scenario s_;
  std::uint64_t seed_;
  sim::Simulator sim_;
  sim::Topology topo_;
  std::unique_ptr<sim::Network> net_;
  std::unique_ptr<mobility::AddressPlan> plan_;
  std::unique_ptr<multicast::MulticastRouting> mcast_;
  std::unique_ptr<mobility::Context> ctx_;

  std::vector<std::unique_ptr<mobility::HomeAgent>> home_agents_;
  std::vector<std::unique_ptr<mobility::MapAgent>> maps_;
  std::vector<std::unique_ptr<mobility::Correspondent>> correspondents_;
  std::vector<std::unique_ptr<mobility::AccessRouter>> access_routers_;
  std::vector<std::unique_ptr<mobility::MobileNode>> mobiles_;

  std::vector<ProbeFlow> probes_;
  std::vector<GroupFlow> groups_;
  std::vector<Duration> l2_delays_;
};

/// Seed of trial `index` derived from the scenario seed; independent of the
/// order in which trials execute.
std::uint64_t trial_seed(std::uint64_t scenario_seed, std::size_t index);

}  // namespace mobsim::scenario
