#include "mobsim/scenario/world.hpp"

#include <stdexcept>

namespace mobsim::scenario {

using mobility::MobileNode;
using sim::NodeKind;

std::uint64_t trial_seed(std::uint64_t scenario_seed, std::size_t index) {
  return sim::Rng::mix(scenario_seed ^ sim::Rng::mix(0x7121'0000ULL + index));
}

World::World(const Scenario& s, std::uint64_t seed) : s_(s), seed_(seed) {
  build_topology();
  net_ = std::make_unique<sim::Network>(sim_, topo_, sim::Rng::mix(seed_ ^ 0x11));
  plan_ = std::make_unique<mobility::AddressPlan>(topo_);
  for (const auto& m : s_.mobiles) plan_->set_home_agent(node(m.name), node(m.home_agent));
  mcast_ = std::make_unique<multicast::MulticastRouting>(*net_, s_.cfg.membership_delay, s_.cfg.tree_convergence);
  ctx_ = std::make_unique<mobility::Context>(sim_, *net_, topo_, *plan_, *mcast_, s_.cfg, sim::Rng::mix(seed_ ^ 0x22));
  build_agents();
  build_traffic();
  sim::Rng rng(sim::Rng::mix(seed_ ^ 0x33));
  schedule_moves(rng);
}

World::~World() = default;

void World::build_topology() {
  for (const auto& n : s_.nodes) topo_.add_node(n.name, n.kind);
  for (const auto& m : s_.mobiles) topo_.add_node(m.name, NodeKind::mobile_node);
  for (const auto& n : s_.nodes) {
    auto& node = topo_.node(topo_.require(n.name));
    node.radio = {n.radio, n.radio_epsilon};
    if (n.map) node.map_domain = topo_.require(*n.map);
    if (n.home) node.home_of = topo_.require(*n.home);
  }
  for (const auto& l : s_.links) topo_.add_link(topo_.require(l.a), topo_.require(l.b), l.latency, l.epsilon);
  topo_.finalize();
}

void World::build_agents() {
  for (const auto& n : s_.nodes) {
    const NodeId id = node(n.name);
    sim::PacketSink* sink = nullptr;
    switch (n.kind) {
      case NodeKind::home_agent:
        sink = home_agents_.emplace_back(std::make_unique<mobility::HomeAgent>(*ctx_, id)).get();
        break;
      case NodeKind::map:
        sink = maps_.emplace_back(std::make_unique<mobility::MapAgent>(*ctx_, id)).get();
        break;
      case NodeKind::correspondent_node: {
        auto* cn = correspondents_.emplace_back(std::make_unique<mobility::Correspondent>(*ctx_, id)).get();
        cn->set_handler([this, id](const proto::Packet& p, const Ipv6Addr& who) { on_correspondent_data(id, p, who); });
        sink = cn;
        break;
      }
      case NodeKind::access_point:
        sink = access_routers_.emplace_back(std::make_unique<mobility::AccessRouter>(*ctx_, id)).get();
        break;
      default:
        break;  // transit routers never terminate packets
    }
    if (sink) net_->bind(id, sink);
  }
  std::size_t index = 0;
  for (const auto& m : s_.mobiles) {
    const NodeId id = node(m.name);
    auto* mn = mobiles_
                   .emplace_back(std::make_unique<MobileNode>(
                       *ctx_, id, sim::Rng(sim::Rng::mix(seed_ ^ sim::Rng::mix(0x4400 + index++)))))
                   .get();
    for (const auto& c : m.correspondents) mn->add_correspondent(node(c));
    mn->set_receiver([this, id](const proto::Packet& p, const Ipv6Addr& who) { on_mobile_data(id, p, who); });
    net_->bind(id, mn);
  }
}

void World::build_traffic() {
  std::uint32_t next_flow = 1;
  for (const auto& p : s_.probes) {
    metrics::ProbeConfig cfg;
    cfg.interval = p.interval;
    cfg.payload_size = p.size;
    cfg.start = p.start;
    cfg.stop = p.stop.value_or(s_.duration);
    cfg.reflect = p.reflect;
    cfg.validate();
    probes_.push_back(ProbeFlow{next_flow++, node(p.mobile), node(p.correspondent), cfg,
                                metrics::FlowRecorder(p.interval), metrics::FlowRecorder(p.interval)});
  }
  for (const auto& g : s_.groups) {
    GroupFlow f;
    f.flow = next_flow++;
    f.group = Ipv6Addr::parse(g.address, proto::AddressRole::multicast_group);
    f.source = node(g.source);
    f.interval = g.interval;
    f.size = g.size;
    f.start = g.start;
    f.stop = g.stop.value_or(s_.duration);
    groups_.push_back(std::move(f));
  }
  for (const auto& l : s_.listens) {
    const auto g = Ipv6Addr::parse(l.group, proto::AddressRole::multicast_group);
    for (auto& f : groups_)
      if (f.group == g) f.listeners.emplace(node(l.node), Listener{metrics::FlowRecorder(f.interval), {}});
  }

  // Roles must be known before bootstrap pre-establishes memberships.
  const SimTime t0 = sim_.now();
  for (const auto& f : groups_) {
    if (auto* mn = ctx_->mobile(f.source))
      mn->add_source_group(f.group);
    else
      mcast_->install_tree(f.source, f.group, t0);
    for (const auto& [who, _] : f.listeners) {
      if (auto* mn = ctx_->mobile(who))
        mn->listen(f.group);
      else
        mcast_->add_member(f.group, who, t0);
    }
  }
  for (const auto& m : s_.mobiles) ctx_->mobile(node(m.name))->bootstrap(node(m.start));

  for (std::size_t i = 0; i < probes_.size(); ++i)
    if (probes_[i].cfg.start < probes_[i].cfg.stop) sim_.schedule(probes_[i].cfg.start, [this, i] { probe_tick(i); });
  for (std::size_t i = 0; i < groups_.size(); ++i)
    if (groups_[i].start < groups_[i].stop) sim_.schedule(groups_[i].start, [this, i] { group_tick(i); });
}

void World::schedule_moves(sim::Rng& rng) {
  for (const auto& mv : s_.moves) {
    const Duration l2 = mv.l2 ? *mv.l2 : rng.duration(s_.l2_min, s_.l2_max);
    l2_delays_.push_back(l2);
    MobileNode* mn = ctx_->mobile(node(mv.mobile));
    const NodeId ap = node(mv.to);
    sim_.schedule(mv.at, [mn, ap, l2] { mn->move_to(ap, l2); });
  }
}

void World::probe_tick(std::size_t index) {
  auto& f = probes_[index];
  const SimTime now = sim_.now();
  proto::Packet p;
  p.flow = f.flow;
  p.seq = (now - f.cfg.start) / f.cfg.interval;
  p.sent_at = now;
  p.payload = proto::make_payload(p.seq, now, f.cfg.payload_size);
  f.forward.on_sent(p.seq, now);
  ctx_->mobile(f.mobile)->send_unicast(f.correspondent, std::move(p));
  const SimTime next = now + f.cfg.interval;
  if (next < f.cfg.stop) sim_.schedule(next, [this, index] { probe_tick(index); });
}

void World::group_tick(std::size_t index) {
  auto& f = groups_[index];
  const SimTime now = sim_.now();
  proto::Packet p;
  p.flow = f.flow;
  p.dst = f.group;
  p.seq = f.sent++;
  p.sent_at = now;
  p.payload = proto::make_payload(p.seq, now, f.size);
  for (auto& [who, l] : f.listeners) l.rec.on_sent(p.seq, now);
  if (auto* mn = ctx_->mobile(f.source)) {
    p.hao = mn->home_address();
    mn->send_group(std::move(p));
  } else {
    ctx_->correspondent(f.source)->send_group(std::move(p));
  }
  const SimTime next = now + f.interval;
  if (next < f.stop) sim_.schedule(next, [this, index] { group_tick(index); });
}

void World::on_group_packet(NodeId listener, const proto::Packet& p, const Ipv6Addr& identity) {
  for (auto& f : groups_) {
    if (f.flow != p.flow) continue;
    auto it = f.listeners.find(listener);
    if (it == f.listeners.end()) return;
    it->second.rec.on_received(p.seq, p.sent_at, sim_.now());
    it->second.identities.insert(identity);
    return;
  }
}

void World::on_mobile_data(NodeId mobile, const proto::Packet& p, const Ipv6Addr& identity) {
  if (p.dst.is_multicast()) {
    on_group_packet(mobile, p, identity);
    return;
  }
  for (auto& f : probes_)
    if (f.flow == p.flow && f.mobile == mobile && p.echo) f.echo.on_echo(p.seq, p.sent_at, sim_.now());
}

void World::on_correspondent_data(NodeId cn, const proto::Packet& p, const Ipv6Addr& identity) {
  if (p.dst.is_multicast()) {
    on_group_packet(cn, p, identity);
    return;
  }
  for (auto& f : probes_) {
    if (f.flow != p.flow || f.correspondent != cn || p.echo) continue;
    f.forward.on_received(p.seq, p.sent_at, sim_.now());
    if (!f.cfg.reflect) return;
    proto::Packet e = p;
    e.echo = true;
    e.hao.reset();
    e.via.reset();
    ctx_->correspondent(cn)->send_to(identity, std::move(e));
    return;
  }
}

void World::run() { run_until(s_.duration); }

void World::run_until(SimTime t) { sim_.run_until(t); }

MobileNode& World::mobile(std::string_view name) {
  auto* m = ctx_->mobile(node(name));
  if (!m) throw std::invalid_argument("'" + std::string(name) + "' is not a mobile");
  return *m;
}

mobility::HomeAgent& World::home_agent(std::string_view name) {
  auto* a = ctx_->home_agent(node(name));
  if (!a) throw std::invalid_argument("'" + std::string(name) + "' is not a home agent");
  return *a;
}

mobility::MapAgent& World::map(std::string_view name) {
  auto* a = ctx_->map(node(name));
  if (!a) throw std::invalid_argument("'" + std::string(name) + "' is not a MAP");
  return *a;
}

mobility::Correspondent& World::correspondent(std::string_view name) {
  auto* a = ctx_->correspondent(node(name));
  if (!a) throw std::invalid_argument("'" + std::string(name) + "' is not a correspondent");
  return *a;
}

std::vector<MobileNode*> World::mobiles() {
  std::vector<MobileNode*> out;
  for (auto& m : mobiles_) out.push_back(m.get());
  return out;
}

const World::GroupFlow* World::group(const Ipv6Addr& g) const {
  for (const auto& f : groups_)
    if (f.group == g) return &f;
  return nullptr;
}

const metrics::FlowRecorder* World::primary_flow(NodeId mobile) const {
  for (const auto& f : probes_)
    if (f.mobile == mobile) return &f.forward;
  for (const auto& f : groups_)
    if (auto it = f.listeners.find(mobile); it != f.listeners.end()) return &it->second.rec;
  for (const auto& f : groups_)
    if (f.source == mobile && !f.listeners.empty()) return &f.listeners.begin()->second.rec;
  return nullptr;
}

const metrics::FlowRecorder* World::echo_flow(NodeId mobile) const {
  for (const auto& f : probes_)
    if (f.mobile == mobile) return f.cfg.reflect ? &f.echo : nullptr;
  return nullptr;
}

}  // namespace mobsim::scenario
