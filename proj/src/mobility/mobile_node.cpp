#include "mobsim/mobility/mobile_node.hpp"

#include <algorithm>
#include <stdexcept>

#include "mobsim/mobility/agents.hpp"

namespace mobsim::mobility {

using proto::MessageType;

namespace {

void cancel(sim::Simulator& sim, sim::EventId& id) {
  if (id != kNoEvent) sim.cancel(id);
  id = kNoEvent;
}

proto::Message binding_update(const Ipv6Addr& key, const Ipv6Addr& coa, Duration lifetime, std::uint32_t seq) {
  proto::Message m;
  m.type = MessageType::binding_update;
  m.binding_key = key;
  m.care_of = coa;
  m.lifetime = lifetime;
  m.sequence = seq;
  return m;
}

}  // namespace

MobileNode::MobileNode(Context& ctx, NodeId self, sim::Rng rng)
    : ctx_(ctx),
      self_(self),
      rng_(std::move(rng)),
      hoa_(ctx.plan.home_address(self)),
      ha_(ctx.plan.home_agent_of(self)),
      ha_coa_(hoa_) {
  ctx_.register_mobile(self_, this);
}

void MobileNode::add_correspondent(NodeId cn) {
  if (std::find(cns_.begin(), cns_.end(), cn) == cns_.end()) cns_.push_back(cn);
}

void MobileNode::listen(const Ipv6Addr& group) { listen_groups_.insert(group); }
void MobileNode::add_source_group(const Ipv6Addr& group) { source_groups_.insert(group); }

std::vector<Anchor> MobileNode::source_paths() const {
  std::vector<Anchor> out;
  for (const auto& p : source_paths_) out.push_back(p.anchor);
  return out;
}

HandoverReport* MobileNode::report() { return active_ ? &reports_[*active_] : nullptr; }

// ------------------------------------------------------------------ bootstrap

void MobileNode::bootstrap(NodeId ap) {
  const SimTime t0 = ctx_.now();
  const auto& cfg = ctx_.cfg;
  const auto& node = ctx_.topo.node(ap);
  HomeAgent* ha = ctx_.home_agent(ha_);
  if (!ha) throw std::logic_error("home agent of '" + ctx_.topo.node(self_).name + "' is not running");
  ctx_.topo.attach(self_, ap);
  ap_ = ap;

  auto via_home_agent = [&](const Ipv6Addr& g) {
    ha->add_home_listener(hoa_, g);
    ctx_.mcast.add_member(g, ha_, t0);
  };
  auto via_access_router = [&](const Ipv6Addr& g) {
    if (auto* ar = ctx_.access_router(ap)) ar->add_listener(g, self_);
    ctx_.mcast.add_member(g, ap, t0);
  };
  auto root_at = [&](const SourcePath& path) {
    source_paths_ = {path};
    for (const auto& g : source_groups_) ctx_.mcast.install_tree(path.anchor.node, g, t0);
  };

  if (node.home_of == ha_) {
    at_home_ = true;
    lcoa_.reset();
    ha_coa_ = hoa_;
    for (const auto& g : listen_groups_) {
      if (cfg.multicast_mode == MulticastMode::remote_subscription)
        via_access_router(g);
      else
        via_home_agent(g);
    }
    if (!source_groups_.empty()) {
      if (cfg.multicast_mode == MulticastMode::remote_subscription)
        root_at({Anchor{ap, hoa_}, false, false, true});
      else
        root_at({Anchor{ha_, hoa_, true}});
    }
    return;
  }

  at_home_ = false;
  lcoa_ = ctx_.plan.on_link_coa(self_, ap);
  Ipv6Addr coa = *lcoa_;
  const bool hier = cfg.variant != Variant::mipv6 && node.map_domain;
  MapAgent* map = nullptr;
  if (hier) {
    Anchor m{*node.map_domain, ctx_.plan.regional_coa(self_, *node.map_domain)};
    map = ctx_.map(m.node);
    if (!map) throw std::logic_error("MAP '" + ctx_.topo.node(m.node).name + "' is not running");
    map->cache().update(m.key, *lcoa_, cfg.binding_lifetime, t0);
    current_ = established_ = out_ = m;
    coa = m.key;
  }
  ha->cache().update(hoa_, coa, cfg.binding_lifetime, t0);
  ha_coa_ = coa;
  if (cfg.route_optimization) {
    for (NodeId cn : cns_) {
      if (auto* c = ctx_.correspondent(cn)) c->cache().update(hoa_, coa, cfg.binding_lifetime, t0);
      cn_coa_[cn] = coa;
    }
  }
  for (const auto& g : listen_groups_) {
    if (cfg.multicast_mode == MulticastMode::remote_subscription) {
      via_access_router(g);
    } else if (cfg.multicast_mode == MulticastMode::m_hmipv6 && map) {
      map->subscribe(current_->key, g);
      ctx_.mcast.add_member(g, current_->node, t0);
    } else {
      via_home_agent(g);
    }
  }
  if (!source_groups_.empty()) {
    if (cfg.multicast_mode == MulticastMode::remote_subscription)
      root_at({Anchor{ap, *lcoa_}, false, false, true});
    else if (cfg.multicast_mode == MulticastMode::m_hmipv6 && map)
      root_at({*current_});
    else
      root_at({Anchor{ha_, hoa_, true}});
  }
}

// ------------------------------------------------------------------- movement

void MobileNode::move_to(NodeId ap, Duration l2_delay) {
  if (auto* r = report(); r && !r->restored) r->superseded = true;
  HandoverReport rep;
  rep.index = reports_.size();
  rep.mobile = self_;
  rep.from_ap = ap_;
  rep.to_ap = ap;
  rep.detach_at = ctx_.now();
  reports_.push_back(rep);
  active_ = rep.index;

  abort_procedures();
  ++epoch_;
  ap_.reset();
  lcoa_.reset();
  ctx_.net.move_mobile(self_, ap, l2_delay, guarded([this, ap] { on_l2_up(ap); }));
}

void MobileNode::abort_procedures() {
  for (auto& [seq, t] : txns_) cancel(ctx_.sim, t.timer);
  txns_.clear();
  for (auto& [cn, r] : rr_) cancel(ctx_.sim, r.timer);
  rr_.clear();
  on_rr_done_ = {};
  on_cns_bound_ = {};
  cn_expected_.clear();
  cancel(ctx_.sim, release_timer_);
  unicast_via_new_ = false;
  group_via_new_ = false;
}

void MobileNode::on_l2_up(NodeId ap) {
  ap_ = ap;
  auto* r = report();
  r->l2_up = ctx_.now();
  const Duration t_local = detect_and_readdress(ctx_.now(), ctx_.cfg.detection, ctx_.cfg.readdress,
                                                ctx_.advertiser(ap), rng_);
  r->t_local = t_local;
  ctx_.sim.schedule_in(t_local, guarded([this, ap] { on_lcoa_ready(ap); }));
}

void MobileNode::on_lcoa_ready(NodeId ap) {
  auto* r = report();
  r->lcoa_ready = ctx_.now();
  const auto& cfg = ctx_.cfg;
  const auto& node = ctx_.topo.node(ap);
  if (node.home_of == ha_) {
    handover_home();
    return;
  }
  const bool was_home = at_home_;
  at_home_ = false;
  lcoa_ = ctx_.plan.on_link_coa(self_, ap);

  if (cfg.multicast_mode == MulticastMode::remote_subscription) {
    for (const auto& g : listen_groups_) {
      Packet p;
      p.src = *lcoa_;
      p.dst = ctx_.plan.node_address(ap);
      p.msg.type = MessageType::listener_report;
      p.msg.group = g;
      proto::seal(p);
      emit(std::move(p));
    }
  }

  const bool hier = cfg.variant != Variant::mipv6 && node.map_domain;
  if (!hier) {
    handover_mipv6();
  } else {
    Anchor m{*node.map_domain, ctx_.plan.regional_coa(self_, *node.map_domain)};
    if (!was_home && established_ && established_->node == m.node)
      handover_intra(m);
    else
      handover_inter(m, cfg.variant == Variant::hmipv6_shuffling);
  }
  source_handover(ap);
}

void MobileNode::mark_restored(bool fallback) {
  auto* r = report();
  if (!r || r->restored) return;
  r->restored = ctx_.now();
  r->fallback = fallback;
}

// ------------------------------------------------------------ handover kinds

void MobileNode::handover_mipv6() {
  auto* r = report();
  r->kind = HandoverKind::mipv6;
  if (previous_ && !anchor_needed(previous_->node)) {
    Anchor p = *previous_;
    previous_.reset();
    if (!anchor_needed(p.node)) release_anchor(p);
  }
  previous_.reset();
  current_.reset();
  established_.reset();
  out_.reset();
  switched_ = false;
  const Ipv6Addr coa = *lcoa_;
  bu_home(coa, guarded([this, coa] {
    report()->home_ack = ctx_.now();
    after_home_registration(coa, false);
  }));
}

void MobileNode::handover_home() {
  auto* r = report();
  r->kind = HandoverKind::returning_home;
  at_home_ = true;
  lcoa_.reset();
  if (previous_) {
    Anchor p = *previous_;
    previous_.reset();
    release_anchor(p);
  }
  current_.reset();
  established_.reset();
  out_.reset();
  switched_ = false;
  ha_coa_ = hoa_;

  const Ipv6Addr ha_addr = ctx_.plan.node_address(ha_);
  transact(
      [this, ha_addr](std::uint32_t seq) {
        Packet p;
        p.src = hoa_;
        p.dst = ha_addr;
        p.msg = binding_update(hoa_, hoa_, Duration::zero(), seq);
        p.msg.home_registration = true;
        p.msg.ack_requested = true;
        proto::seal(p);
        emit(std::move(p));
      },
      guarded([this] {
        report()->home_ack = ctx_.now();
        mark_restored();
      }));
  for (auto it = cn_coa_.begin(); it != cn_coa_.end(); it = cn_coa_.erase(it)) {
    Packet p;
    p.src = hoa_;
    p.dst = ctx_.plan.node_address(it->first);
    p.hao = hoa_;
    p.msg = binding_update(hoa_, hoa_, Duration::zero(), ++msg_seq_);
    proto::seal(p);
    emit(std::move(p));
  }
  if (ctx_.cfg.multicast_mode != MulticastMode::remote_subscription) {
    if (auto* ha = ctx_.home_agent(ha_))
      for (const auto& g : listen_groups_) ha->add_home_listener(hoa_, g);
  } else {
    for (const auto& g : listen_groups_) {
      Packet p;
      p.src = hoa_;
      p.dst = ctx_.plan.node_address(*ap_);
      p.msg.type = MessageType::listener_report;
      p.msg.group = g;
      proto::seal(p);
      emit(std::move(p));
    }
  }
  if (!source_groups_.empty() && ctx_.cfg.multicast_mode != MulticastMode::bidirectional_tunnel) {
    cancel(ctx_.sim, bicast_timer_);
    cancel(ctx_.sim, probe_timer_);
    bicast_active_ = false;
    for (const auto& path : source_paths_)
      for (const auto& g : source_groups_) ctx_.mcast.release_tree(path.anchor.node, g);
    SourcePath home{Anchor{ha_, hoa_, true}};
    if (ctx_.cfg.multicast_mode == MulticastMode::remote_subscription) home = {Anchor{*ap_, hoa_}, false, false, true};
    source_paths_ = {home};
    r->tree_requested = ctx_.now();
    for (const auto& g : source_groups_) r->tree_ready = ctx_.mcast.request_tree(home.anchor.node, g);
  }
}

void MobileNode::handover_intra(const Anchor& map) {
  auto* r = report();
  r->kind = HandoverKind::intra_domain;
  r->new_map = map.node;
  if (previous_ && previous_->node == map.node) previous_.reset();
  current_ = established_ = out_ = map;
  switched_ = true;
  bu_map(map, guarded([this] {
    report()->map_ack = ctx_.now();
    mark_restored();
  }));
  // An older anchor still carrying our traffic must follow the new address.
  if (previous_ && !previous_->home) bu_map(*previous_, {});
}

void MobileNode::handover_inter(const Anchor& map, bool shuffle) {
  auto* r = report();
  r->kind = shuffle ? HandoverKind::shuffling : HandoverKind::inter_domain;
  r->new_map = map.node;

  std::optional<Anchor> retained;
  if (shuffle) retained = established_ ? *established_ : Anchor{ha_, hoa_, true};
  if (previous_ && (!retained || !(*previous_ == *retained))) {
    Anchor stale = *previous_;
    previous_.reset();
    if (!anchor_needed(stale.node)) release_anchor(stale);
  }
  previous_ = retained;
  current_ = map;
  switched_ = false;
  out_ = (retained && !retained->home) ? retained : (shuffle ? std::nullopt : std::optional<Anchor>{map});

  if (retained) {
    r->previous_anchor = retained->node;
    auto acked = guarded([this] {
      report()->previous_ack = ctx_.now();
      mark_restored();
    });
    if (retained->home)
      bu_home(*lcoa_, std::move(acked));
    else
      bu_map(*retained, std::move(acked));
  }
  bu_map(map, guarded([this, map, shuffle] {
    report()->map_ack = ctx_.now();
    bu_home(map.key, guarded([this, map, shuffle] {
      report()->home_ack = ctx_.now();
      after_home_registration(map.key, shuffle);
    }));
  }));
  send_listener_reports(map);
}

void MobileNode::after_home_registration(const Ipv6Addr& coa, bool shuffle) {
  const bool need_cn = ctx_.cfg.route_optimization && !cns_.empty();
  if (!need_cn) {
    report()->rr_done = ctx_.now();
    switch_outbound();
    mark_restored(shuffle);
    return;
  }
  on_cns_bound_ = guarded([this, shuffle] {
    report()->cn_bound = ctx_.now();
    mark_restored(shuffle);
  });
  start_rr(coa, guarded([this] {
    report()->rr_done = ctx_.now();
    switch_outbound();
  }));
}

void MobileNode::switch_outbound() {
  established_ = current_;
  out_ = current_;
  switched_ = true;
  if (!previous_) return;
  if (previous_->home) {
    // The home registration already moved the HA to the new anchor.
    previous_.reset();
    return;
  }
  const bool waits_for_group = ctx_.cfg.multicast_mode == MulticastMode::m_hmipv6 && !listen_groups_.empty();
  if (!waits_for_group) {
    release_timer_ = ctx_.sim.schedule_in(ctx_.cfg.dual_entry_lifetime, guarded([this] {
      release_timer_ = kNoEvent;
      if (!previous_) return;
      Anchor p = *previous_;
      previous_.reset();
      if (!anchor_needed(p.node)) release_anchor(p);
    }));
  }
  maybe_release_previous();
}

void MobileNode::maybe_release_previous() {
  if (!previous_ || !switched_) return;
  const bool unicast_ok = !ctx_.cfg.route_optimization || cns_.empty() || unicast_via_new_;
  const bool group_ok =
      listen_groups_.empty() || ctx_.cfg.multicast_mode != MulticastMode::m_hmipv6 || group_via_new_;
  if (!unicast_ok || !group_ok) return;
  Anchor p = *previous_;
  previous_.reset();
  cancel(ctx_.sim, release_timer_);
  if (!anchor_needed(p.node)) release_anchor(p);
}

bool MobileNode::anchor_needed(NodeId node) const {
  if (current_ && current_->node == node) return true;
  if (previous_ && previous_->node == node) return true;
  if (bicast_active_)
    for (const auto& path : source_paths_)
      if (path.retained && path.anchor.node == node) return true;
  return false;
}

void MobileNode::release_anchor(const Anchor& a) {
  if (a.home) return;
  bu_map_zero(a);
}

void MobileNode::on_release(NodeId anchor) {
  for (auto it = reports_.rbegin(); it != reports_.rend(); ++it) {
    if (it->previous_anchor == anchor && !it->previous_released) {
      it->previous_released = ctx_.now();
      return;
    }
  }
}

// ----------------------------------------------------------------- signalling

void MobileNode::transact(std::function<void(std::uint32_t)> send, std::function<void()> on_ack,
                          std::function<void()> on_fail) {
  const std::uint32_t seq = ++msg_seq_;
  Txn& t = txns_[seq];
  t.send = [send = std::move(send), seq] { send(seq); };
  t.on_ack = std::move(on_ack);
  t.on_fail = std::move(on_fail);
  t.timeout = ctx_.cfg.retransmit_initial;
  t.send();
  arm(seq);
}

void MobileNode::arm(std::uint32_t seq) {
  auto it = txns_.find(seq);
  if (it == txns_.end()) return;
  it->second.timer = ctx_.sim.schedule_in(it->second.timeout, [this, seq] { on_txn_timeout(seq); });
}

void MobileNode::on_txn_timeout(std::uint32_t seq) {
  auto it = txns_.find(seq);
  if (it == txns_.end()) return;
  Txn& t = it->second;
  t.timer = kNoEvent;
  if (t.tries >= ctx_.cfg.retransmit_tries) {
    auto fail = std::move(t.on_fail);
    txns_.erase(it);
    if (fail) fail();
    return;
  }
  ++t.tries;
  t.timeout *= 2;
  t.send();
  arm(seq);
}

void MobileNode::on_ack(const Packet& p) {
  auto it = txns_.find(p.msg.sequence);
  if (it == txns_.end()) return;
  cancel(ctx_.sim, it->second.timer);
  auto done = std::move(it->second.on_ack);
  txns_.erase(it);
  if (done) done();
}

void MobileNode::bu_home(const Ipv6Addr& coa, std::function<void()> on_ack, std::function<void()> on_fail) {
  ha_coa_ = coa;
  const Ipv6Addr ha_addr = ctx_.plan.node_address(ha_);
  transact(
      [this, coa, ha_addr](std::uint32_t seq) {
        Packet p;
        p.src = coa;
        p.dst = ha_addr;
        p.hao = hoa_;
        p.msg = binding_update(hoa_, coa, ctx_.cfg.binding_lifetime, seq);
        p.msg.home_registration = true;
        p.msg.ack_requested = true;
        proto::seal(p);
        emit(std::move(p));
      },
      std::move(on_ack), std::move(on_fail));
}

void MobileNode::bu_map(const Anchor& map, std::function<void()> on_ack, std::function<void()> on_fail) {
  const Ipv6Addr lcoa = *lcoa_;
  const Ipv6Addr map_addr = ctx_.plan.node_address(map.node);
  const Ipv6Addr key = map.key;
  transact(
      [this, lcoa, map_addr, key](std::uint32_t seq) {
        Packet p;
        p.src = lcoa;
        p.dst = map_addr;
        p.msg = binding_update(key, lcoa, ctx_.cfg.binding_lifetime, seq);
        p.msg.ack_requested = true;
        proto::seal(p);
        emit(std::move(p));
      },
      std::move(on_ack), std::move(on_fail));
}

void MobileNode::bu_map_zero(const Anchor& map) {
  if (!lcoa_) return;
  Packet p;
  p.src = *lcoa_;
  p.dst = ctx_.plan.node_address(map.node);
  p.msg = binding_update(map.key, *lcoa_, Duration::zero(), ++msg_seq_);
  proto::seal(p);
  emit(std::move(p));
}

void MobileNode::start_rr(const Ipv6Addr& coa, std::function<void()> on_done) {
  on_rr_done_ = std::move(on_done);
  cn_expected_.clear();
  for (NodeId cn : cns_) {
    Rr& r = rr_[cn];
    r = Rr{};
    r.seq = ++msg_seq_;
    r.coa = coa;
    send_rr(cn);
    r.timer = ctx_.sim.schedule_in(ctx_.cfg.rr_retransmit, guarded([this, cn] { on_rr_timeout(cn); }));
  }
}

void MobileNode::send_rr(NodeId cn) {
  const Rr& r = rr_.at(cn);
  const Ipv6Addr cn_addr = ctx_.plan.node_address(cn);
  // Home test init travels through the home agent, care-of test init directly.
  Packet hoti;
  hoti.dst = cn_addr;
  hoti.msg.type = MessageType::home_test_init;
  hoti.msg.binding_key = hoa_;
  hoti.msg.sequence = r.seq;
  emit(reverse_tunnel(std::move(hoti)));

  Packet coti;
  coti.src = r.coa;
  coti.dst = cn_addr;
  coti.msg.type = MessageType::care_of_test_init;
  coti.msg.care_of = r.coa;
  coti.msg.sequence = r.seq;
  proto::seal(coti);
  emit(std::move(coti));
}

void MobileNode::on_rr_timeout(NodeId cn) {
  auto it = rr_.find(cn);
  if (it == rr_.end()) return;
  it->second.timer = kNoEvent;
  if (it->second.tries >= ctx_.cfg.retransmit_tries) {
    rr_.erase(it);  // gave up on this correspondent
    return;
  }
  ++it->second.tries;
  it->second.home_ok = it->second.careof_ok = false;
  send_rr(cn);
  it->second.timer = ctx_.sim.schedule_in(ctx_.cfg.rr_retransmit, guarded([this, cn] { on_rr_timeout(cn); }));
}

void MobileNode::bu_cn(NodeId cn, const Ipv6Addr& coa) {
  cn_coa_[cn] = coa;
  cn_expected_[cn] = coa;
  const Ipv6Addr cn_addr = ctx_.plan.node_address(cn);
  auto send = [this, coa, cn_addr](std::uint32_t seq) {
    Packet p;
    p.src = coa;
    p.dst = cn_addr;
    p.hao = hoa_;
    p.msg = binding_update(hoa_, coa, ctx_.cfg.binding_lifetime, seq);
    p.msg.ack_requested = ctx_.cfg.cn_binding_ack;
    proto::seal(p);
    emit(std::move(p));
  };
  if (ctx_.cfg.cn_binding_ack)
    transact(std::move(send), guarded([this, cn] { cn_done(cn); }));
  else
    send(++msg_seq_);
}

void MobileNode::on_cn_binding(NodeId cn, const Ipv6Addr& coa) {
  if (ctx_.cfg.cn_binding_ack) return;
  auto it = cn_expected_.find(cn);
  if (it != cn_expected_.end() && it->second == coa) cn_done(cn);
}

void MobileNode::cn_done(NodeId cn) {
  cn_expected_.erase(cn);
  if (cn_expected_.empty() && rr_.empty() && on_cns_bound_) {
    auto f = std::move(on_cns_bound_);
    on_cns_bound_ = {};
    f();
  }
}

void MobileNode::send_listener_reports(const Anchor& map) {
  if (ctx_.cfg.multicast_mode != MulticastMode::m_hmipv6) return;
  for (const auto& g : listen_groups_) {
    Packet inner;
    inner.src = map.key;
    inner.dst = ctx_.plan.node_address(map.node);
    inner.msg.type = MessageType::listener_report;
    inner.msg.group = g;
    proto::seal(inner);
    emit(proto::encapsulate(std::move(inner), *lcoa_, ctx_.plan.node_address(map.node)));
  }
}

void MobileNode::mld_join_via_map(const Ipv6Addr& group) {
  if (!group.is_multicast()) throw std::invalid_argument("mld_join_via_map: not a group address");
  listen_groups_.insert(group);
  if (!lcoa_) return;
  if (ctx_.cfg.multicast_mode == MulticastMode::remote_subscription) {
    Packet p;
    p.src = *lcoa_;
    p.dst = ctx_.plan.node_address(*ap_);
    p.msg.type = MessageType::listener_report;
    p.msg.group = group;
    proto::seal(p);
    emit(std::move(p));
    return;
  }
  if (current_ && ctx_.cfg.multicast_mode == MulticastMode::m_hmipv6) {
    Packet inner;
    inner.src = current_->key;
    inner.dst = ctx_.plan.node_address(current_->node);
    inner.msg.type = MessageType::listener_report;
    inner.msg.group = group;
    proto::seal(inner);
    emit(proto::encapsulate(std::move(inner), *lcoa_, ctx_.plan.node_address(current_->node)));
  }
}

// ----------------------------------------------------------------- data plane

Ipv6Addr MobileNode::outbound_coa() const {
  if (out_) return out_->key;
  if (lcoa_) return *lcoa_;
  return hoa_;
}

bool MobileNode::usable_relay(NodeId map) const {
  if (current_ && current_->node == map) return true;
  if (previous_ && previous_->node == map) return true;
  for (const auto& path : source_paths_)
    if (!path.anchor.home && !path.access_router && path.anchor.node == map) return true;
  return false;
}

std::optional<NodeId> MobileNode::relay_for(const Ipv6Addr& src) const {
  if (lcoa_ && src == *lcoa_) return std::nullopt;
  auto t = ctx_.plan.resolve(src);
  if (t && !t->mobile && ctx_.map(t->node)) return t->node;
  return std::nullopt;
}

bool MobileNode::emit(Packet p) {
  if (!ap_ || ctx_.topo.attachment(self_) != ap_) return false;
  if (at_home_) {
    auto owner = ctx_.owner_of(proto::routing_destination(p));
    if (!owner || ctx_.topo.is_mobile(*owner)) return false;
    ctx_.net.send(self_, *owner, std::move(p));
    return true;
  }
  if (!lcoa_) return false;
  const Ipv6Addr src = p.tunnel ? p.tunnel->outer_src : p.src;
  if (auto relay = relay_for(src)) {
    // Regional source: the MAP is the first hop and restores the address.
    if (!usable_relay(*relay)) return false;
    if (!p.tunnel && !p.hao)
      p = proto::encapsulate(std::move(p), *lcoa_, ctx_.plan.node_address(*relay));
    else if (!p.tunnel)
      p.src = *lcoa_;
    ctx_.net.send(self_, *relay, std::move(p));
    return true;
  }
  if (!(src == *lcoa_)) return false;  // stale address; ingress filtering
  auto owner = ctx_.owner_of(proto::routing_destination(p));
  if (!owner || ctx_.topo.is_mobile(*owner)) return false;
  ctx_.net.send(self_, *owner, std::move(p));
  return true;
}

Packet MobileNode::reverse_tunnel(Packet inner) const {
  inner.src = hoa_;
  inner.hao.reset();
  proto::seal(inner);
  return proto::encapsulate(std::move(inner), ha_coa_, ctx_.plan.node_address(ha_));
}

bool MobileNode::send_unicast(NodeId cn, Packet p) {
  if (!ap_ || ctx_.topo.attachment(self_) != ap_) return false;
  p.dst = ctx_.plan.node_address(cn);
  p.rh2.reset();
  p.tunnel.reset();
  if (at_home_) {
    p.src = hoa_;
    p.hao.reset();
    proto::seal(p);
    return emit(std::move(p));
  }
  if (!lcoa_) return false;
  const Ipv6Addr coa = outbound_coa();
  auto it = cn_coa_.find(cn);
  if (ctx_.cfg.route_optimization && it != cn_coa_.end() && it->second == coa) {
    p.src = coa;
    p.hao = hoa_;
    proto::seal(p);
    return emit(std::move(p));
  }
  if (ha_coa_ == hoa_) return false;
  return emit(reverse_tunnel(std::move(p)));
}

void MobileNode::receive(const Packet& in) {
  if (in.tunnel) {
    receive(proto::decapsulate(in));
    return;
  }
  const Packet& p = in;
  const bool via_new = p.via && current_ && *p.via == current_->node;
  if (p.dst.is_multicast()) {
    if (via_new && !group_via_new_) {
      group_via_new_ = true;
      maybe_release_previous();
    }
    // Zero-payload packets are source probes, not application data.
    if (!p.payload.empty() && receiver_) receiver_(p, p.hao ? *p.hao : p.src);
    return;
  }
  switch (p.msg.type) {
    case MessageType::binding_ack:
      on_ack(p);
      return;
    case MessageType::home_test:
    case MessageType::care_of_test: {
      auto cn = ctx_.owner_of(p.src);
      if (!cn) return;
      auto it = rr_.find(*cn);
      if (it == rr_.end() || it->second.seq != p.msg.sequence) return;
      (p.msg.type == MessageType::home_test ? it->second.home_ok : it->second.careof_ok) = true;
      if (!it->second.home_ok || !it->second.careof_ok) return;
      cancel(ctx_.sim, it->second.timer);
      const Ipv6Addr coa = it->second.coa;
      rr_.erase(it);
      bu_cn(*cn, coa);
      if (rr_.empty() && on_rr_done_) {
        auto f = std::move(on_rr_done_);
        on_rr_done_ = {};
        f();
      }
      return;
    }
    case MessageType::data:
      if (via_new && !unicast_via_new_) {
        unicast_via_new_ = true;
        maybe_release_previous();
      }
      if (receiver_) receiver_(p, p.src);
      return;
    default:
      return;
  }
}

// ------------------------------------------------------------ multicast source

bool MobileNode::send_group(Packet p) {
  if (!p.dst.is_multicast()) throw std::invalid_argument("send_group: destination is not a group address");
  if (ctx_.cfg.multicast_mode == MulticastMode::m_hmipv6 && !p.hao)
    throw proto::ProtocolError("group packet sent through a MAP without a home address option");
  bool any = false;
  for (const auto& path : source_paths_) {
    if (path.probe_only) continue;
    if (!send_on_path(path, p)) continue;
    any = true;
    if (bicast_active_ && bicast_report_) {
      auto& r = reports_[*bicast_report_];
      ++(path.retained ? r.sent_previous_path : r.sent_new_path);
    }
  }
  return any;
}

bool MobileNode::send_on_path(const SourcePath& path, Packet p) {
  if (!ap_ || ctx_.topo.attachment(self_) != ap_) return false;
  p.tunnel.reset();
  if (path.access_router) {
    p.src = lcoa_ ? *lcoa_ : hoa_;
    p.hao.reset();
    proto::seal(p);
    ctx_.net.send(self_, *ap_, std::move(p));
    return true;
  }
  if (path.anchor.home) {
    if (at_home_) {
      p.src = hoa_;
      p.hao.reset();
      proto::seal(p);
      ctx_.net.send(self_, ha_, std::move(p));
      return true;
    }
    if (ha_coa_ == hoa_) return false;
    return emit(reverse_tunnel(std::move(p)));
  }
  if (!lcoa_) return false;
  // Through a MAP: on-link source, home address option; the MAP swaps in
  // the regional address without touching the checksum.
  p.src = *lcoa_;
  p.hao = hoa_;
  proto::seal(p);
  ctx_.net.send(self_, path.anchor.node, std::move(p));
  return true;
}

void MobileNode::source_handover(NodeId ap) {
  if (source_groups_.empty() || source_paths_.empty()) return;
  const auto& cfg = ctx_.cfg;
  auto* r = report();
  if (cfg.multicast_mode == MulticastMode::bidirectional_tunnel) return;
  if (cfg.multicast_mode == MulticastMode::remote_subscription) {
    // Native restart: a new source address and a new tree at the access router.
    for (const auto& path : source_paths_)
      for (const auto& g : source_groups_) ctx_.mcast.release_tree(path.anchor.node, g);
    source_paths_ = {SourcePath{Anchor{ap, *lcoa_}, false, false, true}};
    r->tree_requested = ctx_.now();
    for (const auto& g : source_groups_) r->tree_ready = ctx_.mcast.request_tree(ap, g);
    return;
  }

  const auto& node = ctx_.topo.node(ap);
  auto current_path = std::find_if(source_paths_.begin(), source_paths_.end(),
                                   [](const SourcePath& s) { return !s.retained; });
  if (current_path == source_paths_.end()) current_path = source_paths_.begin();

  if (!node.map_domain || cfg.variant == Variant::mipv6) {
    // Outside MAP coverage the home agent roots the stream.
    end_bicast();
    source_paths_ = {SourcePath{Anchor{ha_, hoa_, true}}};
    return;
  }
  const NodeId m = *node.map_domain;
  if (current_path->anchor.node == m) {
    // Intra-domain: the tree is unchanged; a retained anchor follows us.
    if (bicast_active_)
      for (const auto& path : source_paths_)
        if (path.retained && !path.anchor.home && !(previous_ && *previous_ == path.anchor)) bu_map(path.anchor, {});
    return;
  }

  SourcePath retained;
  if (bicast_active_) {
    auto kept = std::find_if(source_paths_.begin(), source_paths_.end(),
                             [](const SourcePath& s) { return s.retained; });
    retained = *kept;
    if (retained.anchor.node == m) {
      // Back in the retained domain before the timeout: nothing to bicast.
      for (const auto& g : source_groups_) ctx_.mcast.release_tree(current_path->anchor.node, g);
      cancel(ctx_.sim, bicast_timer_);
      cancel(ctx_.sim, probe_timer_);
      bicast_active_ = false;
      retained.retained = false;
      source_paths_ = {retained};
      if (bicast_report_) reports_[*bicast_report_].bicast_stop = ctx_.now();
      return;
    }
    // Rapid movement: the intermediate MAP is dropped, the established one kept.
    for (const auto& g : source_groups_) ctx_.mcast.release_tree(current_path->anchor.node, g);
    r->collapsed = true;
  } else {
    retained = *current_path;
    retained.retained = true;
    retained.probe_only = false;
  }
  r->previous_anchor = r->previous_anchor.value_or(retained.anchor.node);

  if (!retained.anchor.home && !(previous_ && *previous_ == retained.anchor)) bu_map(retained.anchor, {});

  const Anchor fresh{m, ctx_.plan.regional_coa(self_, m)};
  r->tree_requested = ctx_.now();
  for (const auto& g : source_groups_) {
    const SimTime ready = ctx_.mcast.request_tree(m, g);
    r->tree_ready = r->tree_ready ? std::max(*r->tree_ready, ready) : ready;
  }
  cancel(ctx_.sim, bicast_timer_);
  cancel(ctx_.sim, probe_timer_);
  bicast_report_ = r->index;

  const Duration timeout = cfg.bicast_timeout();
  if (timeout <= Duration::zero()) {
    // Degenerate case: restart at the new MAP at once.
    bicast_active_ = false;
    source_paths_ = {SourcePath{fresh}};
    for (const auto& g : source_groups_) ctx_.mcast.release_tree(retained.anchor.node, g);
    if (!anchor_needed(retained.anchor.node)) release_anchor(retained.anchor);
    r->bicast_stop = ctx_.now();
    return;
  }
  source_paths_ = {retained, SourcePath{fresh, cfg.bicast_mode == BicastMode::probe}};
  bicast_active_ = true;
  bicast_timer_ = ctx_.sim.schedule_in(timeout, [this] {
    bicast_timer_ = kNoEvent;
    end_bicast();
  });
  if (cfg.bicast_mode == BicastMode::probe) send_probe();
}

void MobileNode::end_bicast() {
  cancel(ctx_.sim, bicast_timer_);
  cancel(ctx_.sim, probe_timer_);
  if (!bicast_active_) return;
  bicast_active_ = false;
  std::optional<Anchor> old;
  std::vector<SourcePath> keep;
  for (auto path : source_paths_) {
    if (path.retained) {
      old = path.anchor;
      continue;
    }
    path.probe_only = false;
    keep.push_back(path);
  }
  source_paths_ = std::move(keep);
  if (bicast_report_) reports_[*bicast_report_].bicast_stop = ctx_.now();
  if (!old) return;
  for (const auto& g : source_groups_) ctx_.mcast.release_tree(old->node, g);
  if (!anchor_needed(old->node)) release_anchor(*old);
}

void MobileNode::send_probe() {
  probe_timer_ = kNoEvent;
  if (!bicast_active_) return;
  for (const auto& path : source_paths_) {
    if (!path.probe_only) continue;
    for (const auto& g : source_groups_) {
      Packet p;
      p.dst = g;
      p.hao = hoa_;
      if (send_on_path(path, p) && bicast_report_) ++reports_[*bicast_report_].probes_sent;
    }
  }
  probe_timer_ = ctx_.sim.schedule_in(ctx_.cfg.probe_interval, [this] { send_probe(); });
}

}  // namespace mobsim::mobility
