#include "mobsim/mobility/agents.hpp"

namespace mobsim::mobility {

using proto::MessageType;

FixedAgent::FixedAgent(Context& ctx, NodeId self)
    : ctx_(ctx), self_(self), addr_(ctx.plan.node_address(self)) {}

void FixedAgent::send_ack(const proto::Message& bu, bool key_in_rh2) {
  Packet ba;
  ba.src = addr_;
  ba.dst = bu.care_of;
  if (key_in_rh2) ba.rh2 = bu.binding_key;
  ba.msg = bu;
  ba.msg.type = MessageType::binding_ack;
  proto::seal(ba);
  ctx_.forward(self_, std::move(ba));
}

// ---------------------------------------------------------------- home agent

HomeAgent::HomeAgent(Context& ctx, NodeId self) : FixedAgent(ctx, self), cache_(false) {
  ctx_.register_home_agent(self_, this);
}

void HomeAgent::add_home_listener(const Ipv6Addr& hoa, const Ipv6Addr& group) {
  home_listeners_[group].insert(hoa);
  ctx_.mcast.join(group, self_);
}

void HomeAgent::receive(const Packet& p) {
  const SimTime now = ctx_.now();
  if (p.tunnel) {
    if (!(p.tunnel->outer_dst == addr_)) {
      refuse(p);
      return;
    }
    // Reverse tunnel: the outer source must be the registered care-of address.
    Packet inner = proto::decapsulate(p);
    const auto* b = cache_.primary(inner.src, now);
    if (!b || !(b->coa == p.tunnel->outer_src)) {
      refuse(p);
      return;
    }
    inner.via = self_;
    if (inner.dst.is_multicast()) {
      ctx_.mcast.inject(self_, inner);
    } else if (inner.dst == addr_) {
      handle_signal(inner);
    } else {
      if (proto::is_signaling(inner.msg.type)) ctx_.log_signal(self_, inner.msg.type);
      ctx_.forward(self_, std::move(inner));
    }
    return;
  }
  if (p.dst.is_multicast()) {
    if (p.via) {
      from_tree(p);
      return;
    }
    // Native group send from a mobile on the home link.
    auto m = ctx_.plan.mobile_by_home(p.src);
    if (!m || cache_.primary(p.src, now)) {
      refuse(p);
      return;
    }
    Packet q = p;
    q.via = self_;
    ctx_.mcast.inject(self_, q);
    return;
  }
  if (p.dst == addr_) {
    handle_signal(p);
    return;
  }
  if (auto m = ctx_.plan.mobile_by_home(p.dst)) {
    intercept(p, *m);
    return;
  }
  ctx_.forward(self_, p);
}

void HomeAgent::handle_signal(const Packet& p) {
  ctx_.log_signal(self_, p.msg.type);
  if (p.msg.type != MessageType::binding_update) return;
  const auto& home = p.msg.binding_key;
  const bool dereg = p.msg.lifetime <= Duration::zero() || p.msg.care_of == home;
  cache_.update(home, p.msg.care_of, dereg ? Duration::zero() : p.msg.lifetime, ctx_.now());
  proto::Message ack = p.msg;
  if (dereg) ack.care_of = home;
  send_ack(ack, !dereg);
}

void HomeAgent::intercept(Packet p, NodeId mobile) {
  if (const auto* b = cache_.primary(p.dst, ctx_.now())) {
    Packet t = proto::encapsulate(std::move(p), addr_, b->coa);
    t.via = self_;
    ctx_.forward(self_, std::move(t));
    return;
  }
  deliver_on_link(std::move(p), mobile);
}

void HomeAgent::deliver_on_link(Packet p, NodeId mobile) {
  auto ap = ctx_.topo.attachment(mobile);
  if (!ap || ctx_.topo.node(*ap).home_of != self_) {
    ctx_.net.discard(p, sim::DropReason::detached_at_ap, self_);
    return;
  }
  p.via = self_;
  ctx_.net.send_to_mobile(self_, *ap, mobile, std::move(p));
}

void HomeAgent::from_tree(const Packet& p) {
  auto it = home_listeners_.find(p.dst);
  if (it == home_listeners_.end()) return;
  for (const auto& hoa : it->second) {
    Packet copy = p;
    copy.via = self_;
    if (const auto* b = cache_.primary(hoa, ctx_.now())) {
      Packet t = proto::encapsulate(std::move(copy), addr_, b->coa);
      ctx_.forward(self_, std::move(t));
    } else if (auto m = ctx_.plan.mobile_by_home(hoa)) {
      deliver_on_link(std::move(copy), *m);
    }
  }
}

// ----------------------------------------------------------------------- MAP

MapAgent::MapAgent(Context& ctx, NodeId self) : FixedAgent(ctx, self), cache_(false) {
  ctx_.register_map(self_, this);
}

void MapAgent::subscribe(const Ipv6Addr& rcoa, const Ipv6Addr& group) {
  if (cache_.add_group(rcoa, group))
    ctx_.mcast.join(group, self_);
  else
    pending_groups_[rcoa].insert(group);
}

void MapAgent::receive(const Packet& p) {
  const SimTime now = ctx_.now();
  if (p.tunnel && p.tunnel->outer_dst == addr_) {
    // Outbound from a registered on-link address: unwrap and pass on.
    if (!cache_.find_by_coa(p.tunnel->outer_src, now)) {
      refuse(p);
      return;
    }
    Packet inner = proto::decapsulate(p);
    if (inner.dst == addr_) {
      handle_signal(inner, inner.src);
      return;
    }
    ctx_.forward(self_, std::move(inner));
    return;
  }
  if (p.dst.is_multicast()) {
    if (p.via)
      from_tree(p);
    else
      from_mobile_multicast(p);
    return;
  }
  if (p.dst == addr_) {
    handle_signal(p, p.src);
    return;
  }
  const Ipv6Addr& rd = proto::routing_destination(p);
  if (ctx_.plan.prefix_of(self_).same_prefix(rd)) {
    inbound(p, rd);
    return;
  }
  // Outbound relay for mobiles that use this MAP as first hop.
  if (p.tunnel) {
    if (cache_.primary(p.tunnel->outer_src, now)) {
      ctx_.forward(self_, p);
      return;
    }
    refuse(p);
    return;
  }
  if (p.hao) {
    auto key = cache_.find_by_coa(p.src, now);
    if (!key) {
      refuse(p);
      return;
    }
    ctx_.forward(self_, proto::rewrite_src(p, *key));
    return;
  }
  refuse(p);
}

void MapAgent::handle_signal(const Packet& p, const Ipv6Addr& claimed_src) {
  const SimTime now = ctx_.now();
  ctx_.log_signal(self_, p.msg.type);
  if (p.msg.type == MessageType::listener_report) {
    subscribe(claimed_src, p.msg.group);
    return;
  }
  if (p.msg.type != MessageType::binding_update) return;
  const auto& key = p.msg.binding_key;
  if (!ctx_.plan.prefix_of(self_).same_prefix(key)) {
    refuse(p);
    return;
  }
  if (p.msg.lifetime <= Duration::zero()) {
    std::set<Ipv6Addr> groups;
    if (const auto* b = cache_.primary(key, now)) groups = b->multicast_groups;
    cache_.update(key, p.msg.care_of, Duration::zero(), now);
    pending_groups_.erase(key);
    for (const auto& g : groups)
      if (!cache_.has_group_members(g, now)) ctx_.mcast.leave(g, self_);
    ctx_.notify_release(self_, key);
    return;
  }
  cache_.update(key, p.msg.care_of, p.msg.lifetime, now);
  if (auto it = pending_groups_.find(key); it != pending_groups_.end()) {
    auto groups = std::move(it->second);
    pending_groups_.erase(it);
    for (const auto& g : groups) subscribe(key, g);
  }
  send_ack(p.msg, false);
}

void MapAgent::inbound(Packet p, const Ipv6Addr& rcoa) {
  const auto* b = cache_.primary(rcoa, ctx_.now());
  if (!b) {
    refuse(p);
    return;
  }
  Packet q;
  if (p.tunnel)
    q = proto::encapsulate(proto::decapsulate(std::move(p)), addr_, b->coa);
  else if (p.rh2)
    q = proto::rewrite_dest(std::move(p), b->coa);
  else
    q = proto::encapsulate(std::move(p), addr_, b->coa);
  q.via = self_;
  ++forwarded_inbound_;
  ctx_.forward(self_, std::move(q));
}

void MapAgent::from_tree(const Packet& p) {
  const SimTime now = ctx_.now();
  for (const auto& key : cache_.keys_with_group(p.dst, now)) {
    const auto* b = cache_.primary(key, now);
    Packet q = proto::encapsulate(p, addr_, b->coa);
    q.via = self_;
    ++forwarded_inbound_;
    ctx_.forward(self_, std::move(q));
  }
}

void MapAgent::from_mobile_multicast(Packet p) {
  // Source mode: the home address option carries the stable identity.
  if (!p.hao) {
    refuse(p);
    return;
  }
  auto key = cache_.find_by_coa(p.src, ctx_.now());
  if (!key) {
    refuse(p);
    return;
  }
  Packet q = proto::rewrite_src(std::move(p), *key);
  q.via = self_;
  ctx_.mcast.inject(self_, q);
}

// -------------------------------------------------------------- correspondent

Correspondent::Correspondent(Context& ctx, NodeId self)
    : FixedAgent(ctx, self), cache_(ctx.cfg.dual_entries, ctx.cfg.dual_entry_lifetime) {
  ctx_.register_correspondent(self_, this);
}

void Correspondent::receive(const Packet& p) {
  if (p.tunnel) {
    refuse(p);
    return;
  }
  if (p.dst.is_multicast()) {
    // Group traffic cannot be checked against the binding cache.
    if (handler_) handler_(p, p.hao ? *p.hao : p.src);
    return;
  }
  if (proto::is_signaling(p.msg.type)) {
    handle_signal(p);
    return;
  }
  Ipv6Addr identity = p.src;
  if (p.hao) {
    const SimTime now = ctx_.now();
    if (!cache_.accepts_source(*p.hao, p.src, now)) {
      ++rejected_;
      ++ctx_.cn_rejected;
      refuse(p);
      return;
    }
    cache_.observe_source(*p.hao, p.src, now);
    identity = *p.hao;
  }
  if (handler_) handler_(p, identity);
}

void Correspondent::handle_signal(const Packet& p) {
  ctx_.log_signal(self_, p.msg.type);
  Packet reply;
  reply.src = addr_;
  reply.dst = p.src;
  reply.msg = p.msg;
  switch (p.msg.type) {
    case MessageType::home_test_init:
      reply.msg.type = MessageType::home_test;
      break;
    case MessageType::care_of_test_init:
      reply.msg.type = MessageType::care_of_test;
      break;
    case MessageType::binding_update: {
      if (!p.hao) {
        refuse(p);
        return;
      }
      cache_.update(*p.hao, p.msg.care_of, p.msg.lifetime, ctx_.now());
      ctx_.notify_cn_binding(self_, *p.hao, p.msg.care_of);
      if (!p.msg.ack_requested || p.msg.lifetime <= Duration::zero()) return;
      send_ack(p.msg, true);
      return;
    }
    default:
      return;
  }
  proto::seal(reply);
  ctx_.forward(self_, std::move(reply));
}

void Correspondent::send_to(const Ipv6Addr& home, Packet p) {
  p.src = addr_;
  p.tunnel.reset();
  if (const auto* b = cache_.primary(home, ctx_.now())) {
    p.dst = b->coa;
    p.rh2 = home;
  } else {
    p.dst = home;
    p.rh2.reset();
  }
  proto::seal(p);
  ctx_.forward(self_, std::move(p));
}

void Correspondent::send_group(Packet p) {
  p.src = addr_;
  p.via = self_;
  proto::seal(p);
  ctx_.mcast.inject(self_, p);
}

// -------------------------------------------------------------- access router

AccessRouter::AccessRouter(Context& ctx, NodeId self) : FixedAgent(ctx, self) {
  ctx_.register_access_router(self_, this);
}

void AccessRouter::add_listener(const Ipv6Addr& group, NodeId mobile) {
  listeners_[group].insert(mobile);
  ctx_.mcast.join(group, self_);
}

void AccessRouter::receive(const Packet& p) {
  if (p.dst.is_multicast()) {
    if (!p.via) {
      // Native send from an attached mobile: this router is the tree root.
      auto t = ctx_.plan.resolve(p.src);
      if (!t || t->node != self_ || !t->mobile || ctx_.topo.attachment(*t->mobile) != self_) {
        refuse(p);
        return;
      }
      Packet q = p;
      q.via = self_;
      ctx_.mcast.inject(self_, q);
      return;
    }
    auto it = listeners_.find(p.dst);
    if (it == listeners_.end()) return;
    for (NodeId m : it->second) {
      if (ctx_.topo.attachment(m) != self_) continue;
      Packet q = p;
      q.via = self_;
      ctx_.net.send_to_mobile(self_, self_, m, std::move(q));
    }
    return;
  }
  if (p.dst == addr_ && p.msg.type == proto::MessageType::listener_report) {
    auto t = ctx_.plan.resolve(p.src);
    if (t && t->mobile) add_listener(p.msg.group, *t->mobile);
    return;
  }
  ctx_.net.discard(p, sim::DropReason::no_handler, self_);
}

}  // namespace mobsim::mobility
