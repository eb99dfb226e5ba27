#pragma once

#include <functional>
#include <map>
#include <set>

#include "mobsim/mobility/context.hpp"
#include "mobsim/proto/binding_cache.hpp"
#include "mobsim/proto/packet.hpp"

namespace mobsim::mobility {

using proto::Packet;

/// Common plumbing for fixed protocol entities.
class FixedAgent : public sim::PacketSink {
 public:
  FixedAgent(Context& ctx, NodeId self);
  NodeId id() const { return self_; }
  const Ipv6Addr& address() const { return addr_; }

 protected:
  /// Binding acknowledgement towards `coa`, carrying the key in a routing
  /// header when the key is a home address.
  void send_ack(const proto::Message& bu, bool key_in_rh2);
  void refuse(const Packet& p) { ctx_.net.discard(p, sim::DropReason::policy, self_); }

  Context& ctx_;
  NodeId self_;
  Ipv6Addr addr_;
};

/// Home agent: home registrations, interception of home-addressed traffic,
/// reverse tunnel termination and, for tunnelled multicast, group proxy.
class HomeAgent : public FixedAgent {
 public:
  HomeAgent(Context& ctx, NodeId self);
  void receive(const Packet& p) override;

  proto::BindingCache& cache() { return cache_; }
  const proto::BindingCache& cache() const { return cache_; }
  /// Mobile at home listens to `group` through this agent.
  void add_home_listener(const Ipv6Addr& hoa, const Ipv6Addr& group);

 private:
  void intercept(Packet p, NodeId mobile);
  void deliver_on_link(Packet p, NodeId mobile);
  void from_tree(const Packet& p);
  void handle_signal(const Packet& p);

  proto::BindingCache cache_;
  std::map<Ipv6Addr, std::set<Ipv6Addr>> home_listeners_;  // group -> home addresses
};

/// HMIPv6 mobility anchor point. Binds regional to on-link care-of
/// addresses, rewrites or tunnels traffic across the domain boundary and
/// subscribes to groups on behalf of registered mobiles.
class MapAgent : public FixedAgent {
 public:
  MapAgent(Context& ctx, NodeId self);
  void receive(const Packet& p) override;

  proto::BindingCache& cache() { return cache_; }
  const proto::BindingCache& cache() const { return cache_; }
  /// Group record for a registered regional address; joins the tree.
  void subscribe(const Ipv6Addr& rcoa, const Ipv6Addr& group);

  std::uint64_t forwarded_inbound() const { return forwarded_inbound_; }

 private:
  void handle_signal(const Packet& p, const Ipv6Addr& claimed_src);
  void inbound(Packet p, const Ipv6Addr& rcoa);
  void from_tree(const Packet& p);
  void from_mobile_multicast(Packet p);

  proto::BindingCache cache_;
  std::map<Ipv6Addr, std::set<Ipv6Addr>> pending_groups_;
  std::uint64_t forwarded_inbound_ = 0;
};

/// Correspondent node: return routability responder, route-optimised
/// binding cache (dual entries optional), application endpoint and
/// multicast listener or fixed source.
class Correspondent : public FixedAgent {
 public:
  /// Called for every accepted data packet with its source identity (home
  /// address option if present, else the IPv6 source).
  using DataHandler = std::function<void(const Packet&, const Ipv6Addr& identity)>;

  Correspondent(Context& ctx, NodeId self);
  void receive(const Packet& p) override;

  void set_handler(DataHandler h) { handler_ = std::move(h); }
  /// Route-optimised when a binding exists, else via the home address.
  void send_to(const Ipv6Addr& home, Packet p);
  /// Fixed multicast source: this node roots the tree.
  void send_group(Packet p);

  proto::BindingCache& cache() { return cache_; }
  const proto::BindingCache& cache() const { return cache_; }
  std::uint64_t rejected() const { return rejected_; }

 private:
  void handle_signal(const Packet& p);

  proto::BindingCache cache_;
  DataHandler handler_;
  std::uint64_t rejected_ = 0;
};

/// Access router: plain transit for unicast, native multicast delivery to
/// attached listeners and first-hop root for mobiles sending natively.
class AccessRouter : public FixedAgent {
 public:
  AccessRouter(Context& ctx, NodeId self);
  void receive(const Packet& p) override;
  void add_listener(const Ipv6Addr& group, NodeId mobile);

 private:
  std::map<Ipv6Addr, std::set<NodeId>> listeners_;
};

}  // namespace mobsim::mobility
