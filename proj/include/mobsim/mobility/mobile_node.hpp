#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mobsim/mobility/context.hpp"
#include "mobsim/mobility/report.hpp"
#include "mobsim/proto/packet.hpp"

namespace mobsim::mobility {

using proto::Packet;

inline constexpr sim::EventId kNoEvent = ~sim::EventId{0};

/// An anchor the mobile registers with: a MAP (key = regional CoA) or its
/// home agent (key = home address).
struct Anchor {
  NodeId node{};
  Ipv6Addr key;
  bool home = false;

  bool operator==(const Anchor& o) const { return node == o.node && key == o.key; }
};

/// Mobile node: movement detection, binding updates, return routability,
/// HMIPv6 registration with shuffling, and M-HMIPv6 receiver/source roles.
///
/// All procedures are event driven. A new movement aborts whatever the
/// previous one still had in flight; only the last successfully established
/// anchor survives.
class MobileNode : public sim::PacketSink {
 public:
  using Receiver = std::function<void(const Packet&, const Ipv6Addr& identity)>;

  MobileNode(Context& ctx, NodeId self, sim::Rng rng);

  NodeId id() const { return self_; }
  const Ipv6Addr& home_address() const { return hoa_; }
  NodeId home_agent() const { return ha_; }

  // ---- setup, before the run starts
  void add_correspondent(NodeId cn);
  /// Receiver role. During bootstrap the subscription is pre-established.
  void listen(const Ipv6Addr& group);
  void add_source_group(const Ipv6Addr& group);
  /// Attaches at `ap` with every binding and subscription already in place.
  void bootstrap(NodeId ap);
  void set_receiver(Receiver r) { receiver_ = std::move(r); }

  // ---- operations
  void move_to(NodeId ap, Duration l2_delay);
  /// Tunnels a listener report through the current MAP (RCoA as source).
  void mld_join_via_map(const Ipv6Addr& group);
  /// Application unicast to a correspondent; false if no usable path now.
  bool send_unicast(NodeId cn, Packet p);
  /// Application multicast. In M-HMIPv6 mode the packet must carry the home
  /// address option; otherwise ProtocolError is thrown.
  bool send_group(Packet p);

  // ---- notifications from fixed entities
  void on_cn_binding(NodeId cn, const Ipv6Addr& coa);
  void on_release(NodeId anchor);

  void receive(const Packet& p) override;

  // ---- inspection
  const std::vector<HandoverReport>& reports() const { return reports_; }
  bool at_home() const { return at_home_; }
  std::optional<NodeId> access_point() const { return ap_; }
  const std::optional<Ipv6Addr>& lcoa() const { return lcoa_; }
  const std::optional<Anchor>& current_anchor() const { return current_; }
  const std::optional<Anchor>& established_anchor() const { return established_; }
  const std::optional<Anchor>& previous_anchor() const { return previous_; }
  std::vector<Anchor> source_paths() const;
  bool bicasting() const { return bicast_active_; }

 private:
  struct Txn {
    std::function<void()> send;
    std::function<void()> on_ack;
    std::function<void()> on_fail;
    sim::EventId timer = kNoEvent;
    int tries = 1;
    Duration timeout{};
  };
  struct Rr {
    std::uint32_t seq = 0;
    Ipv6Addr coa;
    bool home_ok = false;
    bool careof_ok = false;
    sim::EventId timer = kNoEvent;
    int tries = 1;
  };
  struct SourcePath {
    Anchor anchor;
    bool probe_only = false;
    bool retained = false;
    bool access_router = false;  // remote subscription: native via the AP
  };

  HandoverReport* report();
  bool current(std::uint64_t epoch) const { return epoch == epoch_; }
  template <class F>
  auto guarded(F f) {
    return [this, e = epoch_, f = std::move(f)](auto&&... args) mutable {
      if (current(e)) f(std::forward<decltype(args)>(args)...);
    };
  }

  // movement
  void on_l2_up(NodeId ap);
  void on_lcoa_ready(NodeId ap);
  void abort_procedures();
  void mark_restored(bool fallback = false);

  // handover flavours
  void handover_mipv6();
  void handover_home();
  void handover_intra(const Anchor& map);
  void handover_inter(const Anchor& map, bool shuffle);
  void after_home_registration(const Ipv6Addr& coa, bool shuffle);
  void switch_outbound();
  void maybe_release_previous();
  bool anchor_needed(NodeId node) const;
  void release_anchor(const Anchor& a);

  // signalling
  void transact(std::function<void(std::uint32_t)> send, std::function<void()> on_ack,
                std::function<void()> on_fail = {});
  void arm(std::uint32_t seq);
  void on_txn_timeout(std::uint32_t seq);
  void bu_home(const Ipv6Addr& coa, std::function<void()> on_ack, std::function<void()> on_fail = {});
  void bu_map(const Anchor& map, std::function<void()> on_ack, std::function<void()> on_fail = {});
  void bu_map_zero(const Anchor& map);
  void start_rr(const Ipv6Addr& coa, std::function<void()> on_done);
  void send_rr(NodeId cn);
  void on_rr_timeout(NodeId cn);
  void bu_cn(NodeId cn, const Ipv6Addr& coa);
  void cn_done(NodeId cn);
  void send_listener_reports(const Anchor& map);

  // data plane
  Ipv6Addr outbound_coa() const;
  bool usable_relay(NodeId map) const;
  std::optional<NodeId> relay_for(const Ipv6Addr& src) const;
  bool emit(Packet p);
  Packet reverse_tunnel(Packet inner) const;
  void on_ack(const Packet& p);

  // multicast source
  void source_handover(NodeId ap);
  void end_bicast();
  void send_probe();
  bool send_on_path(const SourcePath& path, Packet p);

  Context& ctx_;
  NodeId self_;
  sim::Rng rng_;
  Ipv6Addr hoa_;
  NodeId ha_;
  Receiver receiver_;

  std::vector<NodeId> cns_;
  std::set<Ipv6Addr> listen_groups_;
  std::set<Ipv6Addr> source_groups_;

  std::uint64_t epoch_ = 0;
  std::optional<NodeId> ap_;
  std::optional<Ipv6Addr> lcoa_;
  bool at_home_ = false;

  std::optional<Anchor> current_;      // MAP registered (or registering) with
  std::optional<Anchor> established_;  // anchor the HA and CNs last bound
  std::optional<Anchor> previous_;     // shuffling: anchor kept alive
  std::optional<Anchor> out_;          // MAP relaying outbound unicast
  bool switched_ = false;
  bool unicast_via_new_ = false;
  bool group_via_new_ = false;
  sim::EventId release_timer_ = kNoEvent;

  Ipv6Addr ha_coa_;  // care-of address last sent to the HA
  std::map<NodeId, Ipv6Addr> cn_coa_;
  std::map<NodeId, Ipv6Addr> cn_expected_;
  std::function<void()> on_cns_bound_;

  std::uint32_t msg_seq_ = 0;
  std::map<std::uint32_t, Txn> txns_;
  std::map<NodeId, Rr> rr_;
  std::function<void()> on_rr_done_;

  std::vector<SourcePath> source_paths_;
  bool bicast_active_ = false;
  sim::EventId bicast_timer_ = kNoEvent;
  sim::EventId probe_timer_ = kNoEvent;
  std::optional<std::size_t> bicast_report_;

  std::vector<HandoverReport> reports_;
  std::optional<std::size_t> active_;
};

}  // namespace mobsim::mobility
