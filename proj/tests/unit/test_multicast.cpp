#include "doctest.h"
#include "mobsim/scenario/runner.hpp"
#include "support.hpp"

using namespace mobsim;
using namespace mobsim::scenario;
using namespace std::chrono_literals;
using mobility::HandoverKind;
using testsupport::fixture;

namespace {

const World::Listener& only_listener(const World& w) {
  REQUIRE(w.groups().size() == 1);
  REQUIRE(w.groups()[0].listeners.size() == 1);
  return w.groups()[0].listeners.begin()->second;
}

/// Send times of packets never received, within [from, to).
std::vector<SimTime> lost_sends(const World::GroupFlow& f, const metrics::FlowRecorder& rec, SimTime from, SimTime to) {
  std::set<std::uint64_t> got;
  for (const auto& r : rec.receptions()) got.insert(r.seq);
  std::vector<SimTime> out;
  for (std::uint64_t seq = 0; seq < f.sent; ++seq) {
    const SimTime sent = f.start + seq * f.interval;
    if (sent >= from && sent < to && !got.count(seq)) out.push_back(sent);
  }
  return out;
}

}  // namespace

TEST_CASE("mobile listener keeps its subscription across domains") {
  World w(load_scenario(fixture("fig5-listener.scn")), 9);
  w.run();
  const auto& reps = w.mobile("MN").reports();
  REQUIRE(reps.size() == 3);
  const auto& rec = only_listener(w).rec;

  SUBCASE("intra-domain move is transparent beyond detection") {
    const auto& r = reps[0];
    CHECK(r.kind == HandoverKind::intra_domain);
    // Stop short of the next move, whose in-flight packets are lost too.
    const auto lost = lost_sends(w.groups()[0], rec, r.detach_at, reps[1].detach_at - 100ms);
    REQUIRE_FALSE(lost.empty());
    CHECK(lost.back() < *r.restored);
  }
  SUBCASE("inter-domain move uses the previous MAP, not the tree") {
    const auto& r = reps[1];
    CHECK(r.kind == HandoverKind::shuffling);
    // 5 ms + roundtrip MN-AP3-MAP2-CORE-MAP1.
    CHECK(r.disruption() == 31ms);
    const auto first = rec.first_received_after(*r.restored);
    REQUIRE(first);
    CHECK(*first - *r.restored <= 10ms);
    CHECK(rec.duplicates_received_between(r.detach_at, reps[2].detach_at) > 0);
    REQUIRE(r.previous_released);
    // Nothing doubles once the previous MAP dropped the entry and its last
    // tunnelled copy (one-way MAP1-MN 13 ms) has landed.
    CHECK(rec.duplicates_received_between(*r.previous_released + 13ms, reps[2].detach_at) == 0);
  }
}

TEST_CASE("listener disruption matches the unicast shuffling handover") {
  auto listen = load_scenario(fixture("fig5-listener.scn"));
  auto unicast = listen;
  unicast.groups.clear();
  unicast.listens.clear();
  unicast.mobiles[0].correspondents = {"CN"};
  unicast.probes.push_back(ProbeDecl{"MN", "CN", 10ms, 64, SimTime{} + 1s, std::nullopt, true, 0});
  validate(unicast);
  World a(listen, 9), b(unicast, 9);
  a.run();
  b.run();
  const auto& ra = a.mobile("MN").reports();
  const auto& rb = b.mobile("MN").reports();
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra[i].kind == rb[i].kind);
    if (ra[i].kind == HandoverKind::shuffling) CHECK(ra[i].disruption() == rb[i].disruption());
  }
}

TEST_CASE("mobile source bicasts through both MAPs") {
  World w(load_scenario(fixture("fig5.scn")), 5);
  w.run();
  const auto& reps = w.mobile("MN").reports();
  REQUIRE(reps.size() == 4);
  const auto& l = only_listener(w);

  CHECK(reps[0].kind == HandoverKind::intra_domain);
  CHECK_FALSE(reps[0].tree_requested);
  CHECK(reps[2].collapsed);

  // The listener only ever sees the home address.
  REQUIRE(l.identities.size() == 1);
  CHECK(*l.identities.begin() == w.mobile("MN").home_address());

  // No loss after the new address is usable.
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const auto& r = reps[i];
    const SimTime end = i + 1 < reps.size() ? reps[i + 1].detach_at : w.groups()[0].stop;
    for (SimTime t : lost_sends(w.groups()[0], l.rec, r.detach_at, end)) CHECK(t < *r.lcoa_ready);
    if (r.tree_requested) {
      CHECK(*r.tree_ready - *r.tree_requested == 3s);
      CHECK(r.sent_previous_path > 0);
    }
  }
}

TEST_CASE("without bicasting the loss window is the tree convergence") {
  auto s = load_scenario(fixture("fig5.scn"));
  s.cfg.t_bicast = 0ms;
  s.moves.resize(2);  // intra move, then one domain change
  World w(s, 5);
  w.run();
  const auto& r = w.mobile("MN").reports().at(1);
  REQUIRE(r.tree_ready);
  const auto lost = lost_sends(w.groups()[0], only_listener(w).rec, *r.lcoa_ready, w.groups()[0].stop);
  const auto window = static_cast<std::int64_t>(lost.size()) * w.groups()[0].interval;
  CHECK(window >= 3s - 20ms);
  CHECK(window <= 3s + 20ms);
  CHECK(r.sent_previous_path == 0);
}

TEST_CASE("probe mode keeps the previous tree alive without data") {
  auto s = load_scenario(fixture("fig5.scn"));
  s.cfg.bicast_mode = mobility::BicastMode::probe;
  World w(s, 5);
  w.run();
  const auto& r = w.mobile("MN").reports().at(1);
  CHECK(r.probes_sent > 0);
  CHECK(r.sent_previous_path > 0);
}

TEST_CASE("group send without the home address option is refused") {
  World w(load_scenario(fixture("fig5.scn")), 5);
  w.run_until(SimTime{} + 2s);
  proto::Packet p;
  p.dst = proto::Ipv6Addr::parse("ff0e::101", proto::AddressRole::multicast_group);
  CHECK_THROWS_AS(w.mobile("MN").send_group(p), proto::ProtocolError);
}

TEST_CASE("bidirectional tunnelling disruption grows with the home agent distance") {
  std::optional<std::int64_t> last;
  for (const char* f : {"stretch-1.scn", "stretch-2.scn", "stretch-4.scn", "stretch-8.scn"}) {
    const auto s = load_scenario(fixture(std::string("stretched/") + f));
    World w(s, s.seed);
    w.run();
    const auto& r = w.mobile("MN").reports().at(0);
    REQUIRE(r.disruption());
    const auto d = r.disruption()->count();
    if (last) CHECK(d > *last);
    last = d;
    // Tunnelled group traffic resumes only behind the home registration.
    const auto& rec = w.groups()[0].listeners.begin()->second.rec;
    const auto first = rec.first_received_after(r.detach_at + 1us);
    REQUIRE(first);
    REQUIRE(r.home_ack);
    CHECK(*first >= *r.home_ack);
  }
}
