#include <algorithm>

#include "doctest.h"
#include "mobsim/scenario/runner.hpp"
#include "support.hpp"

using namespace mobsim;
using namespace mobsim::scenario;
using namespace std::chrono_literals;
using mobility::HandoverKind;
using testsupport::scenario_from;

namespace {

// Roundtrips from AP: CN 80 ms, HA 160 ms; HA-CN 80 ms.
constexpr const char* kTriangle = R"(
scenario name=triangle variant=mipv6 duration=4s
detection mode=fixed t_local=0ms
l2 delay=10ms
node name=HA kind=home-agent
node name=CN kind=correspondent-node
node name=AP0 kind=access-point radio=1ms
node name=AP kind=access-point radio=1ms
link a=AP0 b=HA latency=1ms
link a=AP b=CN latency=39ms
link a=AP b=HA latency=79ms
link a=HA b=CN latency=40ms
mobile name=MN home=HA start=AP0 cn=CN
move at=1s mobile=MN to=AP
)";

std::size_t signals_at(World& w, NodeId node, SimTime from, SimTime to) {
  const auto& log = w.context().signals();
  return static_cast<std::size_t>(std::count_if(log.begin(), log.end(), [&](const mobility::SignalRecord& r) {
    return r.node == node && r.at >= from && r.at < to;
  }));
}

}  // namespace

TEST_CASE("home registration takes one MN-HA roundtrip and RR follows the closed form") {
  World w(scenario_from(kTriangle), 1);
  w.run();
  const auto& reps = w.mobile("MN").reports();
  REQUIRE(reps.size() == 1);
  const auto& r = reps[0];
  CHECK(r.kind == HandoverKind::mipv6);
  REQUIRE(r.lcoa_ready);
  REQUIRE(r.home_ack);
  REQUIRE(r.cn_bound);
  CHECK(*r.home_ack - *r.lcoa_ready == 160ms);
  CHECK(*r.cn_bound - *r.home_ack == 280ms);
  CHECK(r.disruption() == 440ms);
  const analytic::DelayProfile p{0ms, 160ms, 80ms, 80ms};
  CHECK(r.disruption() == analytic::handoff_time_exact(p));
}

TEST_CASE("without route optimisation the home BA restores the session") {
  auto s = scenario_from(kTriangle);
  s.cfg.route_optimization = false;
  World w(s, 1);
  w.run();
  const auto& r = w.mobile("MN").reports().at(0);
  CHECK_FALSE(r.cn_bound);
  CHECK(r.disruption() == 160ms);
}

TEST_CASE("hierarchical handovers on the two-domain fixture") {
  const auto s = load_scenario(testsupport::fixture("hmip-shuffle.scn"));
  World w(s, 7);
  w.run();
  const auto& reps = w.mobile("MN").reports();
  REQUIRE(reps.size() == 4);

  SUBCASE("intra-domain move is a local registration only") {
    const auto& r = reps[0];
    CHECK(r.kind == HandoverKind::intra_domain);
    // MN-AP 1 ms, AP-MAP 2 ms.
    CHECK(*r.map_ack - *r.lcoa_ready == 6ms);
    CHECK(r.disruption() == 11ms);
    const SimTime next = reps[1].detach_at;
    CHECK(signals_at(w, w.node("HA"), r.detach_at, next) == 0);
    CHECK(signals_at(w, w.node("CN"), r.detach_at, next) == 0);
    CHECK(signals_at(w, w.node("MAP1"), r.detach_at, next) > 0);
  }
  SUBCASE("inter-domain move redirects at the previous MAP first") {
    const auto& r = reps[1];
    CHECK(r.kind == HandoverKind::shuffling);
    CHECK(r.previous_anchor == w.node("MAP1"));
    // t_local 5 ms + roundtrip MN-AP3-MAP2-MAP1 (1+2+6 each way).
    CHECK(r.disruption() == 23ms);
    CHECK_FALSE(r.fallback);
    CHECK(r.previous_released);
  }
  CHECK(w.context().cn_rejected == 0);
}

TEST_CASE("shuffling disruption ignores the distant links") {
  auto s = load_scenario(testsupport::fixture("hmip-shuffle.scn"));
  auto stretched = s;
  for (auto& l : stretched.links)
    if (l.a == "CORE" && (l.b == "HA" || l.b == "CN")) l.latency *= 3;
  World a(s, 7), b(stretched, 7);
  a.run();
  b.run();
  const auto& ra = a.mobile("MN").reports();
  const auto& rb = b.mobile("MN").reports();
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].disruption() == rb[i].disruption());
}

TEST_CASE("unreachable previous MAP falls back to the full registration") {
  auto s = load_scenario(testsupport::fixture("hmip-shuffle.scn"));
  World ref(s, 7);
  ref.run();
  World w(s, 7);
  w.run_until(SimTime{} + 9s);
  // Cut MAP1 off entirely just before the domain change.
  w.topology().set_link_up(w.node("MAP1"), w.node("MAP2"), false);
  w.topology().set_link_up(w.node("CORE"), w.node("MAP1"), false);
  w.run_until(SimTime{} + 14s);
  const auto& r = w.mobile("MN").reports().at(1);
  CHECK(r.kind == HandoverKind::shuffling);
  CHECK(r.fallback);
  REQUIRE(r.disruption());
  CHECK(*r.disruption() > 23ms);
  // Same completion the non-shuffling variant gets: the CN chain.
  CHECK(r.restored == r.cn_bound);
}

TEST_CASE("rapid movement never leaves a correspondent rejecting traffic") {
  auto s = load_scenario(testsupport::fixture("hmip-shuffle.scn"));
  s.moves.clear();
  const char* path[] = {"AP3", "AP1", "AP4", "AP2", "AP3", "AP4", "AP1"};
  SimTime t = SimTime{} + 5s;
  for (const char* ap : path) {
    s.moves.push_back(MoveDecl{t, "MN", ap, std::nullopt, 0});
    t += 60ms;  // shorter than any distant registration
  }
  validate(s);
  World w(s, 7);
  w.run();
  CHECK(w.context().cn_rejected == 0);
  const auto& reps = w.mobile("MN").reports();
  REQUIRE(reps.size() == 7);
  CHECK(reps.back().restored);
  // The stream is healthy once the last handover settles.
  const auto* flow = w.primary_flow(w.node("MN"));
  const auto st = flow->stats(metrics::Window{SimTime{} + 8s, SimTime{} + 28s});
  CHECK(st.lost == 0);
  CHECK(st.sent > 0);
}

TEST_CASE("rows carry disruption, losses and RTT") {
  const auto s = load_scenario(testsupport::fixture("fig1.scn"));
  const auto t = run_trial(s, 0, trial_seed(s.seed, 0));
  REQUIRE(t.rows.size() == 5);
  for (const auto& r : t.rows) {
    CHECK(r.variant == "mipv6");
    REQUIRE(r.disruption_us);
    CHECK(*r.disruption_us > 0);
    CHECK(r.rtt_mean_us == 1800.0);
    CHECK(r.jitter_mad_before == 0.0);
  }
}
