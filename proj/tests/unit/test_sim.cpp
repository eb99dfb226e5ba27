#include <algorithm>
#include <functional>
#include <vector>

#include "doctest.h"
#include "mobsim/sim/network.hpp"
#include "mobsim/sim/rng.hpp"
#include "mobsim/sim/simulator.hpp"
#include "mobsim/sim/topology.hpp"

using namespace mobsim;
using namespace mobsim::sim;
using namespace std::chrono_literals;

namespace {

SimTime at(Duration d) { return SimTime{} + d; }

/// Shortest latency by enumerating every simple path (exponential; fine on
/// graphs of at most 7 nodes). Independent of the Dijkstra in Topology.
std::int64_t brute_force_delay(std::size_t n, const std::vector<std::tuple<int, int, std::int64_t>>& edges, int src,
                               int dst) {
  std::int64_t best = -1;
  std::vector<bool> seen(n, false);
  std::function<void(int, std::int64_t)> walk = [&](int u, std::int64_t acc) {
    if (u == dst) {
      if (best < 0 || acc < best) best = acc;
      return;
    }
    seen[static_cast<std::size_t>(u)] = true;
    for (const auto& [a, b, w] : edges) {
      int v = a == u ? b : (b == u ? a : -1);
      if (v >= 0 && !seen[static_cast<std::size_t>(v)]) walk(v, acc + w);
    }
    seen[static_cast<std::size_t>(u)] = false;
  };
  walk(src, 0);
  return best;
}

struct Sink : PacketSink {
  std::vector<std::pair<SimTime, proto::Packet>> got;
  Simulator* sim = nullptr;
  void receive(const proto::Packet& p) override { got.emplace_back(sim->now(), p); }
};

}  // namespace

TEST_CASE("schedule fires at the requested time") {
  Simulator sim;
  SimTime fired{};
  sim.schedule(at(10us), [&] { fired = sim.now(); });
  CHECK(sim.run_until(at(100us)) == 1);
  CHECK(fired == at(10us));
  CHECK(sim.now() == at(100us));
}

TEST_CASE("equal fire times run in insertion order") {
  Simulator sim;
  std::string order;
  sim.schedule(at(10us), [&] { order += 'A'; });
  sim.schedule(at(10us), [&] { order += 'B'; });
  sim.schedule(at(5us), [&] { order += 'C'; });
  sim.run_until(at(10us));
  CHECK(order == "CAB");
}

TEST_CASE("scheduling into the past throws") {
  Simulator sim;
  sim.run_until(at(20us));
  CHECK_THROWS_AS(sim.schedule(at(5us), [] {}), PastTime);
  CHECK_NOTHROW(sim.schedule(at(20us), [] {}));
}

TEST_CASE("run_until executes only due events and cascades") {
  Simulator sim;
  int count = 0;
  for (int t : {1, 2, 3}) sim.schedule(at(Duration{t}), [&] { ++count; });
  CHECK(sim.run_until(at(2us)) == 2);
  CHECK(count == 2);

  Simulator chain;
  bool second = false;
  chain.schedule(at(1us), [&] { chain.schedule(at(2us), [&] { second = true; }); });
  CHECK(chain.run_until(at(5us)) == 2);
  CHECK(second);

  Simulator empty;
  CHECK(empty.run_until(at(100us)) == 0);
  CHECK(empty.now() == at(100us));
}

TEST_CASE("cancelled events never run and ids start at zero") {
  Simulator sim;
  bool ran = false;
  const EventId first = sim.schedule(at(3us), [&] { ran = true; });
  CHECK(first == 0);
  CHECK(sim.cancel(first));
  CHECK_FALSE(sim.cancel(first));
  sim.run_until(at(10us));
  CHECK_FALSE(ran);
  CHECK(sim.pending() == 0);
}

TEST_CASE("rng streams are reproducible and bounded") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.duration(37ms, 50ms);
    CHECK(x == b.duration(37ms, 50ms));
    CHECK(x >= 37ms);
    CHECK(x < 50ms);
  }
  CHECK(a.below(0) == 0);
  CHECK(a.duration(5ms, 5ms) == 5ms);
}

TEST_CASE("path delay on small fixtures") {
  Topology t;
  auto a = t.add_node("a", NodeKind::router);
  auto b = t.add_node("b", NodeKind::router);
  auto c = t.add_node("c", NodeKind::router);
  auto d = t.add_node("d", NodeKind::router);
  t.add_link(a, b, 5ms);
  t.add_link(b, c, 10ms);
  t.add_link(c, d, 5ms);
  t.finalize();
  CHECK(t.path_delay(a, b) == 5ms);
  CHECK(t.path_delay(a, a) == 0us);
  CHECK(t.path_delay(a, d) == 20ms);
  CHECK(t.node_path(a, d) == std::vector<NodeId>{a, b, c, d});
}

TEST_CASE("topology rejects bad links and unknown nodes") {
  Topology t;
  auto a = t.add_node("a", NodeKind::router);
  auto b = t.add_node("b", NodeKind::router);
  CHECK_THROWS_AS(t.add_link(a, b, 0us), TopologyError);
  CHECK_THROWS_AS(t.add_link(a, b, -1us), TopologyError);
  CHECK_THROWS_AS(t.add_link(a, a, 1us), TopologyError);
  CHECK_THROWS_AS(t.add_node("a", NodeKind::router), TopologyError);
  CHECK_THROWS_AS(t.require("nope"), UnknownNode);
  t.add_node("island", NodeKind::router);
  t.add_link(a, b, 1us);
  CHECK_THROWS_AS(t.finalize(), TopologyError);
}

TEST_CASE("Dijkstra routes agree with brute-force path enumeration") {
  Rng rng(7);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 3 + rng.below(5);
    std::vector<std::tuple<int, int, std::int64_t>> edges;
    Topology t;
    for (std::size_t i = 0; i < n; ++i) t.add_node("n" + std::to_string(i), NodeKind::router);
    // Spanning chain first so the graph is connected, then random chords.
    for (std::size_t i = 1; i < n; ++i) {
      const int parent = static_cast<int>(rng.below(i));
      edges.emplace_back(parent, static_cast<int>(i), 1 + static_cast<std::int64_t>(rng.below(50'000)));
    }
    for (std::size_t k = rng.below(n); k > 0; --k) {
      const int u = static_cast<int>(rng.below(n));
      const int v = static_cast<int>(rng.below(n));
      if (u != v) edges.emplace_back(u, v, 1 + static_cast<std::int64_t>(rng.below(50'000)));
    }
    for (const auto& [u, v, w] : edges) t.add_link(NodeId(u), NodeId(v), Duration{w});
    t.finalize();
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t d = 0; d < n; ++d)
        REQUIRE(t.path_delay(NodeId(s), NodeId(d)).count() ==
                brute_force_delay(n, edges, static_cast<int>(s), static_cast<int>(d)));
  }
}

TEST_CASE("mobile endpoints include the radio hop and need an attachment") {
  Topology t;
  auto r = t.add_node("r", NodeKind::router);
  auto ap = t.add_node("ap", NodeKind::access_point);
  auto mn = t.add_node("mn", NodeKind::mobile_node);
  t.node(ap).radio = {700us, 0.0};
  t.add_link(r, ap, 3ms);
  t.finalize();
  CHECK_THROWS_AS(t.path_delay(mn, r), Unreachable);
  t.attach(mn, ap);
  CHECK(t.path_delay(mn, r) == 3700us);
  CHECK(t.path_delay(r, mn) == 3700us);
  CHECK_THROWS_AS(t.attach(mn, r), TopologyError);
}

TEST_CASE("network delivers with exact latency at zero epsilon and drops at a vacated AP") {
  Simulator sim;
  Topology t;
  auto r = t.add_node("r", NodeKind::router);
  auto ap1 = t.add_node("ap1", NodeKind::access_point);
  auto ap2 = t.add_node("ap2", NodeKind::access_point);
  auto mn = t.add_node("mn", NodeKind::mobile_node);
  t.add_link(r, ap1, 2ms);
  t.add_link(r, ap2, 2ms);
  t.finalize();
  t.attach(mn, ap1);
  Network net(sim, t, 1);
  Sink sink;
  sink.sim = &sim;
  net.bind(mn, &sink);
  std::vector<DropReason> drops;
  net.set_drop_hook([&](const proto::Packet&, DropReason why, NodeId) { drops.push_back(why); });

  net.send_to_mobile(r, ap1, mn, {});
  sim.run_until(at(10ms));
  REQUIRE(sink.got.size() == 1);
  CHECK(sink.got[0].first == at(2500us));  // 2 ms link + 500 us default radio

  // In flight when the mobile leaves: dropped on arrival at the old AP.
  net.send_to_mobile(r, ap1, mn, {});
  bool up = false;
  sim.schedule(at(11ms), [&] { net.move_mobile(mn, ap2, 45ms, [&] { up = true; }); });
  sim.run_until(at(20ms));
  CHECK(sink.got.size() == 1);
  REQUIRE(drops.size() == 1);
  CHECK(drops[0] == DropReason::detached_at_ap);
  CHECK_FALSE(t.attachment(mn).has_value());
  sim.run_until(at(56ms) - 1us);
  CHECK_FALSE(up);
  sim.run_until(at(56ms));
  CHECK(up);
  CHECK(t.attachment(mn) == ap2);

  // Zero L2 delay reattaches synchronously.
  net.move_mobile(mn, ap1, 0us, {});
  CHECK(t.attachment(mn) == ap1);
  CHECK_THROWS_AS(net.move_mobile(mn, r, 1ms, {}), UnknownNode);
}

TEST_CASE("link jitter stays within epsilon times latency") {
  Simulator sim;
  Topology t;
  auto a = t.add_node("a", NodeKind::router);
  auto b = t.add_node("b", NodeKind::router);
  t.add_link(a, b, 10ms, 0.1);
  t.finalize();
  Network net(sim, t, 99);
  Sink sink;
  sink.sim = &sim;
  net.bind(b, &sink);
  for (int i = 0; i < 500; ++i) sim.schedule(at(Duration{i * 100'000}), [&] { net.send(a, b, {}); });
  sim.run_until(at(60s));
  REQUIRE(sink.got.size() == 500);
  std::int64_t lo = 1 << 30, hi = 0;
  for (std::size_t i = 0; i < sink.got.size(); ++i) {
    const auto d = (sink.got[i].first - at(Duration{static_cast<std::int64_t>(i) * 100'000})).count();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(lo >= 9000);
  CHECK(hi <= 11000);
  CHECK(hi - lo > 1000);  // noise actually present
}
