#include "doctest.h"
#include "mobsim/metrics/flow_stats.hpp"
#include "mobsim/sim/rng.hpp"

using namespace mobsim;
using namespace mobsim::metrics;
using namespace std::chrono_literals;

TEST_CASE("nearest-rank percentile") {
  const std::vector<std::int64_t> s{110, 80, 120, 100, 90};
  CHECK(percentile(s, 90) == 120);
  CHECK(percentile(s, 0) == 80);
  CHECK(percentile(s, 100) == 120);
  CHECK(percentile(s, 50) == 100);
  CHECK(percentile({7}, 90) == 7);
  CHECK_THROWS_AS(percentile({}, 50), EmptySample);
  CHECK_THROWS_AS(percentile(s, 101), std::invalid_argument);
}

TEST_CASE("undisturbed constant-delay flow") {
  FlowRecorder r(15ms);
  const SimTime t0{};
  for (std::uint64_t i = 0; i < 100; ++i) {
    const SimTime sent = t0 + i * 15ms;
    r.on_sent(i, sent);
    r.on_received(i, sent, sent + 3ms);
    r.on_echo(i, sent, sent + 6ms);
  }
  const auto st = r.stats();
  CHECK(st.sent == 100);
  CHECK(st.received == 100);
  CHECK(st.lost == 0);
  CHECK(st.jitter_mad_us == 0.0);
  CHECK(st.disruption_interval_us == 0);
  CHECK(st.rtt_mean_us() == 6000.0);
  CHECK_THROWS_AS(jitter_amplification(st, st), ZeroBaseline);
}

TEST_CASE("loss, duplicates and gap") {
  FlowRecorder r(10ms);
  const SimTime t0{};
  for (std::uint64_t i = 0; i < 50; ++i) {
    const SimTime sent = t0 + i * 10ms;
    r.on_sent(i, sent);
    if (i >= 20 && i < 27) continue;  // seven lost
    r.on_received(i, sent, sent + 1ms);
    if (i == 30) r.on_received(i, sent, sent + 2ms);
  }
  const auto st = r.stats();
  CHECK(st.lost == 7);
  CHECK(st.duplicates == 1);
  CHECK(st.received == 43);
  CHECK(st.sent == st.received + st.lost);
  CHECK(st.disruption_interval_us == 70'000);
  // The window selects by send time.
  const auto w = r.stats(Window{t0 + 200ms, t0 + 300ms});
  CHECK(w.sent == 10);
  CHECK(w.lost == 7);
  CHECK(r.first_received_after(t0 + 195ms) == t0 + 271ms);
}

TEST_CASE("conservation holds under random loss and reordering") {
  sim::Rng rng(9);
  for (int round = 0; round < 50; ++round) {
    FlowRecorder r(5ms);
    const std::uint64_t n = 100 + rng.below(400);
    for (std::uint64_t i = 0; i < n; ++i) {
      const SimTime sent = SimTime{} + i * 5ms;
      r.on_sent(i, sent);
      const auto copies = rng.below(3);
      for (std::uint64_t c = 0; c < copies; ++c) r.on_received(i, sent, sent + rng.duration(1ms, 30ms));
    }
    const auto st = r.stats();
    CHECK(st.sent == st.received + st.lost);
    CHECK(st.disruption_interval_us >= 0);
  }
}

TEST_CASE("jitter amplification ratio") {
  FlowStats a, b;
  a.jitter_mad_us = 100.0;
  b.jitter_mad_us = 200.0;
  CHECK(jitter_amplification(a, b) == 2.0);
}

TEST_CASE("probe configuration checks") {
  ProbeConfig c;
  c.stop = SimTime{} + 1s;
  CHECK_NOTHROW(c.validate());
  c.interval = 0ms;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.interval = 15ms;
  c.start = SimTime{} + 2s;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
