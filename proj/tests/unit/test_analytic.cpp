#include "doctest.h"
#include "mobsim/analytic/handoff.hpp"
#include "mobsim/sim/rng.hpp"

using namespace mobsim;
using namespace mobsim::analytic;
using namespace std::chrono_literals;

namespace {

// Direct transcription of the budget with the halving done in double, as an
// independent check on the integer implementation.
double oracle_exact_us(const DelayProfile& p) {
  const double cn = p.t_cn.count(), ha = p.t_ha.count(), hacn = p.ha_cn().count();
  const double m = std::max(cn, hacn + ha);
  return p.t_local.count() + ha + 0.5 * (m + m + cn);
}

DelayProfile even_profile(sim::Rng& rng) {
  DelayProfile p;
  p.t_local = Duration{static_cast<std::int64_t>(rng.below(100'000))};
  p.t_ha = Duration{static_cast<std::int64_t>(rng.below(400'000))};
  p.t_cn = Duration{2 * static_cast<std::int64_t>(rng.below(200'000))};
  p.t_ha_cn = Duration{static_cast<std::int64_t>(rng.below(400'000))};
  return p;
}

}  // namespace

TEST_CASE("worked budget example") {
  const DelayProfile p{5ms, 80ms, 40ms, 40ms};
  CHECK(handoff_time_exact(p) == 225ms);
  CHECK(handoff_time_approx(p) == 225ms);
  CHECK(bu_of_ha(p) == 80ms);
  CHECK(bu_of_cn_exact(p) == 140ms);
}

TEST_CASE("return routability example") {
  const DelayProfile p{0ms, 160ms, 80ms, 80ms};
  CHECK(bu_of_cn_exact(p) == 280ms);
}

TEST_CASE("degenerate and branch cases") {
  CHECK(handoff_time_exact(DelayProfile{}) == 0ms);
  CHECK(handoff_time_approx(DelayProfile{}) == 0ms);
  // HA between MN and CN: the max collapses to t_CN.
  const DelayProfile between{3ms, 10ms, 100ms, 20ms};
  CHECK(handoff_time_exact(between) == 3ms + 10ms + 150ms);
  CHECK(handoff_time_approx(DelayProfile{7ms, 0ms, 40ms, std::nullopt}) == 67ms);
  // RR limit with HA on the link: 3t/2.
  CHECK(bu_of_cn_exact(DelayProfile{0ms, 0ms, 40ms, 40ms}) == 60ms);
}

TEST_CASE("exact form matches the real-valued oracle") {
  sim::Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const auto p = even_profile(rng);
    CHECK(static_cast<double>(handoff_time_exact(p).count()) == oracle_exact_us(p));
  }
}

TEST_CASE("approximation agrees on its subdomain") {
  sim::Rng rng(22);
  for (int i = 0; i < 10'000; ++i) {
    auto p = even_profile(rng);
    p.t_ha_cn = p.t_cn;
    REQUIRE(handoff_time_approx(p) == handoff_time_exact(p));
    CHECK(jitter_ratio_approx(p) == doctest::Approx(jitter_ratio_exact(p)));
  }
}

TEST_CASE("handoff times are monotone in every argument") {
  sim::Rng rng(23);
  for (int i = 0; i < 2000; ++i) {
    const auto p = even_profile(rng);
    const Duration bump{2 * static_cast<std::int64_t>(1 + rng.below(1000))};
    for (int field = 0; field < 4; ++field) {
      auto q = p;
      switch (field) {
        case 0: q.t_local += bump; break;
        case 1: q.t_ha += bump; break;
        case 2: q.t_cn += bump; break;
        default: q.t_ha_cn = *q.t_ha_cn + bump; break;
      }
      CHECK(handoff_time_exact(q) >= handoff_time_exact(p));
      CHECK(handoff_time_approx(q) >= handoff_time_approx(p));
    }
  }
}

TEST_CASE("jitter ratios") {
  CHECK(jitter_ratio_exact(DelayProfile{0ms, 40ms, 40ms, 40ms}) == 2.0);
  CHECK(jitter_ratio_exact(DelayProfile{0ms, 0ms, 40ms, 40ms}) == 1.0);
  CHECK(jitter_ratio_approx(DelayProfile{0ms, 40ms, 40ms, std::nullopt}) == 2.0);
  CHECK(jitter_ratio_approx(DelayProfile{0ms, 0ms, 40ms, std::nullopt}) == 1.0);
  CHECK_THROWS_AS(jitter_ratio_exact(DelayProfile{0ms, 40ms, 0ms, 40ms}), DivisionByZero);
  CHECK_THROWS_AS(jitter_ratio_approx(DelayProfile{}), DivisionByZero);
}

TEST_CASE("odd half-sums and negative inputs are rejected") {
  CHECK_THROWS_AS(bu_of_cn_exact(DelayProfile{0ms, 0ms, Duration{3}, Duration{3}}), OddHalfSum);
  CHECK_THROWS_AS(DelayProfile({-1ms, 0ms, 0ms, std::nullopt}).validate(), std::invalid_argument);
  CHECK_NOTHROW(DelayProfile({1ms, 2ms, 3ms, std::nullopt}).validate());
}
