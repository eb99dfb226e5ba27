#include <stdexcept>

#include "doctest.h"
#include "mobsim/mobility/detection.hpp"

using namespace mobsim;
using namespace mobsim::mobility;

TEST_CASE("RA-driven detection stays within one interval plus readdressing") {
  DetectionMode mode;
  ReaddressDelay readdress{25ms, 0ms};
  sim::Rng rng(1);
  RouterAdvertiser ra(mode.ra_min_interval, mode.ra_max_interval, sim::Rng(2));
  SimTime t{};
  for (int i = 0; i < 5000; ++i) {
    t += rng.duration(1ms, 3s);
    const auto d = detect_and_readdress(t, mode, readdress, ra, rng);
    REQUIRE(d >= 25ms);
    REQUIRE(d <= 75ms);
  }
}

TEST_CASE("L2 trigger detection is well below 5 ms") {
  DetectionMode mode;
  mode.kind = DetectionKind::l2_trigger;
  ReaddressDelay readdress{2ms, 0ms};
  sim::Rng rng(3);
  RouterAdvertiser ra(mode.ra_min_interval, mode.ra_max_interval, sim::Rng(4));
  SimTime t{};
  for (int i = 0; i < 5000; ++i) {
    t += rng.duration(1ms, 3s);
    REQUIRE(detect_and_readdress(t, mode, readdress, ra, rng) < 5ms);
  }
}

TEST_CASE("advertisement at L2-up and no readdressing gives zero") {
  DetectionMode mode;
  const SimTime at = SimTime{} + 1s;
  RouterAdvertiser ra(mode.ra_min_interval, mode.ra_max_interval, sim::Rng(5), at);
  sim::Rng rng(6);
  CHECK(detect_and_readdress(at, mode, ReaddressDelay{0ms, 0ms}, ra, rng) == 0ms);
}

TEST_CASE("fixed mode returns the constant") {
  DetectionMode mode;
  mode.kind = DetectionKind::fixed;
  mode.fixed_t_local = 7ms;
  RouterAdvertiser ra(mode.ra_min_interval, mode.ra_max_interval, sim::Rng(5));
  sim::Rng rng(6);
  CHECK(detect_and_readdress(SimTime{} + 3s, mode, ReaddressDelay{}, ra, rng) == 7ms);
}

TEST_CASE("inconsistent timers are rejected") {
  DetectionMode mode;
  mode.ra_min_interval = 60ms;
  CHECK_THROWS_AS(mode.validate(), std::invalid_argument);
}
