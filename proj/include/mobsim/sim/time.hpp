#pragma once

#include <chrono>
#include <cstdint>
#include <string>

namespace mobsim::sim {

/// Integer microsecond clock. All protocol timing is exact in this unit.
struct SimClock {
  using rep = std::int64_t;
  using period = std::micro;
  using duration = std::chrono::duration<rep, period>;
  using time_point = std::chrono::time_point<SimClock>;
  static constexpr bool is_steady = true;
};

using Duration = SimClock::duration;
using SimTime = SimClock::time_point;

constexpr SimTime kTimeZero{};

constexpr SimTime at_us(std::int64_t us) { return SimTime{Duration{us}}; }
constexpr std::int64_t us_of(SimTime t) { return t.time_since_epoch().count(); }
constexpr std::int64_t us_of(Duration d) { return d.count(); }

inline std::string to_string(Duration d) { return std::to_string(d.count()) + "us"; }

}  // namespace mobsim::sim
