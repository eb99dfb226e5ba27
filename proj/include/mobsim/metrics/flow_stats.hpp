#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mobsim/sim/time.hpp"

namespace mobsim::metrics {

using sim::Duration;
using sim::SimTime;

class EmptySample : public std::invalid_argument {
 public:
  EmptySample() : std::invalid_argument("percentile of an empty sample") {}
};

class ZeroBaseline : public std::domain_error {
 public:
  ZeroBaseline() : std::domain_error("baseline jitter is zero; jitter amplification needs link noise") {}
};

/// Constant-bit-rate probe: numbered, time-stamped datagrams, optionally
/// reflected by the peer.
struct ProbeConfig {
  Duration interval{std::chrono::milliseconds{15}};
  std::size_t payload_size = 64;
  SimTime start{};
  SimTime stop{};
  bool reflect = true;

  /// Throws std::invalid_argument unless interval > 0 and start <= stop.
  void validate() const;
};

struct FlowStats {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;  // unique sequence numbers
  std::uint64_t lost = 0;
  std::uint64_t duplicates = 0;
  std::vector<std::int64_t> rtt_us;
  std::vector<std::int64_t> interarrival_us;
  /// Longest gap between consecutive receptions, less the nominal interval.
  std::int64_t disruption_interval_us = 0;
  /// Mean |interarrival - nominal| over consecutive in-order receptions.
  double jitter_mad_us = 0.0;
  /// RFC 3550 style smoothed transit-difference estimate (gain 1/16).
  double jitter_smoothed_us = 0.0;

  double rtt_mean_us() const;
};

/// Half-open window over send times.
struct Window {
  SimTime from{};
  SimTime to = SimTime::max();
  bool contains(SimTime t) const { return t >= from && t < to; }
};

/// Per-flow event log; statistics are derived on demand for any window.
class FlowRecorder {
 public:
  explicit FlowRecorder(Duration nominal_interval) : nominal_(nominal_interval) {}

  void on_sent(std::uint64_t seq, SimTime sent_at);
  void on_received(std::uint64_t seq, SimTime sent_at, SimTime received_at);
  void on_echo(std::uint64_t seq, SimTime sent_at, SimTime echoed_at);

  FlowStats stats(Window window = {}) const;

  Duration nominal_interval() const { return nominal_; }
  /// Receptions whose arrival time falls in [from, to).
  std::uint64_t duplicates_received_between(SimTime from, SimTime to) const;
  std::optional<SimTime> first_received_after(SimTime t) const;

  struct Reception {
    std::uint64_t seq;
    SimTime sent_at;
    SimTime received_at;
  };
  const std::vector<Reception>& receptions() const { return receptions_; }

 private:
  Duration nominal_;
  std::map<std::uint64_t, SimTime> sent_;
  std::vector<Reception> receptions_;
  std::vector<Reception> echoes_;
};

/// Nearest-rank percentile, p in [0, 100]; p = 0 gives the minimum.
std::int64_t percentile(std::vector<std::int64_t> samples, double p);

/// after.jitter_mad / before.jitter_mad.
double jitter_amplification(const FlowStats& before, const FlowStats& after);

}  // namespace mobsim::metrics
