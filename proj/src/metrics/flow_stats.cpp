#include "mobsim/metrics/flow_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mobsim::metrics {

void ProbeConfig::validate() const {
  if (interval <= Duration::zero()) throw std::invalid_argument("probe interval must be positive");
  if (stop < start) throw std::invalid_argument("probe stop precedes start");
}

double FlowStats::rtt_mean_us() const {
  if (rtt_us.empty()) return 0.0;
  return static_cast<double>(std::accumulate(rtt_us.begin(), rtt_us.end(), std::int64_t{0})) /
         static_cast<double>(rtt_us.size());
}

void FlowRecorder::on_sent(std::uint64_t seq, SimTime sent_at) { sent_.emplace(seq, sent_at); }

void FlowRecorder::on_received(std::uint64_t seq, SimTime sent_at, SimTime received_at) {
  receptions_.push_back({seq, sent_at, received_at});
}

void FlowRecorder::on_echo(std::uint64_t seq, SimTime sent_at, SimTime echoed_at) {
  echoes_.push_back({seq, sent_at, echoed_at});
}

FlowStats FlowRecorder::stats(Window window) const {
  FlowStats s;
  for (const auto& [seq, at] : sent_)
    if (window.contains(at)) ++s.sent;

  std::set<std::uint64_t> seen;
  std::vector<const Reception*> firsts;
  for (const auto& r : receptions_) {
    if (!window.contains(r.sent_at)) continue;
    if (!seen.insert(r.seq).second) {
      ++s.duplicates;
      continue;
    }
    firsts.push_back(&r);
  }
  s.received = firsts.size();
  s.lost = s.sent >= s.received ? s.sent - s.received : 0;

  // receptions_ is appended in event order, so firsts are in arrival order.
  const std::int64_t nominal = nominal_.count();
  double mad_sum = 0.0;
  std::size_t mad_n = 0;
  double j = 0.0;
  for (std::size_t i = 1; i < firsts.size(); ++i) {
    const auto& a = *firsts[i - 1];
    const auto& b = *firsts[i];
    const std::int64_t gap = (b.received_at - a.received_at).count();
    s.interarrival_us.push_back(gap);
    s.disruption_interval_us = std::max(s.disruption_interval_us, gap - nominal);
    if (b.seq > a.seq) {
      const auto expected = static_cast<std::int64_t>(b.seq - a.seq) * nominal;
      mad_sum += std::abs(static_cast<double>(gap - expected));
      ++mad_n;
    }
    const auto transit_a = (a.received_at - a.sent_at).count();
    const auto transit_b = (b.received_at - b.sent_at).count();
    j += (std::abs(static_cast<double>(transit_b - transit_a)) - j) / 16.0;
  }
  s.jitter_mad_us = mad_n ? mad_sum / static_cast<double>(mad_n) : 0.0;
  s.jitter_smoothed_us = j;

  for (const auto& e : echoes_)
    if (window.contains(e.sent_at)) s.rtt_us.push_back((e.received_at - e.sent_at).count());
  return s;
}

std::uint64_t FlowRecorder::duplicates_received_between(SimTime from, SimTime to) const {
  std::set<std::uint64_t> seen;
  std::uint64_t dup = 0;
  for (const auto& r : receptions_) {
    const bool first = seen.insert(r.seq).second;
    if (!first && r.received_at >= from && r.received_at < to) ++dup;
  }
  return dup;
}

std::optional<SimTime> FlowRecorder::first_received_after(SimTime t) const {
  for (const auto& r : receptions_)
    if (r.received_at >= t) return r.received_at;
  return std::nullopt;
}

std::int64_t percentile(std::vector<std::int64_t> samples, double p) {
  if (samples.empty()) throw EmptySample();
  if (!(p >= 0.0 && p <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

double jitter_amplification(const FlowStats& before, const FlowStats& after) {
  if (before.jitter_mad_us == 0.0) throw ZeroBaseline();
  return after.jitter_mad_us / before.jitter_mad_us;
}

}  // namespace mobsim::metrics
