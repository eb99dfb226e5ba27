#include "mobsim/mobility/detection.hpp"

namespace mobsim::mobility {

RouterAdvertiser::RouterAdvertiser(Duration min_interval, Duration max_interval, sim::Rng rng,
                                   std::optional<SimTime> first)
    : min_(min_interval), max_(max_interval), rng_(std::move(rng)) {
  // Random phase so access routers are not synchronised.
  last_ = first ? *first : SimTime{} + rng_.duration(Duration::zero(), max_);
}

SimTime RouterAdvertiser::next_at_or_after(SimTime t) {
  while (last_ < t) last_ += max_ > min_ ? rng_.duration(min_, max_) : min_;
  return last_;
}

Duration detect_and_readdress(SimTime l2_up, const DetectionMode& mode, const ReaddressDelay& readdress,
                              RouterAdvertiser& advertiser, sim::Rng& rng) {
  Duration discovery{};
  switch (mode.kind) {
    case DetectionKind::router_advertisement:
      discovery = advertiser.next_at_or_after(l2_up) - l2_up;
      break;
    case DetectionKind::l2_trigger:
      discovery = rng.duration(Duration::zero(), mode.max_rtr_solicitation_delay) + mode.solicitation_handshake +
                  rng.duration(Duration::zero(), mode.max_ra_delay_time);
      break;
    case DetectionKind::fixed:
      return mode.fixed_t_local;
  }
  Duration re = readdress.mean;
  if (readdress.spread > Duration::zero())
    re = rng.duration(readdress.mean - readdress.spread, readdress.mean + readdress.spread + Duration{1});
  return discovery + std::max(re, Duration::zero());
}

}  // namespace mobsim::mobility
