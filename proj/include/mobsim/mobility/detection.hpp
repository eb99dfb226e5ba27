#pragma once

#include <optional>

#include "mobsim/mobility/config.hpp"
#include "mobsim/sim/rng.hpp"

namespace mobsim::mobility {

using sim::SimTime;

/// Unsolicited RA schedule of one access router: a renewal process with
/// inter-advertisement gaps drawn uniformly from [min, max). Advanced lazily.
class RouterAdvertiser {
 public:
  /// The first advertisement falls at `first` if given, else at a random
  /// phase in [0, max).
  RouterAdvertiser(Duration min_interval, Duration max_interval, sim::Rng rng,
                   std::optional<SimTime> first = std::nullopt);

  /// First advertisement at or after `t`.
  SimTime next_at_or_after(SimTime t);

 private:
  Duration min_;
  Duration max_;
  sim::Rng rng_;
  SimTime last_{};
};

/// Time from L2-up until the new on-link care-of address is usable.
///
/// RA mode: wait for the next advertisement, then readdress.
/// L2-trigger mode: solicitation delay + RS/RA flight + router response
/// delay, then readdress. Random delays are drawn from [0, max).
Duration detect_and_readdress(SimTime l2_up, const DetectionMode& mode, const ReaddressDelay& readdress,
                              RouterAdvertiser& advertiser, sim::Rng& rng);

}  // namespace mobsim::mobility
