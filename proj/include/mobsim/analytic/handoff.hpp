#pragma once

#include <optional>
#include <stdexcept>

#include "mobsim/sim/time.hpp"

namespace mobsim::analytic {

using sim::Duration;

class DivisionByZero : public std::domain_error {
 public:
  DivisionByZero() : std::domain_error("t_CN is zero; jitter ratio undefined") {}
};

/// The halved bracket of the return-routability term is not an integer
/// number of microseconds (odd t_CN).
class OddHalfSum : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Delay inputs of the handoff budget. Every field except t_local is a
/// roundtrip between the mobile and the named node (t_ha_cn: HA to CN).
/// Without t_ha_cn the HA-CN roundtrip is taken to equal t_cn.
struct DelayProfile {
  Duration t_local{};
  Duration t_ha{};
  Duration t_cn{};
  std::optional<Duration> t_ha_cn;

  Duration ha_cn() const { return t_ha_cn.value_or(t_cn); }
  /// Throws std::invalid_argument on a negative component.
  void validate() const;
};

/// Home registration time: one MN-HA roundtrip.
Duration bu_of_ha(const DelayProfile& p);

/// Return routability plus the unacknowledged BU to the CN:
///   1/2 { max(t_CN, t_HA-CN + t_HA)     home/care-of test init, in parallel
///       + max(t_CN, t_HA-CN + t_HA)     home/care-of test, in parallel
///       + t_CN }                         binding update
/// The two max terms are the same expression; both are kept so each stage
/// is visible. The halving happens last on the integer sum.
Duration bu_of_cn_exact(const DelayProfile& p);

/// bu_of_cn with t_HA-CN replaced by t_CN: 3/2 t_CN + t_HA.
Duration bu_of_cn_approx(const DelayProfile& p);

/// t_local + t_BU-of-HA + t_BU-of-CN, each term exact.
Duration handoff_time_exact(const DelayProfile& p);

/// t_local + 3/2 t_CN + 2 t_HA.
Duration handoff_time_approx(const DelayProfile& p);

/// (t_HA-CN + t_HA) / t_CN. Throws DivisionByZero when t_CN is zero.
double jitter_ratio_exact(const DelayProfile& p);

/// (t_HA + t_CN) / t_CN.
double jitter_ratio_approx(const DelayProfile& p);

}  // namespace mobsim::analytic
