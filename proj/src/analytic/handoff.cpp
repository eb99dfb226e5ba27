#include "mobsim/analytic/handoff.hpp"

#include <algorithm>
#include <string>

namespace mobsim::analytic {

namespace {

Duration halve(std::int64_t twice, const char* what) {
  if (twice % 2 != 0)
    throw OddHalfSum(std::string(what) + ": half of " + std::to_string(twice) + "us is not integral (odd t_CN)");
  return Duration{twice / 2};
}

}  // namespace

void DelayProfile::validate() const {
  const Duration zero{};
  if (t_local < zero || t_ha < zero || t_cn < zero || ha_cn() < zero)
    throw std::invalid_argument("delay profile components must be non-negative");
}

Duration bu_of_ha(const DelayProfile& p) {
  p.validate();
  return p.t_ha;
}

Duration bu_of_cn_exact(const DelayProfile& p) {
  p.validate();
  const std::int64_t cn = p.t_cn.count();
  const std::int64_t via_home = p.ha_cn().count() + p.t_ha.count();
  const std::int64_t test_init = std::max(cn, via_home);
  const std::int64_t test = std::max(cn, via_home);
  return halve(test_init + test + cn, "t_BU-of-CN");
}

Duration bu_of_cn_approx(const DelayProfile& p) {
  p.validate();
  return halve(3 * p.t_cn.count(), "3/2 t_CN") + p.t_ha;
}

Duration handoff_time_exact(const DelayProfile& p) { return p.t_local + bu_of_ha(p) + bu_of_cn_exact(p); }

Duration handoff_time_approx(const DelayProfile& p) {
  p.validate();
  return p.t_local + halve(3 * p.t_cn.count(), "3/2 t_CN") + 2 * p.t_ha;
}

double jitter_ratio_exact(const DelayProfile& p) {
  p.validate();
  if (p.t_cn.count() == 0) throw DivisionByZero();
  return static_cast<double>(p.ha_cn().count() + p.t_ha.count()) / static_cast<double>(p.t_cn.count());
}

double jitter_ratio_approx(const DelayProfile& p) {
  p.validate();
  if (p.t_cn.count() == 0) throw DivisionByZero();
  return static_cast<double>(p.t_ha.count() + p.t_cn.count()) / static_cast<double>(p.t_cn.count());
}

}  // namespace mobsim::analytic
