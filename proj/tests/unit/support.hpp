#pragma once

#include <string>
#include <string_view>

#include "mobsim/scenario/scenario.hpp"
#include "mobsim/scenario/world.hpp"

namespace testsupport {

inline mobsim::scenario::Scenario scenario_from(std::string_view text) {
  auto s = mobsim::scenario::parse_scenario(text);
  mobsim::scenario::validate(s);
  return s;
}

/// Fixture directory, set by the build.
inline std::string fixture(std::string_view name) { return std::string(MOBSIM_SCENARIO_DIR) + "/" + std::string(name); }

}  // namespace testsupport
