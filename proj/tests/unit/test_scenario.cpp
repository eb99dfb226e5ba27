#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mobsim/scenario/runner.hpp"
#include "support.hpp"

using namespace mobsim;
using namespace mobsim::scenario;
using namespace std::chrono_literals;
using testsupport::fixture;
using testsupport::scenario_from;

namespace {

constexpr const char* kSmall = R"(scenario name=small variant=mipv6
node name=HA kind=home-agent
node name=AP kind=access-point radio=1ms
node name=CN kind=correspondent-node
link a=AP b=HA latency=3ms
link a=AP b=CN latency=4ms
mobile name=MN home=HA start=AP cn=CN
)";

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

template <class E>
std::vector<Issue> issues_of(const std::string& text) {
  try {
    scenario_from(text);
  } catch (const E& e) {
    return e.issues();
  }
  FAIL("expected an error");
  return {};
}

}  // namespace

TEST_CASE("durations") {
  CHECK(parse_duration("45ms") == 45ms);
  CHECK(parse_duration("3s") == 3s);
  CHECK(parse_duration("250us") == 250us);
  CHECK(parse_duration("-1us") == -1us);
  CHECK_FALSE(parse_duration("12"));  // a unit is mandatory
  CHECK_FALSE(parse_duration("ms"));
  CHECK_FALSE(parse_duration("4 parsecs"));
}

TEST_CASE("bundled fixtures load") {
  const auto fig1 = load_scenario(fixture("fig1.scn"));
  CHECK(fig1.nodes.size() == 5);
  CHECK(fig1.moves.size() == 5);
  for (const char* f : {"fig5.scn", "fig5-listener.scn", "hmip-shuffle.scn", "stretched/stretch-1.scn",
                        "stretched/stretch-8.scn"})
    CHECK_NOTHROW(load_scenario(fixture(f)));
}

TEST_CASE("validation errors") {
  SUBCASE("negative latency") {
    std::string text = kSmall;
    text += "link a=HA b=CN latency=-1us\n";
    const auto issues = issues_of<ValidationError>(text);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].line == 8);
  }
  SUBCASE("non-increasing movement script") {
    std::string text = kSmall;
    text += "move at=10s mobile=MN to=AP\nmove at=5s mobile=MN to=AP\n";
    const auto issues = issues_of<ValidationError>(text);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].line == 9);
  }
  SUBCASE("unknown node") {
    std::string text = kSmall;
    text += "move at=1s mobile=MN to=AP9\n";
    CHECK(issues_of<ValidationError>(text).size() == 1);
  }
  SUBCASE("several problems are reported together") {
    std::string text = kSmall;
    text += "link a=HA b=CN latency=-1us\nmove at=1s mobile=MN to=AP9\n";
    CHECK(issues_of<ValidationError>(text).size() == 2);
  }
}

TEST_CASE("parse errors carry line numbers") {
  std::string text = kSmall;
  text += "\n# comment\nnode name=X kind=router colour=blue\n";
  const auto issues = issues_of<ParseError>(text);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].line == 10);
  CHECK(issues[0].message.find("colour") != std::string::npos);
  CHECK_FALSE(issues_of<ParseError>("teleport to=mars\n").empty());
}

TEST_CASE("run output matches the golden file") {
  const auto s = load_scenario(fixture("fig1.scn"));
  std::ostringstream os;
  write_csv(os, run_trials(s, s.trials, s.seed, 1));
  CHECK(os.str() == slurp(std::string(MOBSIM_GOLDEN_DIR) + "/fig1.csv"));
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  const auto s = load_scenario(fixture("fig1.scn"));
  std::ostringstream a, b;
  write_csv(a, run_trials(s, 8, 99, 1));
  write_csv(b, run_trials(s, 8, 99, 4));
  CHECK(a.str() == b.str());
  std::ostringstream c;
  write_csv(c, run_trials(s, 8, 100, 1));
  CHECK(a.str() != c.str());
}

TEST_CASE("budget for the worked example") {
  // MN-CN roundtrip 40 ms, MN-HA roundtrip 80 ms, fixed t_local 5 ms.
  const auto s = scenario_from(R"(scenario name=budget variant=mipv6
detection mode=fixed t_local=5ms
node name=HA kind=home-agent
node name=AP kind=access-point radio=1ms
node name=CN kind=correspondent-node
link a=AP b=HA latency=39ms
link a=AP b=CN latency=19ms
mobile name=MN home=HA start=AP cn=CN
)");
  const auto rows = budget(s);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].profile.t_cn == 40ms);
  CHECK(rows[0].profile.t_ha == 80ms);
  CHECK(rows[0].approx == 225ms);
  CHECK(rows[0].jitter_approx == doctest::Approx(3.0));
}

TEST_CASE("compare passes on the exact fixtures") {
  for (const char* f : {"fig1.scn", "hmip-shuffle.scn", "stretched/stretch-4.scn"}) {
    const auto s = load_scenario(fixture(f));
    const auto rows = compare(s, run_trials(s, 2, s.seed, 1), Tolerance{});
    CHECK_FALSE(rows.empty());
    for (const auto& r : rows) CHECK_MESSAGE(!r.flagged, f << " handover " << r.handover_index);
  }
}

TEST_CASE("tolerance parsing") {
  CHECK(Tolerance::parse("1us")->absolute == 1us);
  CHECK(Tolerance::parse("2ms")->absolute == 2ms);
  CHECK(Tolerance::parse("5")->absolute == 5us);
  const auto rel = Tolerance::parse("10%");
  REQUIRE(rel);
  CHECK(rel->accepts(109, 100));
  CHECK_FALSE(rel->accepts(111, 100));
  CHECK_FALSE(Tolerance::parse("lots"));
}
