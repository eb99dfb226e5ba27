// Command-line front end: run, budget, compare, validate.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mobsim/scenario/runner.hpp"

namespace {

using namespace mobsim::scenario;

struct Options {
  std::string scenario;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string tolerance = "1us";
  std::string format = "csv";
  unsigned threads = 0;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty() || o.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
  f << text;
}

std::vector<TrialResult> simulate(const Scenario& s, const Options& o) {
  return run_trials(s, o.trials.value_or(s.trials), o.seed.value_or(s.seed), o.threads);
}

int cmd_run(const Options& o) {
  const Scenario s = load_scenario(o.scenario);
  const auto results = simulate(s, o);
  if (o.format == "json") {
    emit(o, to_json(s, results));
  } else {
    std::ostringstream os;
    write_csv(os, results);
    emit(o, os.str());
  }
  return 0;
}

int cmd_budget(const Options& o) {
  const Scenario s = load_scenario(o.scenario);
  const auto rows = budget(s);
  if (o.format == "json") {
    emit(o, budget_json(s, rows));
  } else {
    std::ostringstream os;
    write_budget_csv(os, rows);
    emit(o, os.str());
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const auto tol = Tolerance::parse(o.tolerance);
  if (!tol) throw CLI::ValidationError("--tolerance", "expected a duration (1us, 2ms) or a percentage (10%)");
  const Scenario s = load_scenario(o.scenario);
  const auto rows = compare(s, simulate(s, o), *tol);
  if (o.format == "json") {
    emit(o, compare_json(s, rows));
  } else {
    std::ostringstream os;
    write_compare_csv(os, rows);
    emit(o, os.str());
  }
  std::size_t flagged = 0;
  for (const auto& r : rows) flagged += r.flagged ? 1 : 0;
  if (flagged) std::cerr << flagged << " of " << rows.size() << " handovers outside tolerance\n";
  return flagged ? 1 : 0;
}

int cmd_validate(const Options& o) {
  const Scenario s = load_scenario(o.scenario);
  std::cout << "ok: " << s.name << ": " << s.nodes.size() << " nodes, " << s.links.size() << " links, "
            << s.mobiles.size() << " mobiles, " << s.moves.size() << " moves\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of IPv6 mobility handovers"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool runs) {
    sub->add_option("--scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    if (!runs) return;
    sub->add_option("--trials", o.trials, "Trial count (overrides the scenario)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Seed (overrides the scenario)");
    sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores");
  };

  auto* run = app.add_subcommand("run", "Simulate and emit one row per handover");
  common(run, true);
  auto* bud = app.add_subcommand("budget", "Closed-form handoff budget per move target");
  common(bud, false);
  auto* cmp = app.add_subcommand("compare", "Simulate and check each handover against the closed forms");
  common(cmp, true);
  cmp->add_option("--tolerance", o.tolerance, "Absolute (1us, 2ms) or relative (10%) tolerance");
  auto* val = app.add_subcommand("validate", "Parse and validate a scenario");
  val->add_option("--scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (bud->parsed()) return cmd_budget(o);
    if (cmp->parsed()) return cmd_compare(o);
    if (val->parsed()) return cmd_validate(o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
