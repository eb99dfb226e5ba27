#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mobsim/analytic/handoff.hpp"
#include "mobsim/mobility/report.hpp"
#include "mobsim/scenario/world.hpp"

namespace mobsim::scenario {

/// One CSV row: a single handover of one trial.
struct HandoverRow {
  std::size_t trial = 0;
  std::size_t handover_index = 0;
  std::string variant;
  std::string mobile;
  std::string from_ap;
  std::string to_ap;
  std::optional<std::int64_t> disruption_us;  // restored - L2 up
  std::optional<std::int64_t> outage_us;      // restored - detach
  std::int64_t t_local_us = 0;
  std::int64_t l2_us = 0;
  std::uint64_t lost = 0;
  std::uint64_t duplicates = 0;
  std::int64_t gap_us = 0;  // longest receive gap less the nominal interval
  double jitter_mad_before = 0.0;
  double jitter_mad_after = 0.0;
  double rtt_mean_us = 0.0;
  mobility::HandoverReport report;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<HandoverRow> rows;
  std::uint64_t cn_rejected = 0;
  std::uint64_t dropped = 0;
};

/// Derives the per-handover rows from a finished world.
std::vector<HandoverRow> handover_rows(World& world, std::size_t trial);

TrialResult run_trial(const Scenario& s, std::size_t trial, std::uint64_t seed);

/// Runs `trials` trials, in parallel when `threads` > 1 (0: hardware
/// concurrency). Results are ordered by trial index.
std::vector<TrialResult> run_trials(const Scenario& s, std::size_t trials, std::uint64_t seed,
                                    unsigned threads = 0);

/// Shortest-path topology of a scenario, mobiles included but detached.
sim::Topology make_topology(const Scenario& s);

/// Roundtrip between a mobile attached at `ap` and fixed node `peer`.
Duration mobile_roundtrip(sim::Topology& topo, NodeId mobile, NodeId ap, NodeId peer);

/// Expected t_local: the configured constant, or the mean of the random
/// detection and readdressing delays.
Duration expected_t_local(const mobility::MobilityConfig& cfg);

struct BudgetRow {
  std::string mobile;
  std::string correspondent;
  std::string access_point;
  analytic::DelayProfile profile;
  Duration bu_ha{};
  std::optional<Duration> bu_cn_exact;
  Duration bu_cn_approx{};
  std::optional<Duration> exact;
  Duration approx{};
  std::optional<double> jitter_exact;
  std::optional<double> jitter_approx;
  std::string note;
};

/// Analytic handoff budget for every access point a mobile moves to (its
/// start point when the script is empty) and each of its correspondents.
std::vector<BudgetRow> budget(const Scenario& s);

/// Tolerance for compare: absolute, or relative to the expected value.
struct Tolerance {
  Duration absolute = Duration{1};
  std::optional<double> relative;
  bool accepts(std::int64_t simulated, std::int64_t expected) const;
  static std::optional<Tolerance> parse(const std::string& text);
};

struct CompareRow {
  std::size_t trial = 0;
  std::size_t handover_index = 0;
  std::string mobile;
  mobility::HandoverKind kind = mobility::HandoverKind::mipv6;
  std::int64_t simulated_us = 0;
  std::int64_t expected_us = 0;
  std::optional<std::int64_t> approx_us;
  bool flagged = false;
};

/// Closed-form disruption for one handover, from the measured t_local and
/// the topology: Eq. A.1-A.3 for MIPv6, MAP-relative forms for HMIPv6.
/// Empty for handovers that never completed.
std::optional<Duration> expected_disruption(const Scenario& s, sim::Topology& topo, const HandoverRow& row);

std::vector<CompareRow> compare(const Scenario& s, const std::vector<TrialResult>& results, const Tolerance& tol);

// ---- output
void write_csv(std::ostream& os, const std::vector<TrialResult>& results);
std::string to_json(const Scenario& s, const std::vector<TrialResult>& results);
void write_budget_csv(std::ostream& os, const std::vector<BudgetRow>& rows);
std::string budget_json(const Scenario& s, const std::vector<BudgetRow>& rows);
void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);
std::string compare_json(const Scenario& s, const std::vector<CompareRow>& rows);

}  // namespace mobsim::scenario
