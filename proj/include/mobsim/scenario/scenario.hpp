#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mobsim/mobility/config.hpp"
#include "mobsim/sim/topology.hpp"

namespace mobsim::scenario {

using sim::Duration;
using sim::SimTime;
using namespace std::chrono_literals;

struct Issue {
  std::size_t line = 0;  // 0: not tied to a line
  std::string message;
};

/// Carries every problem found, not just the first.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string_view kind, std::vector<Issue> issues);
  const std::vector<Issue>& issues() const { return issues_; }

 private:
  std::vector<Issue> issues_;
};

class ParseError : public ScenarioError {
 public:
  explicit ParseError(std::vector<Issue> issues) : ScenarioError("parse error", std::move(issues)) {}
};

class ValidationError : public ScenarioError {
 public:
  explicit ValidationError(std::vector<Issue> issues) : ScenarioError("invalid scenario", std::move(issues)) {}
};

struct NodeDecl {
  std::string name;
  sim::NodeKind kind = sim::NodeKind::router;
  Duration radio = 500us;
  double radio_epsilon = 0.0;
  std::optional<std::string> map;
  std::optional<std::string> home;
  std::size_t line = 0;
};

struct LinkDecl {
  std::string a;
  std::string b;
  Duration latency{};
  double epsilon = 0.0;
  std::size_t line = 0;
};

struct MobileDecl {
  std::string name;
  std::string home_agent;
  std::string start;
  std::vector<std::string> correspondents;
  std::size_t line = 0;
};

struct MoveDecl {
  SimTime at{};
  std::string mobile;
  std::string to;
  std::optional<Duration> l2;  // default: drawn from the scenario's L2 range
  std::size_t line = 0;
};

/// CBR stream from a mobile to a correspondent, optionally echoed back.
struct ProbeDecl {
  std::string mobile;
  std::string correspondent;
  Duration interval = 15ms;
  std::size_t size = 64;
  SimTime start = SimTime{} + 1s;
  std::optional<SimTime> stop;  // default: scenario end
  bool reflect = true;
  std::size_t line = 0;
};

struct GroupDecl {
  std::string address;
  std::string source;
  Duration interval = 15ms;
  std::size_t size = 64;
  SimTime start = SimTime{} + 1s;
  std::optional<SimTime> stop;
  std::size_t line = 0;
};

struct ListenDecl {
  std::string node;
  std::string group;
  std::size_t line = 0;
};

struct Scenario {
  std::string name = "unnamed";
  mobility::MobilityConfig cfg;
  Duration l2_min = 45ms;
  Duration l2_max = 45ms;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  SimTime duration = SimTime{} + 20s;

  std::vector<NodeDecl> nodes;
  std::vector<LinkDecl> links;
  std::vector<MobileDecl> mobiles;
  std::vector<MoveDecl> moves;
  std::vector<ProbeDecl> probes;
  std::vector<GroupDecl> groups;
  std::vector<ListenDecl> listens;

  const NodeDecl* find_node(std::string_view name) const;
  const MobileDecl* find_mobile(std::string_view name) const;
};

/// Parses the line-oriented format documented in docs/scenario-format.md.
/// Throws ParseError listing every malformed line; does not validate.
Scenario parse_scenario(std::string_view text);

/// Throws ValidationError listing every semantic problem.
void validate(const Scenario& s);

/// Reads, parses and validates.
Scenario load_scenario(const std::filesystem::path& path);

/// Duration literal: integer with unit us, ms or s ("45ms", "-1us").
std::optional<Duration> parse_duration(std::string_view text);

}  // namespace mobsim::scenario
