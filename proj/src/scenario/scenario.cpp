#include "mobsim/scenario/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mobsim/proto/address.hpp"

namespace mobsim::scenario {

namespace {

std::string join_issues(std::string_view kind, const std::vector<Issue>& issues) {
  std::ostringstream os;
  os << kind;
  for (const auto& i : issues) {
    os << "\n  ";
    if (i.line) os << "line " << i.line << ": ";
    os << i.message;
  }
  return os.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::optional<bool> parse_switch(std::string_view t) {
  if (t == "on" || t == "true" || t == "yes") return true;
  if (t == "off" || t == "false" || t == "no") return false;
  return std::nullopt;
}

/// One record's key=value pairs; tracks which keys were consumed so the
/// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(std::size_t line, std::vector<Issue>& issues) : line_(line), issues_(issues) {}

  bool add(std::string_view word) {
    const auto eq = word.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      error("expected key=value, got '" + std::string(word) + "'");
      return false;
    }
    std::string key(word.substr(0, eq));
    if (!values_.emplace(key, std::string(word.substr(eq + 1))).second) error("duplicate key '" + key + "'");
    return true;
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string required(const std::string& key) {
    auto v = text(key);
    if (!v) {
      error("missing key '" + key + "'");
      return {};
    }
    return *v;
  }

  template <class T, class Parse>
  void read(const std::string& key, T& out, Parse parse, std::string_view what) {
    auto v = text(key);
    if (!v) return;
    if (auto parsed = parse(*v))
      out = *parsed;
    else
      error("bad " + std::string(what) + " for '" + key + "': '" + *v + "'");
  }

  void duration(const std::string& key, Duration& out) { read(key, out, parse_duration, "duration"); }
  void duration(const std::string& key, std::optional<Duration>& out) {
    read(key, out, [](std::string_view t) { return parse_duration(t); }, "duration");
  }
  void time(const std::string& key, SimTime& out) {
    read(key, out, [](std::string_view t) -> std::optional<SimTime> {
      auto d = parse_duration(t);
      if (!d) return std::nullopt;
      return SimTime{} + *d;
    }, "time");
  }
  void time(const std::string& key, std::optional<SimTime>& out) {
    read(key, out, [](std::string_view t) -> std::optional<std::optional<SimTime>> {
      auto d = parse_duration(t);
      if (!d) return std::nullopt;
      return std::optional<SimTime>{SimTime{} + *d};
    }, "time");
  }
  void flag(const std::string& key, bool& out) { read(key, out, parse_switch, "switch (on/off)"); }
  template <class T>
  void integer(const std::string& key, T& out) { read(key, out, parse_number<T>, "integer"); }
  void real(const std::string& key, double& out) { read(key, out, parse_number<double>, "number"); }

  void finish(std::string_view record) {
    for (const auto& [k, v] : values_)
      if (!used_.contains(k)) error("unknown key '" + k + "' in '" + std::string(record) + "' record");
  }

  void error(std::string msg) { issues_.push_back({line_, std::move(msg)}); }

 private:
  std::size_t line_;
  std::vector<Issue>& issues_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

template <class Enum, class Parse>
void read_enum(Fields& f, const std::string& key, Enum& out, Parse parse, std::string_view what) {
  f.read(key, out, parse, what);
}

void parse_record(std::string_view record, Fields& f, Scenario& s, std::size_t line) {
  auto& cfg = s.cfg;
  if (record == "scenario") {
    if (auto n = f.text("name")) s.name = *n;
    read_enum(f, "variant", cfg.variant, mobility::parse_variant, "variant");
    f.integer("seed", s.seed);
    f.integer("trials", s.trials);
    f.time("duration", s.duration);
  } else if (record == "detection") {
    read_enum(f, "mode", cfg.detection.kind, mobility::parse_detection, "detection mode");
    f.duration("ra_min", cfg.detection.ra_min_interval);
    f.duration("ra_max", cfg.detection.ra_max_interval);
    f.duration("rs_delay", cfg.detection.max_rtr_solicitation_delay);
    f.duration("ra_delay", cfg.detection.max_ra_delay_time);
    f.duration("handshake", cfg.detection.solicitation_handshake);
    f.duration("t_local", cfg.detection.fixed_t_local);
  } else if (record == "readdress") {
    f.duration("mean", cfg.readdress.mean);
    f.duration("spread", cfg.readdress.spread);
  } else if (record == "l2") {
    std::optional<Duration> delay;
    f.duration("delay", delay);
    if (delay) s.l2_min = s.l2_max = *delay;
    f.duration("min", s.l2_min);
    f.duration("max", s.l2_max);
  } else if (record == "binding") {
    f.flag("route_optimization", cfg.route_optimization);
    f.flag("cn_ack", cfg.cn_binding_ack);
    f.flag("dual_entries", cfg.dual_entries);
    f.duration("dual_lifetime", cfg.dual_entry_lifetime);
    f.duration("lifetime", cfg.binding_lifetime);
    f.duration("retransmit", cfg.retransmit_initial);
    f.integer("tries", cfg.retransmit_tries);
    f.duration("rr_retransmit", cfg.rr_retransmit);
  } else if (record == "multicast") {
    read_enum(f, "mode", cfg.multicast_mode, mobility::parse_multicast_mode, "multicast mode");
    read_enum(f, "bicast", cfg.bicast_mode, mobility::parse_bicast_mode, "bicast mode");
    f.duration("membership_delay", cfg.membership_delay);
    f.duration("convergence", cfg.tree_convergence);
    f.duration("t_bicast", cfg.t_bicast);
    f.duration("probe_interval", cfg.probe_interval);
  } else if (record == "node") {
    NodeDecl n;
    n.line = line;
    n.name = f.required("name");
    auto kind = f.required("kind");
    if (auto k = sim::parse_node_kind(kind))
      n.kind = *k;
    else if (!kind.empty())
      f.error("unknown node kind '" + kind + "'");
    f.duration("radio", n.radio);
    f.real("radio_epsilon", n.radio_epsilon);
    n.map = f.text("map");
    n.home = f.text("home");
    s.nodes.push_back(std::move(n));
  } else if (record == "link") {
    LinkDecl l;
    l.line = line;
    l.a = f.required("a");
    l.b = f.required("b");
    if (!f.text("latency").has_value() && !f.text("latency_us").has_value()) f.error("missing key 'latency'");
    f.duration("latency", l.latency);
    std::optional<std::int64_t> us;
    f.read("latency_us", us, [](std::string_view t) -> std::optional<std::optional<std::int64_t>> {
      auto v = parse_number<std::int64_t>(t);
      if (!v) return std::nullopt;
      return std::optional<std::int64_t>{*v};
    }, "integer");
    if (us) l.latency = Duration{*us};
    f.real("epsilon", l.epsilon);
    s.links.push_back(std::move(l));
  } else if (record == "mobile") {
    MobileDecl m;
    m.line = line;
    m.name = f.required("name");
    m.home_agent = f.required("home");
    m.start = f.required("start");
    if (auto cns = f.text("cn"))
      for (auto c : split(*cns, ','))
        if (!trim(c).empty()) m.correspondents.emplace_back(trim(c));
    s.mobiles.push_back(std::move(m));
  } else if (record == "move") {
    MoveDecl m;
    m.line = line;
    if (!f.text("at")) f.error("missing key 'at'");
    f.time("at", m.at);
    m.mobile = f.required("mobile");
    m.to = f.required("to");
    f.duration("l2", m.l2);
    s.moves.push_back(std::move(m));
  } else if (record == "probe") {
    ProbeDecl p;
    p.line = line;
    p.mobile = f.required("mobile");
    p.correspondent = f.required("cn");
    f.duration("interval", p.interval);
    f.integer("size", p.size);
    f.time("start", p.start);
    f.time("stop", p.stop);
    f.flag("reflect", p.reflect);
    s.probes.push_back(std::move(p));
  } else if (record == "group") {
    GroupDecl g;
    g.line = line;
    g.address = f.required("address");
    g.source = f.required("source");
    f.duration("interval", g.interval);
    f.integer("size", g.size);
    f.time("start", g.start);
    f.time("stop", g.stop);
    s.groups.push_back(std::move(g));
  } else if (record == "listen") {
    ListenDecl l;
    l.line = line;
    l.node = f.required("node");
    l.group = f.required("group");
    s.listens.push_back(std::move(l));
  } else {
    f.error("unknown record type '" + std::string(record) + "'");
    return;
  }
  f.finish(record);
}

}  // namespace

ScenarioError::ScenarioError(std::string_view kind, std::vector<Issue> issues)
    : std::runtime_error(join_issues(kind, issues)), issues_(std::move(issues)) {}

const NodeDecl* Scenario::find_node(std::string_view n) const {
  for (const auto& d : nodes)
    if (d.name == n) return &d;
  return nullptr;
}

const MobileDecl* Scenario::find_mobile(std::string_view n) const {
  for (const auto& d : mobiles)
    if (d.name == n) return &d;
  return nullptr;
}

std::optional<Duration> parse_duration(std::string_view text) {
  std::int64_t scale = 0;
  if (text.ends_with("us"))
    scale = 1, text.remove_suffix(2);
  else if (text.ends_with("ms"))
    scale = 1000, text.remove_suffix(2);
  else if (text.ends_with("s"))
    scale = 1'000'000, text.remove_suffix(1);
  else
    return std::nullopt;
  auto v = parse_number<std::int64_t>(text);
  if (!v) return std::nullopt;
  return Duration{*v * scale};
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::vector<Issue> issues;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto w = words(trim(raw));
    if (w.empty()) continue;
    Fields f(line_no, issues);
    bool ok = true;
    for (std::size_t i = 1; i < w.size(); ++i) ok = f.add(w[i]) && ok;
    if (ok) parse_record(w[0], f, s, line_no);
  }
  if (!issues.empty()) throw ParseError(std::move(issues));
  return s;
}

void validate(const Scenario& s) {
  using sim::NodeKind;
  std::vector<Issue> issues;
  auto err = [&](std::size_t line, std::string msg) { issues.push_back({line, std::move(msg)}); };
  const auto& cfg = s.cfg;

  try {
    cfg.detection.validate();
  } catch (const std::invalid_argument& e) {
    err(0, e.what());
  }
  if (cfg.readdress.spread < Duration::zero() || cfg.readdress.spread > cfg.readdress.mean)
    err(0, "readdress spread must lie in [0, mean]");
  if (s.l2_min < Duration::zero() || s.l2_min > s.l2_max) err(0, "L2 delay range requires 0 <= min <= max");
  if (s.trials == 0) err(0, "trials must be >= 1");
  if (s.duration <= SimTime{}) err(0, "duration must be positive");
  if (cfg.retransmit_initial <= Duration::zero() || cfg.rr_retransmit <= Duration::zero() || cfg.retransmit_tries < 1)
    err(0, "retransmission timers must be positive with at least one try");
  if (cfg.dual_entry_lifetime < Duration::zero() || cfg.binding_lifetime <= Duration::zero())
    err(0, "binding lifetimes must be positive");
  if (cfg.membership_delay < Duration::zero() || cfg.tree_convergence < Duration::zero())
    err(0, "multicast delays must be >= 0");
  if (cfg.t_bicast && *cfg.t_bicast < Duration::zero()) err(0, "t_bicast must be >= 0");
  if (cfg.probe_interval <= Duration::zero()) err(0, "probe_interval must be positive");
  if (cfg.variant == mobility::Variant::hmipv6_shuffling && !cfg.dual_entries)
    err(0, "hmipv6-shuffling needs dual binding cache entries at the correspondent");

  std::map<std::string, std::size_t> names;
  auto claim = [&](const std::string& name, std::size_t line) {
    if (name.empty()) return;
    if (!names.emplace(name, line).second) err(line, "duplicate node name '" + name + "'");
  };
  for (const auto& n : s.nodes) claim(n.name, n.line);
  for (const auto& m : s.mobiles) claim(m.name, m.line);

  auto kind_of = [&](const std::string& name) -> std::optional<NodeKind> {
    if (s.find_mobile(name)) return NodeKind::mobile_node;
    if (const auto* n = s.find_node(name)) return n->kind;
    return std::nullopt;
  };
  auto expect = [&](std::size_t line, const std::string& name, std::initializer_list<NodeKind> kinds,
                    std::string_view role) {
    auto k = kind_of(name);
    if (!k) {
      err(line, "unknown node '" + name + "'");
      return;
    }
    for (auto want : kinds)
      if (*k == want) return;
    err(line, "'" + name + "' cannot be " + std::string(role) + " (kind " + std::string(sim::to_string(*k)) + ")");
  };

  for (const auto& n : s.nodes) {
    if (n.kind == NodeKind::mobile_node) err(n.line, "declare mobiles with a 'mobile' record");
    if (n.kind != NodeKind::access_point && (n.map || n.home))
      err(n.line, "only access points take map= or home=");
    if (n.map) expect(n.line, *n.map, {NodeKind::map}, "a MAP domain");
    if (n.home) expect(n.line, *n.home, {NodeKind::home_agent}, "a home network");
    if (n.radio < Duration::zero()) err(n.line, "radio latency must be >= 0");
    if (n.radio_epsilon < 0.0 || n.radio_epsilon >= 1.0) err(n.line, "radio_epsilon must lie in [0, 1)");
  }
  for (const auto& l : s.links) {
    const std::initializer_list<NodeKind> fixed = {NodeKind::router, NodeKind::home_agent, NodeKind::map,
                                                   NodeKind::access_point, NodeKind::correspondent_node,
                                                   NodeKind::multicast_router};
    expect(l.line, l.a, fixed, "a link endpoint");
    expect(l.line, l.b, fixed, "a link endpoint");
    if (l.a == l.b) err(l.line, "self link on '" + l.a + "'");
    if (l.latency <= Duration::zero()) err(l.line, "link latency must be positive, got " + std::to_string(l.latency.count()) + "us");
    if (l.epsilon < 0.0 || l.epsilon >= 1.0) err(l.line, "link epsilon must lie in [0, 1)");
  }
  for (const auto& m : s.mobiles) {
    expect(m.line, m.home_agent, {NodeKind::home_agent}, "a home agent");
    expect(m.line, m.start, {NodeKind::access_point}, "an attachment point");
    for (const auto& c : m.correspondents) expect(m.line, c, {NodeKind::correspondent_node}, "a correspondent");
  }
  std::map<std::string, SimTime> last_move;
  for (const auto& mv : s.moves) {
    expect(mv.line, mv.mobile, {NodeKind::mobile_node}, "moved");
    expect(mv.line, mv.to, {NodeKind::access_point}, "a move target");
    if (mv.l2 && *mv.l2 < Duration::zero()) err(mv.line, "l2 delay must be >= 0");
    if (mv.at >= s.duration) err(mv.line, "move lies beyond the scenario duration");
    auto [it, fresh] = last_move.try_emplace(mv.mobile, mv.at);
    if (!fresh) {
      if (mv.at <= it->second) err(mv.line, "mobility script times must be strictly increasing");
      it->second = mv.at;
    }
  }
  for (const auto& p : s.probes) {
    expect(p.line, p.mobile, {NodeKind::mobile_node}, "a probe sender");
    expect(p.line, p.correspondent, {NodeKind::correspondent_node}, "a probe reflector");
    if (const auto* m = s.find_mobile(p.mobile);
        m && std::find(m->correspondents.begin(), m->correspondents.end(), p.correspondent) == m->correspondents.end())
      err(p.line, "'" + p.correspondent + "' is not listed in cn= of '" + p.mobile + "'");
    if (p.interval <= Duration::zero()) err(p.line, "probe interval must be positive");
    if (p.size < 16) err(p.line, "probe size must be >= 16 bytes");
    if (p.stop && *p.stop < p.start) err(p.line, "probe stop precedes start");
  }
  std::set<std::string> groups;
  for (const auto& g : s.groups) {
    try {
      if (!proto::Ipv6Addr::parse(g.address).is_multicast()) err(g.line, "'" + g.address + "' is not a multicast address");
    } catch (const std::exception& e) {
      err(g.line, e.what());
    }
    if (!groups.insert(g.address).second) err(g.line, "duplicate group '" + g.address + "'");
    expect(g.line, g.source, {NodeKind::mobile_node, NodeKind::correspondent_node}, "a group source");
    if (g.interval <= Duration::zero()) err(g.line, "group interval must be positive");
    if (g.size < 16) err(g.line, "group payload size must be >= 16 bytes");
    if (g.stop && *g.stop < g.start) err(g.line, "group stop precedes start");
  }
  for (const auto& l : s.listens) {
    expect(l.line, l.node, {NodeKind::mobile_node, NodeKind::correspondent_node}, "a listener");
    if (!groups.contains(l.group)) err(l.line, "undeclared group '" + l.group + "'");
  }

  if (issues.empty()) {
    // Graph-level checks need a real topology.
    sim::Topology topo;
    try {
      for (const auto& n : s.nodes) topo.add_node(n.name, n.kind);
      for (const auto& l : s.links) topo.add_link(topo.require(l.a), topo.require(l.b), l.latency, l.epsilon);
      topo.finalize();
    } catch (const std::exception& e) {
      err(0, e.what());
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError({{0, "cannot open '" + path.string() + "'"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str());
  validate(s);
  return s;
}

}  // namespace mobsim::scenario
