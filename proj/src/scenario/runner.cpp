#include "mobsim/scenario/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace mobsim::scenario {

using mobility::HandoverKind;
using mobility::HandoverReport;

namespace {

std::string name_of(const sim::Topology& topo, std::optional<NodeId> id) {
  return id ? topo.node(*id).name : std::string{};
}

}  // namespace

std::vector<HandoverRow> handover_rows(World& world, std::size_t trial) {
  std::vector<HandoverRow> rows;
  const auto& topo = world.topology();
  const SimTime end = world.scenario().duration;
  const std::string variant(mobility::to_string(world.scenario().cfg.variant));

  for (auto* mn : world.mobiles()) {
    const auto* flow = world.primary_flow(mn->id());
    const auto* echo = world.echo_flow(mn->id());
    const auto& reports = mn->reports();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const HandoverReport& r = reports[i];
      HandoverRow row;
      row.trial = trial;
      row.variant = variant;
      row.mobile = topo.node(mn->id()).name;
      row.from_ap = name_of(topo, r.from_ap);
      row.to_ap = topo.node(r.to_ap).name;
      if (auto d = r.disruption()) row.disruption_us = d->count();
      if (auto o = r.outage()) row.outage_us = o->count();
      row.t_local_us = r.t_local.count();
      row.l2_us = r.l2_up ? (*r.l2_up - r.detach_at).count() : 0;
      row.report = r;

      const SimTime next = i + 1 < reports.size() ? reports[i + 1].detach_at : end;
      SimTime before_from{};
      if (i > 0) before_from = reports[i - 1].restored.value_or(reports[i - 1].detach_at);
      if (flow) {
        const auto during = flow->stats({r.detach_at, next});
        row.lost = during.lost;
        row.duplicates = during.duplicates;
        // The gap straddles detachment, so its window must reach back.
        row.gap_us = flow->stats({before_from, next}).disruption_interval_us;
        row.jitter_mad_before = flow->stats({before_from, r.detach_at}).jitter_mad_us;
        if (r.restored) row.jitter_mad_after = flow->stats({*r.restored, next}).jitter_mad_us;
      }
      if (echo && r.restored) row.rtt_mean_us = echo->stats({*r.restored, next}).rtt_mean_us();
      rows.push_back(std::move(row));
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const HandoverRow& a, const HandoverRow& b) { return a.report.detach_at < b.report.detach_at; });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].handover_index = i;
  return rows;
}

TrialResult run_trial(const Scenario& s, std::size_t trial, std::uint64_t seed) {
  World world(s, trial_seed(seed, trial));
  world.run();
  TrialResult out;
  out.trial = trial;
  out.seed = trial_seed(seed, trial);
  out.rows = handover_rows(world, trial);
  out.cn_rejected = world.context().cn_rejected;
  out.dropped = world.network().counters().dropped;
  return out;
}

std::vector<TrialResult> run_trials(const Scenario& s, std::size_t trials, std::uint64_t seed, unsigned threads) {
  std::vector<TrialResult> results(trials);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  if (threads <= 1) {
    for (std::size_t t = 0; t < trials; ++t) results[t] = run_trial(s, t, seed);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < trials && !failed; t = next++) {
        try {
          results[t] = run_trial(s, t, seed);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

sim::Topology make_topology(const Scenario& s) {
  sim::Topology topo;
  for (const auto& n : s.nodes) topo.add_node(n.name, n.kind);
  for (const auto& m : s.mobiles) topo.add_node(m.name, sim::NodeKind::mobile_node);
  for (const auto& n : s.nodes) {
    auto& node = topo.node(topo.require(n.name));
    node.radio = {n.radio, n.radio_epsilon};
    if (n.map) node.map_domain = topo.require(*n.map);
    if (n.home) node.home_of = topo.require(*n.home);
  }
  for (const auto& l : s.links) topo.add_link(topo.require(l.a), topo.require(l.b), l.latency, l.epsilon);
  topo.finalize();
  return topo;
}

Duration mobile_roundtrip(sim::Topology& topo, NodeId mobile, NodeId ap, NodeId peer) {
  const auto saved = topo.attachment(mobile);
  topo.attach(mobile, ap);
  const Duration rt = topo.path_delay(mobile, peer) + topo.path_delay(peer, mobile);
  if (saved)
    topo.attach(mobile, *saved);
  else
    topo.detach(mobile);
  return rt;
}

Duration expected_t_local(const mobility::MobilityConfig& cfg) {
  const auto& d = cfg.detection;
  const double readdress = static_cast<double>(cfg.readdress.mean.count());
  switch (d.kind) {
    case mobility::DetectionKind::fixed:
      return d.fixed_t_local;
    case mobility::DetectionKind::l2_trigger:
      return Duration{static_cast<std::int64_t>(std::llround(static_cast<double>(d.max_rtr_solicitation_delay.count()) / 2 +
                                                             static_cast<double>(d.max_ra_delay_time.count()) / 2 +
                                                             static_cast<double>(d.solicitation_handshake.count()) +
                                                             readdress))};
    case mobility::DetectionKind::router_advertisement: {
      // Mean forward recurrence time of a renewal process with U[a, b) gaps.
      const double a = static_cast<double>(d.ra_min_interval.count());
      const double b = static_cast<double>(d.ra_max_interval.count());
      const double residual = (a * a + a * b + b * b) / (3.0 * (a + b));
      return Duration{static_cast<std::int64_t>(std::llround(residual + readdress))};
    }
  }
  return Duration::zero();
}

std::vector<BudgetRow> budget(const Scenario& s) {
  sim::Topology topo = make_topology(s);
  const Duration t_local = expected_t_local(s.cfg);
  std::vector<BudgetRow> rows;
  for (const auto& m : s.mobiles) {
    const NodeId mn = topo.require(m.name);
    const NodeId ha = topo.require(m.home_agent);
    std::vector<std::string> targets;
    for (const auto& mv : s.moves)
      if (mv.mobile == m.name && std::find(targets.begin(), targets.end(), mv.to) == targets.end())
        targets.push_back(mv.to);
    if (targets.empty()) targets.push_back(m.start);
    for (const auto& ap_name : targets) {
      const NodeId ap = topo.require(ap_name);
      for (const auto& cn_name : m.correspondents) {
        const NodeId cn = topo.require(cn_name);
        BudgetRow row;
        row.mobile = m.name;
        row.correspondent = cn_name;
        row.access_point = ap_name;
        row.profile.t_local = t_local;
        row.profile.t_ha = mobile_roundtrip(topo, mn, ap, ha);
        row.profile.t_cn = mobile_roundtrip(topo, mn, ap, cn);
        row.profile.t_ha_cn = topo.path_delay(ha, cn) + topo.path_delay(cn, ha);
        row.bu_ha = analytic::bu_of_ha(row.profile);
        row.bu_cn_approx = analytic::bu_of_cn_approx(row.profile);
        row.approx = analytic::handoff_time_approx(row.profile);
        try {
          row.bu_cn_exact = analytic::bu_of_cn_exact(row.profile);
          row.exact = analytic::handoff_time_exact(row.profile);
        } catch (const analytic::OddHalfSum& e) {
          row.note = e.what();
        }
        try {
          row.jitter_exact = analytic::jitter_ratio_exact(row.profile);
          row.jitter_approx = analytic::jitter_ratio_approx(row.profile);
        } catch (const analytic::DivisionByZero& e) {
          if (!row.note.empty()) row.note += "; ";
          row.note += e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

bool Tolerance::accepts(std::int64_t simulated, std::int64_t expected) const {
  const auto diff = std::llabs(simulated - expected);
  if (relative) return static_cast<double>(diff) <= *relative * static_cast<double>(std::llabs(expected));
  return diff <= absolute.count();
}

std::optional<Tolerance> Tolerance::parse(const std::string& text) {
  Tolerance t;
  if (!text.empty() && text.back() == '%') {
    try {
      std::size_t used = 0;
      const double pct = std::stod(text.substr(0, text.size() - 1), &used);
      if (used != text.size() - 1 || pct < 0) return std::nullopt;
      t.relative = pct / 100.0;
      return t;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  auto d = parse_duration(text);
  if (!d) {
    // Bare integers are microseconds.
    try {
      std::size_t used = 0;
      const long long us = std::stoll(text, &used);
      if (used != text.size()) return std::nullopt;
      d = Duration{us};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (*d < Duration::zero()) return std::nullopt;
  t.absolute = *d;
  return t;
}

std::optional<Duration> expected_disruption(const Scenario& s, sim::Topology& topo, const HandoverRow& row) {
  const HandoverReport& r = row.report;
  if (!r.restored || !r.l2_up) return std::nullopt;
  const MobileDecl* m = s.find_mobile(row.mobile);
  if (!m) return std::nullopt;
  const NodeId mn = topo.require(m->name);
  const NodeId ha = topo.require(m->home_agent);
  const NodeId ap = r.to_ap;
  const bool need_cn = s.cfg.route_optimization && !m->correspondents.empty();

  // Registration of `coa_offset`-shifted care-of address with HA and CNs.
  // With a MAP in between, every MN-side roundtrip gains the MN-MAP leg.
  auto distant = [&](Duration head, std::optional<NodeId> via) -> Duration {
    auto rt_from_mobile = [&](NodeId peer) {
      if (!via) return mobile_roundtrip(topo, mn, ap, peer);
      return mobile_roundtrip(topo, mn, ap, *via) + topo.path_delay(*via, peer) + topo.path_delay(peer, *via);
    };
    analytic::DelayProfile p;
    p.t_local = head;
    p.t_ha = rt_from_mobile(ha);
    if (!need_cn) return p.t_local + analytic::bu_of_ha(p);
    Duration worst{};
    for (const auto& cn_name : m->correspondents) {
      const NodeId cn = topo.require(cn_name);
      p.t_cn = rt_from_mobile(cn);
      p.t_ha_cn = topo.path_delay(ha, cn) + topo.path_delay(cn, ha);
      worst = std::max(worst, analytic::handoff_time_exact(p));
    }
    return worst;
  };

  const Duration t_local = r.t_local;
  switch (r.kind) {
    case HandoverKind::mipv6:
      return distant(t_local, std::nullopt);
    case HandoverKind::returning_home:
      return t_local + mobile_roundtrip(topo, mn, ap, ha);
    case HandoverKind::intra_domain:
      return t_local + mobile_roundtrip(topo, mn, ap, *r.new_map);
    case HandoverKind::inter_domain:
    case HandoverKind::shuffling: {
      const NodeId map = *r.new_map;
      Duration best = distant(t_local + mobile_roundtrip(topo, mn, ap, map), map);
      if (r.kind == HandoverKind::shuffling && r.previous_anchor)
        best = std::min(best, t_local + mobile_roundtrip(topo, mn, ap, *r.previous_anchor));
      return best;
    }
  }
  return std::nullopt;
}

std::vector<CompareRow> compare(const Scenario& s, const std::vector<TrialResult>& results, const Tolerance& tol) {
  sim::Topology topo = make_topology(s);
  std::vector<CompareRow> out;
  for (const auto& t : results) {
    for (const auto& row : t.rows) {
      auto expected = expected_disruption(s, topo, row);
      if (!expected || !row.disruption_us) continue;
      CompareRow c;
      c.trial = t.trial;
      c.handover_index = row.handover_index;
      c.mobile = row.mobile;
      c.kind = row.report.kind;
      c.simulated_us = *row.disruption_us;
      c.expected_us = expected->count();
      if (c.kind == HandoverKind::mipv6 && s.cfg.route_optimization) {
        const MobileDecl* m = s.find_mobile(row.mobile);
        if (m && !m->correspondents.empty()) {
          const NodeId mn = topo.require(m->name);
          Duration worst{};
          for (const auto& cn_name : m->correspondents) {
            analytic::DelayProfile p;
            p.t_local = row.report.t_local;
            p.t_ha = mobile_roundtrip(topo, mn, row.report.to_ap, topo.require(m->home_agent));
            p.t_cn = mobile_roundtrip(topo, mn, row.report.to_ap, topo.require(cn_name));
            worst = std::max(worst, analytic::handoff_time_approx(p));
          }
          c.approx_us = worst.count();
        }
      }
      c.flagged = !tol.accepts(c.simulated_us, c.expected_us);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace mobsim::scenario
