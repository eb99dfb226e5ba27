#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "mobsim/scenario/runner.hpp"

namespace mobsim::scenario {

using nlohmann::ordered_json;

namespace {

// Fixed three decimals keeps the CSV byte-stable across platforms.
std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string opt(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string{}; }

ordered_json opt_json(const std::optional<std::int64_t>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json at_json(const std::optional<SimTime>& t) {
  return t ? ordered_json(sim::us_of(*t)) : ordered_json(nullptr);
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<TrialResult>& results) {
  os << "trial,variant,handover_index,disruption_us,lost,duplicates,jitter_mad_before,jitter_mad_after,rtt_mean_us\n";
  for (const auto& t : results)
    for (const auto& r : t.rows)
      os << r.trial << ',' << r.variant << ',' << r.handover_index << ',' << opt(r.disruption_us) << ',' << r.lost
         << ',' << r.duplicates << ',' << fixed3(r.jitter_mad_before) << ',' << fixed3(r.jitter_mad_after) << ','
         << fixed3(r.rtt_mean_us) << '\n';
}

std::string to_json(const Scenario& s, const std::vector<TrialResult>& results) {
  ordered_json doc;
  doc["scenario"] = s.name;
  doc["variant"] = mobility::to_string(s.cfg.variant);
  auto& trials = doc["trials"] = ordered_json::array();
  for (const auto& t : results) {
    ordered_json jt;
    jt["trial"] = t.trial;
    jt["seed"] = t.seed;
    jt["dropped_packets"] = t.dropped;
    jt["cn_rejected"] = t.cn_rejected;
    auto& rows = jt["handovers"] = ordered_json::array();
    for (const auto& r : t.rows) {
      const auto& rep = r.report;
      ordered_json j;
      j["handover_index"] = r.handover_index;
      j["mobile"] = r.mobile;
      j["from"] = r.from_ap;
      j["to"] = r.to_ap;
      j["kind"] = mobility::to_string(rep.kind);
      j["disruption_us"] = opt_json(r.disruption_us);
      j["outage_us"] = opt_json(r.outage_us);
      j["l2_us"] = r.l2_us;
      j["t_local_us"] = r.t_local_us;
      j["lost"] = r.lost;
      j["duplicates"] = r.duplicates;
      j["gap_us"] = r.gap_us;
      j["jitter_mad_before"] = r.jitter_mad_before;
      j["jitter_mad_after"] = r.jitter_mad_after;
      j["rtt_mean_us"] = r.rtt_mean_us;
      j["fallback"] = rep.fallback;
      j["superseded"] = rep.superseded;
      j["collapsed"] = rep.collapsed;
      auto& ev = j["events_us"];
      ev["detach"] = sim::us_of(rep.detach_at);
      ev["l2_up"] = at_json(rep.l2_up);
      ev["lcoa_ready"] = at_json(rep.lcoa_ready);
      ev["map_ack"] = at_json(rep.map_ack);
      ev["previous_ack"] = at_json(rep.previous_ack);
      ev["home_ack"] = at_json(rep.home_ack);
      ev["rr_done"] = at_json(rep.rr_done);
      ev["cn_bound"] = at_json(rep.cn_bound);
      ev["previous_released"] = at_json(rep.previous_released);
      ev["restored"] = at_json(rep.restored);
      if (rep.tree_requested) {
        auto& mc = j["source"];
        mc["tree_requested_us"] = at_json(rep.tree_requested);
        mc["tree_ready_us"] = at_json(rep.tree_ready);
        mc["bicast_stop_us"] = at_json(rep.bicast_stop);
        mc["sent_previous_path"] = rep.sent_previous_path;
        mc["sent_new_path"] = rep.sent_new_path;
        mc["probes_sent"] = rep.probes_sent;
      }
      rows.push_back(std::move(j));
    }
    trials.push_back(std::move(jt));
  }
  return doc.dump(2) + "\n";
}

void write_budget_csv(std::ostream& os, const std::vector<BudgetRow>& rows) {
  os << "mobile,correspondent,access_point,t_local_us,t_ha_us,t_cn_us,t_ha_cn_us,bu_ha_us,bu_cn_exact_us,"
        "bu_cn_approx_us,handoff_exact_us,handoff_approx_us,jitter_ratio_exact,jitter_ratio_approx,note\n";
  for (const auto& r : rows) {
    auto d = [](const std::optional<Duration>& v) { return v ? std::to_string(v->count()) : std::string{}; };
    auto x = [](const std::optional<double>& v) { return v ? fixed3(*v) : std::string{}; };
    os << r.mobile << ',' << r.correspondent << ',' << r.access_point << ',' << r.profile.t_local.count() << ','
       << r.profile.t_ha.count() << ',' << r.profile.t_cn.count() << ',' << r.profile.ha_cn().count() << ','
       << r.bu_ha.count() << ',' << d(r.bu_cn_exact) << ',' << r.bu_cn_approx.count() << ',' << d(r.exact) << ','
       << r.approx.count() << ',' << x(r.jitter_exact) << ',' << x(r.jitter_approx) << ',' << r.note << '\n';
  }
}

std::string budget_json(const Scenario& s, const std::vector<BudgetRow>& rows) {
  ordered_json doc;
  doc["scenario"] = s.name;
  auto& arr = doc["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["mobile"] = r.mobile;
    j["correspondent"] = r.correspondent;
    j["access_point"] = r.access_point;
    j["t_local_us"] = r.profile.t_local.count();
    j["t_ha_us"] = r.profile.t_ha.count();
    j["t_cn_us"] = r.profile.t_cn.count();
    j["t_ha_cn_us"] = r.profile.ha_cn().count();
    j["bu_ha_us"] = r.bu_ha.count();
    j["bu_cn_exact_us"] = r.bu_cn_exact ? ordered_json(r.bu_cn_exact->count()) : ordered_json(nullptr);
    j["bu_cn_approx_us"] = r.bu_cn_approx.count();
    j["handoff_exact_us"] = r.exact ? ordered_json(r.exact->count()) : ordered_json(nullptr);
    j["handoff_approx_us"] = r.approx.count();
    j["jitter_ratio_exact"] = r.jitter_exact ? ordered_json(*r.jitter_exact) : ordered_json(nullptr);
    j["jitter_ratio_approx"] = r.jitter_approx ? ordered_json(*r.jitter_approx) : ordered_json(nullptr);
    if (!r.note.empty()) j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "trial,handover_index,mobile,kind,simulated_us,expected_us,approx_us,diff_us,flagged\n";
  for (const auto& r : rows)
    os << r.trial << ',' << r.handover_index << ',' << r.mobile << ',' << mobility::to_string(r.kind) << ','
       << r.simulated_us << ',' << r.expected_us << ',' << opt(r.approx_us) << ','
       << (r.simulated_us - r.expected_us) << ',' << (r.flagged ? 1 : 0) << '\n';
}

std::string compare_json(const Scenario& s, const std::vector<CompareRow>& rows) {
  ordered_json doc;
  doc["scenario"] = s.name;
  std::size_t flagged = 0;
  auto& arr = doc["rows"] = ordered_json::array();
  for (const auto& r : rows) {
    flagged += r.flagged ? 1 : 0;
    ordered_json j;
    j["trial"] = r.trial;
    j["handover_index"] = r.handover_index;
    j["mobile"] = r.mobile;
    j["kind"] = mobility::to_string(r.kind);
    j["simulated_us"] = r.simulated_us;
    j["expected_us"] = r.expected_us;
    j["approx_us"] = opt_json(r.approx_us);
    j["diff_us"] = r.simulated_us - r.expected_us;
    j["flagged"] = r.flagged;
    arr.push_back(std::move(j));
  }
  doc["flagged"] = flagged;
  return doc.dump(2) + "\n";
}

}  // namespace mobsim::scenario
