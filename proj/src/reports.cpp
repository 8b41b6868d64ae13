#include "pkgc/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "pkgc/power_model.hpp"

namespace pkgc {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string percent(double fraction) { return fmt("%.1f%%", fraction * 100.0); }

}  // namespace

// ---- estimate-power -----------------------------------------------------------

Json estimate_power_report(const PowerProfile& prof, double r_pc1a, std::optional<Watts> p_pc0) {
  if (!(r_pc1a >= 0.0 && r_pc1a <= 1.0)) {
    throw ValidationError("InvalidResidency", "r_pc1a must lie in [0, 1]");
  }
  if (auto v = validate_profile(prof); !v.ok()) {
    throw ValidationError("InvalidProfile", "power profile violates " + v.violations.front());
  }
  const Watts p0 = p_pc0.value_or(prof.p_pc0_max);
  if (!(p0 >= 0.0)) throw ValidationError("InvalidProfile", "p_pc0 must be >= 0");

  ResidencyVector res;
  res.r_pc0 = 1.0 - r_pc1a;
  res.r_pc0_idle = r_pc1a;
  res.r_pc1a = r_pc1a;
  const Watts base = baseline_power(res, prof, p0);
  const double savings = pc1a_savings(res, prof, p0);

  Json j;
  j["inputs"] = {{"r_pc1a", r_pc1a}, {"r_pc0", res.r_pc0}, {"p_pc0_at_load_w", p0}};
  j["baseline_power_w"] = base;
  j["pc0_idle_power_w"] = prof.pc0_idle_total();
  j["pc1a_power_w"] = prof.pc1a_total();
  j["pc1a_soc_w"] = prof.p_pc1a_soc;
  j["pc1a_dram_w"] = prof.p_pc1a_dram;
  j["power_with_pc1a_w"] = base * (1.0 - savings);
  j["savings_fraction"] = savings;
  j["savings_percent"] = percent(savings);
  return j;
}

std::string render_estimate_power(const Json& r) {
  std::ostringstream out;
  out << "baseline power:  " << fmt("%.2f W", r.at("baseline_power_w").get<double>()) << '\n'
      << "PC1A power:      " << fmt("%.2f W", r.at("pc1a_power_w").get<double>()) << " (SoC "
      << fmt("%.3f W", r.at("pc1a_soc_w").get<double>()) << ", DRAM "
      << fmt("%.3f W", r.at("pc1a_dram_w").get<double>()) << ")\n"
      << "power with PC1A: " << fmt("%.2f W", r.at("power_with_pc1a_w").get<double>()) << '\n'
      << "savings:         " << r.at("savings_percent").get<std::string>();
  if (r.at("inputs").at("r_pc0").get<double>() == 0.0) out << " (idle)";
  out << '\n';
  return out.str();
}

// ---- transition-budget --------------------------------------------------------

Json transition_budget_report(const PlatformProfile& profile) {
  const TransitionBudget pc1a = transition_budget(profile.latency);
  const TransitionBudget pc6 = pc6_budget(profile.latency, profile.pc6);
  Json j;
  j["pc1a"] = to_json(pc1a);
  j["pc6"] = to_json(pc6);
  j["pc1a_budget_ns"] = 200;
  j["pc1a_within_budget"] = pc1a.total_ns <= 200;
  j["pc6_to_pc1a_ratio"] = pc1a.total_ns ? static_cast<double>(pc6.total_ns) / static_cast<double>(pc1a.total_ns)
                                         : 0.0;
  return j;
}

std::string render_transition_budget(const Json& r) {
  const Json& a = r.at("pc1a");
  const Json& b = r.at("pc6");
  std::ostringstream out;
  out << "PC1A entry: " << a.at("entry_ns").get<TimeNs>() << " ns\n"
      << "PC1A exit:  " << a.at("exit_ns").get<TimeNs>() << " ns\n"
      << "PC1A total: " << a.at("total_ns").get<TimeNs>() << " ns ("
      << (r.at("pc1a_within_budget").get<bool>() ? "within" : "exceeds") << " the "
      << r.at("pc1a_budget_ns").get<int>() << " ns budget)\n"
      << "PC6 entry:  " << b.at("entry_ns").get<TimeNs>() << " ns\n"
      << "PC6 exit:   " << b.at("exit_ns").get<TimeNs>() << " ns\n"
      << "PC6 total:  " << b.at("total_ns").get<TimeNs>() << " ns ("
      << fmt("%.0fx", r.at("pc6_to_pc1a_ratio").get<double>()) << " PC1A)\n";
  return out.str();
}

// ---- simulate / sweep -----------------------------------------------------------

Json simulate_report(const SimConfig& config, const SimResult& result) {
  return {{"config", to_json(config)}, {"result", to_json(result)}};
}

Json sweep_report(const SimConfig& config, const std::vector<SavingsComparison>& points) {
  const TimeNs cost = transition_budget(config.latency_profile).total_ns;
  Json pts = Json::array();
  for (const auto& p : points) {
    Json j;
    j["rate_per_s"] = p.rate_per_s;
    j["utilization"] = p.rate_per_s * config.service.mean_ns / (1e9 * static_cast<double>(config.n_cores));
    j["measured_savings"] = p.measured_savings;
    j["model_savings"] = p.model_savings;
    j["shallow"] = to_json(p.shallow);
    j["pc1a"] = to_json(p.pc1a);
    if (p.pc1a.requests_served > 0 && config.network_latency_ns > 0) {
      j["latency_impact"] = to_json(latency_impact(p.pc1a.package_wakes, cost, p.pc1a.requests_served,
                                                   config.network_latency_ns));
    } else {
      j["latency_impact"] = nullptr;
    }
    pts.push_back(j);
  }
  return {{"config", to_json(config)}, {"transition_cost_ns", cost}, {"points", pts}};
}

Json sweep_report(const SimConfig& config, const std::vector<double>& rates) {
  return sweep_report(config, savings_sweep(config, rates));
}

// ---- analyze-trace --------------------------------------------------------------

Json analyze_trace_report(const CStateTrace& trace, TimeNs floor_ns, CoreCState gate) {
  const IdleIntervalReport raw = all_idle_intervals(trace, gate);
  const IdleIntervalReport sampled = apply_sampling_floor(raw, floor_ns);
  Json j;
  j["gate"] = std::string(to_string(gate));
  j["floor_ns"] = floor_ns;
  j["n_cores"] = trace.n_cores;
  j["window"] = {trace.t_start, trace.t_end};
  j["all_idle"] = to_json(raw);
  j["sampled"] = to_json(sampled);
  j["all_idle_20us_to_200us"] = raw.histogram.count_in_range(20'000, 200'000);
  j["residency"] = to_json(residency_by_state(trace));
  return j;
}

// ---- flows ------------------------------------------------------------------------

std::string_view to_string(FlowScenario s) {
  return s == FlowScenario::Pc1aEntryExit ? "pc1a-entry-exit" : "pc6-entry-exit";
}

std::optional<FlowScenario> parse_flow_scenario(std::string_view token) {
  if (token == "pc1a-entry-exit") return FlowScenario::Pc1aEntryExit;
  if (token == "pc6-entry-exit") return FlowScenario::Pc6EntryExit;
  return std::nullopt;
}

namespace {

class FlowDriver {
 public:
  FlowDriver(bool pc6, const PlatformProfile& prof)
      : pc6_(pc6), prof_(prof), st_(initial_state(prof.latency)) {}

  void step(FsmEventKind kind, TimeNs t) {
    const ApmuState before = st_;
    const FsmEvent ev{kind, t};
    StepResult r = pc6_ ? pc6_step(st_, sig_, ev, prof_.latency, prof_.pc6)
                        : apmu_step(st_, sig_, ev, prof_.latency);
    Json actions = Json::array();
    for (auto a : r.actions) actions.push_back(std::string(to_string(a)));
    Json s;
    s["t_ns"] = t;
    s["event"] = std::string(to_string(kind));
    s["from"] = std::string(to_string(before.package));
    s["to"] = std::string(to_string(r.state.package));
    s["pending"] = std::string(to_string(r.state.pending));
    s["actions"] = actions;
    s["signals"] = to_json(r.signals);
    s["latency_ns"] = r.latency_ns;
    s["rail_mv"] = r.state.rail.mv_at(t, prof_.latency.fivr_slew_mv_per_ns);
    s["dram"] = std::string(to_string(r.state.dram));
    s["io"] = std::string(to_string(r.state.io));
    steps_.push_back(s);

    if (r.latency_ns > 0 && r.state.pending == Pending::None) {
      const bool deep = r.state.package == PackageState::PC1A || r.state.package == PackageState::PC6;
      (deep ? entry_ns_ : exit_ns_) = r.latency_ns;
    }
    st_ = r.state;
    sig_ = r.signals;
  }

  void settle() {
    while (auto d = pc6_ ? pc6_next_due(st_) : apmu_next_due(st_)) step(d->kind, d->at_ns);
  }

  TimeNs now() const { return st_.now_ns; }

  Json finish(FlowScenario s) const {
    return {{"scenario", std::string(to_string(s))},
            {"steps", steps_},
            {"entry_latency_ns", entry_ns_},
            {"exit_latency_ns", exit_ns_},
            {"total_latency_ns", entry_ns_ + exit_ns_}};
  }

 private:
  bool pc6_;
  PlatformProfile prof_;
  ApmuState st_;
  SignalSet sig_{};
  Json steps_ = Json::array();
  TimeNs entry_ns_ = 0;
  TimeNs exit_ns_ = 0;
};

}  // namespace

Json flow_log(FlowScenario scenario, const PlatformProfile& profile) {
  if (scenario == FlowScenario::Pc1aEntryExit) {
    FlowDriver d(false, profile);
    const auto& lat = profile.latency;
    d.step(FsmEventKind::AllCoresEnteredCC1, 0);
    d.step(FsmEventKind::AllIosEnteredL0s, ceil_ns(lat.l0s_entry_fraction * lat.l0s_exit_ns));
    d.settle();
    d.step(FsmEventKind::IoWakeup, 1'000);
    d.settle();
    d.step(FsmEventKind::CoreInterrupt, d.now());
    return d.finish(scenario);
  }
  FlowDriver d(true, profile);
  d.step(FsmEventKind::AllCoresEnteredCC6, 0);
  d.settle();
  d.step(FsmEventKind::IoWakeup, std::max<TimeNs>(d.now(), 100'000));
  d.settle();
  return d.finish(scenario);
}

std::string render_flow_log(const Json& log) {
  std::ostringstream out;
  out << "scenario " << log.at("scenario").get<std::string>() << '\n';
  for (const auto& s : log.at("steps")) {
    char head[128];
    std::snprintf(head, sizeof head, "%10llu ns  %-18s %-8s -> %-8s",
                  static_cast<unsigned long long>(s.at("t_ns").get<TimeNs>()),
                  s.at("event").get<std::string>().c_str(), s.at("from").get<std::string>().c_str(),
                  s.at("to").get<std::string>().c_str());
    out << head;
    const std::string pending = s.at("pending").get<std::string>();
    if (pending != "None") out << " [" << pending << "]";
    const auto& actions = s.at("actions");
    if (!actions.empty()) {
      out << "  ";
      for (std::size_t i = 0; i < actions.size(); ++i) {
        out << (i ? ", " : "") << actions[i].get<std::string>();
      }
    }
    if (const auto lat = s.at("latency_ns").get<TimeNs>(); lat > 0) out << "  (" << lat << " ns)";
    out << '\n';
  }
  out << "entry " << log.at("entry_latency_ns").get<TimeNs>() << " ns, exit "
      << log.at("exit_latency_ns").get<TimeNs>() << " ns, total "
      << log.at("total_latency_ns").get<TimeNs>() << " ns\n";
  return out.str();
}

// ---- collation ----------------------------------------------------------------------

std::string table1_csv(const PowerProfile& p, const PlatformProfile& platform) {
  const TransitionBudget pc1a = transition_budget(platform.latency);
  const TransitionBudget pc6 = pc6_budget(platform.latency, platform.pc6);
  auto w = [](double v) { return fmt("%.1f", table_precision(v)); };
  std::ostringstream out;
  out << "package_state,cores_cstate,latency_ns,soc_w,dram_w,total_w\n";
  out << "PC0,>=1 CC0,0,,," << w(p.p_pc0_max) << '\n';
  out << "PC0_idle,all CC1,0," << w(p.p_pc0_idle_soc) << ',' << w(p.p_pc0_idle_dram) << ','
      << w(table_precision(p.p_pc0_idle_soc) + table_precision(p.p_pc0_idle_dram)) << '\n';
  out << "PC6,all CC6," << pc6.total_ns << ',' << w(p.p_pc6_soc) << ',' << w(p.p_pc6_dram) << ','
      << w(table_precision(p.p_pc6_soc) + table_precision(p.p_pc6_dram)) << '\n';
  out << "PC1A,all CC1," << pc1a.total_ns << ',' << w(p.p_pc1a_soc) << ',' << w(p.p_pc1a_dram) << ','
      << w(table_precision(p.p_pc1a_soc) + table_precision(p.p_pc1a_dram)) << '\n';
  return out.str();
}

std::string table1_csv(const PowerProfile& prof) {
  PlatformProfile platform;
  platform.power = prof;
  return table1_csv(prof, platform);
}

namespace {

std::string fig8_power_csv(const Json& sweep) {
  std::ostringstream out;
  out << "rate_per_s,utilization,baseline_power_w,pc1a_power_w,measured_savings,model_savings,"
         "pc1a_residency,all_idle_fraction\n";
  for (const auto& p : sweep.at("points")) {
    const Json& s = p.at("shallow");
    const Json& a = p.at("pc1a");
    out << p.at("rate_per_s").get<double>() << ',' << p.at("utilization").get<double>() << ','
        << s.at("avg_power_w").get<double>() << ',' << a.at("avg_power_w").get<double>() << ','
        << p.at("measured_savings").get<double>() << ',' << p.at("model_savings").get<double>() << ','
        << a.at("package_residency").at("PC1A").get<double>() << ','
        << s.at("all_idle_fraction").get<double>() << '\n';
  }
  return out.str();
}

std::string fig8_latency_csv(const Json& sweep) {
  std::ostringstream out;
  out << "rate_per_s,utilization,baseline_avg_ns,pc1a_avg_ns,baseline_p99_ns,pc1a_p99_ns,"
         "pc1a_avg_wake_penalty_ns,pc1a_package_wakes,latency_impact_fraction\n";
  for (const auto& p : sweep.at("points")) {
    const Json& s = p.at("shallow");
    const Json& a = p.at("pc1a");
    out << p.at("rate_per_s").get<double>() << ',' << p.at("utilization").get<double>() << ','
        << s.at("avg_end_to_end_ns").get<double>() << ',' << a.at("avg_end_to_end_ns").get<double>() << ','
        << s.at("p99_latency_ns").get<double>() << ',' << a.at("p99_latency_ns").get<double>() << ','
        << a.at("avg_wake_penalty_ns").get<double>() << ',' << a.at("package_wakes").get<std::size_t>()
        << ',';
    if (!p.at("latency_impact").is_null()) {
      out << p.at("latency_impact").at("relative_fraction").get<double>();
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

CollatedReport collate_reports(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

  CollatedReport out;
  PlatformProfile platform;
  platform.power = PowerProfile::table1();

  const fs::path sweep_path = dir / "sweep.json";
  const fs::path result_path = dir / "result.json";
  const fs::path profile_path = dir / "profile.json";
  std::optional<Json> sweep;
  if (fs::exists(sweep_path)) {
    sweep = read_json_file(sweep_path);
    out.sources.push_back(sweep_path.filename().string());
  }

  if (fs::exists(profile_path)) {
    platform = platform_from_json(read_json_file(profile_path));
    out.sources.push_back(profile_path.filename().string());
  } else {
    std::optional<Json> cfg;
    if (sweep) {
      cfg = sweep->at("config");
    } else if (fs::exists(result_path)) {
      cfg = read_json_file(result_path).at("config");
      out.sources.push_back(result_path.filename().string());
    }
    if (cfg) {
      const SimConfig c = sim_config_from_json(*cfg);
      platform = {c.power_profile, c.latency_profile, c.pc6_profile};
    }
  }

  out.table1_csv = table1_csv(platform.power, platform);
  if (sweep) {
    out.fig8_power_csv = fig8_power_csv(*sweep);
    out.fig8_latency_csv = fig8_latency_csv(*sweep);
  }
  return out;
}

}  // namespace pkgc
