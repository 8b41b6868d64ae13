#include "pkgc/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace pkgc {

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("InvalidJson", path.string() + ": " + e.what());
  }
}

namespace {

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string context, std::string code)
      : j_(j), ctx_(std::move(context)), code_(std::move(code)) {
    if (!j_.is_object()) fail("expected a JSON object");
  }

  template <class T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return false;
    try {
      if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_unsigned()) fail(std::string(key) + " must be a non-negative integer");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer()) fail(std::string(key) + " must be an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) fail(std::string(key) + " must be a number");
      }
      out = it->get<T>();
    } catch (const Json::exception& e) {
      fail(std::string(key) + ": " + e.what());
    }
    return true;
  }

  template <class T>
  bool get(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return false;
    if (it->is_null()) {
      out.reset();
      return true;
    }
    T v{};
    get(key, v);
    out = v;
    return true;
  }

  const Json* sub(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class E, class Parse>
  void get_enum(const char* key, E& out, Parse parse) {
    std::string token;
    if (!get(key, token)) return;
    const auto v = parse(token);
    if (!v) fail(std::string(key) + ": unknown value \"" + token + "\"");
    out = *v;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail("unknown key \"" + k + "\"");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(code_, ctx_ + ": " + what);
  }

 private:
  const Json& j_;
  std::string ctx_;
  std::string code_;
  std::set<std::string> seen_;
};

constexpr const char* kProfileCode = "InvalidProfile";
constexpr const char* kConfigCode = "InvalidConfig";

}  // namespace

// ---- profiles ---------------------------------------------------------------

Json to_json(const PowerProfile& p) {
  return {{"p_pc0_max", p.p_pc0_max},         {"p_pc0_idle_soc", p.p_pc0_idle_soc},
          {"p_pc0_idle_dram", p.p_pc0_idle_dram}, {"p_pc6_soc", p.p_pc6_soc},
          {"p_pc6_dram", p.p_pc6_dram},       {"p_cores_diff", p.p_cores_diff},
          {"p_ios_diff", p.p_ios_diff},       {"p_dram_diff", p.p_dram_diff},
          {"p_pll_each", p.p_pll_each},       {"n_plls_awake", p.n_plls_awake},
          {"p_pc1a_soc", p.p_pc1a_soc},       {"p_pc1a_dram", p.p_pc1a_dram}};
}

PowerProfile power_profile_from_json(const Json& j) {
  PowerProfile p;
  ObjectReader r(j, "power profile", kProfileCode);
  r.get("p_pc0_max", p.p_pc0_max);
  r.get("p_pc0_idle_soc", p.p_pc0_idle_soc);
  r.get("p_pc0_idle_dram", p.p_pc0_idle_dram);
  r.get("p_pc6_soc", p.p_pc6_soc);
  r.get("p_pc6_dram", p.p_pc6_dram);
  r.get("p_cores_diff", p.p_cores_diff);
  r.get("p_ios_diff", p.p_ios_diff);
  r.get("p_dram_diff", p.p_dram_diff);
  r.get("p_pll_each", p.p_pll_each);
  r.get("n_plls_awake", p.n_plls_awake);
  const bool has_soc = r.get("p_pc1a_soc", p.p_pc1a_soc);
  const bool has_dram = r.get("p_pc1a_dram", p.p_pc1a_dram);
  r.finish();
  // Derived fields left out of the file are composed from the components.
  if (!has_soc) p.p_pc1a_soc = p.p_pc6_soc + p.p_cores_diff + p.p_ios_diff + p.n_plls_awake * p.p_pll_each;
  if (!has_dram) p.p_pc1a_dram = p.p_pc6_dram + p.p_dram_diff;
  if (auto v = validate_profile(p); !v.ok()) r.fail("violates " + v.violations.front());
  return p;
}

Json to_json(const LatencyProfile& p) {
  return {{"pmu_clock_hz", p.pmu_clock_hz},
          {"l0s_exit_ns", p.l0s_exit_ns},
          {"l0s_entry_fraction", p.l0s_entry_fraction},
          {"cke_entry_ns", p.cke_entry_ns},
          {"cke_exit_ns", p.cke_exit_ns},
          {"fivr_slew_mv_per_ns", p.fivr_slew_mv_per_ns},
          {"v_nominal_mv", p.v_nominal_mv},
          {"v_retention_mv", p.v_retention_mv},
          {"clock_gate_cycles", p.clock_gate_cycles},
          {"signal_assert_cycles", p.signal_assert_cycles}};
}

LatencyProfile latency_profile_from_json(const Json& j) {
  LatencyProfile p;
  ObjectReader r(j, "latency profile", kProfileCode);
  r.get("pmu_clock_hz", p.pmu_clock_hz);
  r.get("l0s_exit_ns", p.l0s_exit_ns);
  r.get("l0s_entry_fraction", p.l0s_entry_fraction);
  r.get("cke_entry_ns", p.cke_entry_ns);
  r.get("cke_exit_ns", p.cke_exit_ns);
  r.get("fivr_slew_mv_per_ns", p.fivr_slew_mv_per_ns);
  r.get("v_nominal_mv", p.v_nominal_mv);
  r.get("v_retention_mv", p.v_retention_mv);
  r.get("clock_gate_cycles", p.clock_gate_cycles);
  r.get("signal_assert_cycles", p.signal_assert_cycles);
  r.finish();
  if (auto v = validate_latency_profile(p); !v.ok()) r.fail("violates " + v.violations.front());
  return p;
}

Json to_json(const Pc6Profile& p) {
  return {{"firmware_entry_ns", p.firmware_entry_ns}, {"firmware_exit_ns", p.firmware_exit_ns},
          {"io_l1_entry_ns", p.io_l1_entry_ns},       {"io_l1_exit_ns", p.io_l1_exit_ns},
          {"dram_sr_entry_ns", p.dram_sr_entry_ns},   {"dram_sr_exit_ns", p.dram_sr_exit_ns},
          {"pll_off_ns", p.pll_off_ns},               {"pll_relock_ns", p.pll_relock_ns}};
}

Pc6Profile pc6_profile_from_json(const Json& j) {
  Pc6Profile p;
  ObjectReader r(j, "pc6 profile", kProfileCode);
  r.get("firmware_entry_ns", p.firmware_entry_ns);
  r.get("firmware_exit_ns", p.firmware_exit_ns);
  r.get("io_l1_entry_ns", p.io_l1_entry_ns);
  r.get("io_l1_exit_ns", p.io_l1_exit_ns);
  r.get("dram_sr_entry_ns", p.dram_sr_entry_ns);
  r.get("dram_sr_exit_ns", p.dram_sr_exit_ns);
  r.get("pll_off_ns", p.pll_off_ns);
  r.get("pll_relock_ns", p.pll_relock_ns);
  r.finish();
  if (auto v = validate_pc6_profile(p); !v.ok()) r.fail("violates " + v.violations.front());
  return p;
}

Json to_json(const PlatformProfile& p) {
  return {{"power", to_json(p.power)}, {"latency", to_json(p.latency)}, {"pc6", to_json(p.pc6)}};
}

PlatformProfile platform_from_json(const Json& j) {
  PlatformProfile p;
  ObjectReader r(j, "profile", kProfileCode);
  if (const Json* s = r.sub("power")) p.power = power_profile_from_json(*s);
  if (const Json* s = r.sub("latency")) p.latency = latency_profile_from_json(*s);
  if (const Json* s = r.sub("pc6")) p.pc6 = pc6_profile_from_json(*s);
  r.finish();
  return p;
}

// ---- simulation config --------------------------------------------------------

Json to_json(const GovernorConfig& g) {
  return {{"cc1e_after_ns", g.cc1e_after_ns},
          {"cc6_after_ns", g.cc6_after_ns},
          {"cc1_exit_ns", g.cc1_exit_ns},
          {"cc1e_exit_ns", g.cc1e_exit_ns},
          {"cc6_exit_ns", g.cc6_exit_ns}};
}

Json to_json(const SimConfig& c) {
  Json j;
  j["n_cores"] = c.n_cores;
  j["arrivals"] = {{"kind", std::string(to_string(c.arrivals.kind))},
                   {"rate_per_s", c.arrivals.rate_per_s},
                   {"burst_on_ns", c.arrivals.burst_on_ns},
                   {"burst_off_ns", c.arrivals.burst_off_ns}};
  j["service"] = {{"kind", std::string(to_string(c.service.kind))}, {"mean_ns", c.service.mean_ns}};
  j["policy"] = std::string(to_string(c.policy));
  j["power_profile"] = to_json(c.power_profile);
  j["latency_profile"] = to_json(c.latency_profile);
  j["pc6_profile"] = to_json(c.pc6_profile);
  j["governor"] = to_json(c.governor);
  j["duration_ns"] = c.duration_ns;
  j["warmup_ns"] = c.effective_warmup_ns();
  j["seed"] = c.seed;
  j["network_latency_ns"] = c.network_latency_ns;
  j["p_core_active_w"] = c.effective_core_active_w();
  j["gpmu_timer_period_ns"] = c.gpmu_timer_period_ns;
  j["max_queue"] = c.max_queue;
  j["capture_trace"] = c.capture_trace;
  j["capture_latencies"] = c.capture_latencies;
  return j;
}

SimConfig sim_config_from_json(const Json& j) {
  SimConfig c;
  ObjectReader r(j, "config", kConfigCode);
  r.get("n_cores", c.n_cores);
  if (const Json* s = r.sub("arrivals")) {
    ObjectReader a(*s, "config.arrivals", kConfigCode);
    a.get_enum("kind", c.arrivals.kind, parse_arrival_kind);
    a.get("rate_per_s", c.arrivals.rate_per_s);
    a.get("burst_on_ns", c.arrivals.burst_on_ns);
    a.get("burst_off_ns", c.arrivals.burst_off_ns);
    a.finish();
  }
  if (const Json* s = r.sub("service")) {
    ObjectReader a(*s, "config.service", kConfigCode);
    a.get_enum("kind", c.service.kind, parse_service_kind);
    a.get("mean_ns", c.service.mean_ns);
    a.finish();
  }
  r.get_enum("policy", c.policy, parse_policy);
  if (const Json* s = r.sub("power_profile")) c.power_profile = power_profile_from_json(*s);
  if (const Json* s = r.sub("latency_profile")) c.latency_profile = latency_profile_from_json(*s);
  if (const Json* s = r.sub("pc6_profile")) c.pc6_profile = pc6_profile_from_json(*s);
  if (const Json* s = r.sub("governor")) {
    ObjectReader g(*s, "config.governor", kConfigCode);
    g.get("cc1e_after_ns", c.governor.cc1e_after_ns);
    g.get("cc6_after_ns", c.governor.cc6_after_ns);
    g.get("cc1_exit_ns", c.governor.cc1_exit_ns);
    g.get("cc1e_exit_ns", c.governor.cc1e_exit_ns);
    g.get("cc6_exit_ns", c.governor.cc6_exit_ns);
    g.finish();
  }
  r.get("duration_ns", c.duration_ns);
  r.get("warmup_ns", c.warmup_ns);
  r.get("seed", c.seed);
  r.get("network_latency_ns", c.network_latency_ns);
  r.get("p_core_active_w", c.p_core_active_w);
  r.get("gpmu_timer_period_ns", c.gpmu_timer_period_ns);
  r.get("max_queue", c.max_queue);
  r.get("capture_trace", c.capture_trace);
  r.get("capture_latencies", c.capture_latencies);
  r.finish();
  validate_config(c);
  return c;
}

// ---- results ------------------------------------------------------------------

Json to_json(const StateFractions& f) {
  Json j = Json::object();
  for (auto s : {CoreCState::CC0, CoreCState::CC1, CoreCState::CC1E, CoreCState::CC6}) {
    j[std::string(to_string(s))] = f[static_cast<std::size_t>(s)];
  }
  return j;
}

Json to_json(const SimResult& r) {
  Json pkg = Json::object();
  for (auto s : {PackageState::PC0, PackageState::PC0_idle, PackageState::PC2, PackageState::PC6,
                 PackageState::ACC1, PackageState::PC1A}) {
    pkg[std::string(to_string(s))] = r.package(s);
  }
  Json per_core = Json::array();
  for (const auto& f : r.core_residency) per_core.push_back(to_json(f));

  Json j;
  j["policy"] = std::string(to_string(r.policy));
  j["arrival_rate_per_s"] = r.arrival_rate_per_s;
  j["window_ns"] = r.window_ns;
  j["package_residency"] = pkg;
  j["core_residency"] = per_core;
  j["core_residency_aggregate"] = to_json(r.core_residency_aggregate);
  j["all_idle_fraction"] = r.all_idle_fraction;
  j["all_idle_periods"] = r.all_idle_periods;
  j["pc1a_transitions"] = r.pc1a_transitions;
  j["pc6_transitions"] = r.pc6_transitions;
  j["package_wakes"] = r.package_wakes;
  j["energy_joules"] = r.energy_joules;
  j["energy_from_residency_joules"] = r.energy_from_residency_joules;
  j["avg_power_w"] = r.avg_power_w;
  j["p_pc0_at_load_w"] = r.p_pc0_at_load_w;
  j["requests_arrived"] = r.requests_arrived;
  j["requests_served"] = r.requests_served;
  j["avg_latency_ns"] = r.avg_latency_ns;
  j["p99_latency_ns"] = r.p99_latency_ns;
  j["avg_service_ns"] = r.avg_service_ns;
  j["avg_wake_penalty_ns"] = r.avg_wake_penalty_ns;
  j["max_wake_penalty_ns"] = r.max_wake_penalty_ns;
  j["min_wake_penalty_ns"] = r.min_wake_penalty_ns;
  j["woken_requests"] = r.woken_requests;
  j["network_latency_ns"] = r.network_latency_ns;
  j["avg_end_to_end_ns"] = r.avg_end_to_end_ns();
  return j;
}

Json to_json(const Histogram& h) {
  Json bins = Json::array();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    Json b;
    b["lower_ns"] = h.lower(i);
    if (h.upper_edges[i] == Histogram::kInfinity) {
      b["upper_ns"] = nullptr;
    } else {
      b["upper_ns"] = h.upper_edges[i];
    }
    b["count"] = h.counts[i];
    bins.push_back(b);
  }
  return bins;
}

Json to_json(const IdleIntervalReport& r, bool with_intervals) {
  Json j;
  j["window_ns"] = r.window_ns;
  j["total_idle_ns"] = r.total_idle_ns;
  j["pc1a_residency_fraction"] = r.pc1a_residency_fraction;
  j["n_transitions"] = r.n_transitions;
  j["n_intervals"] = r.intervals.size();
  j["histogram"] = to_json(r.histogram);
  if (with_intervals) {
    Json iv = Json::array();
    for (const auto& i : r.intervals) iv.push_back({i.start_ns, i.end_ns});
    j["intervals"] = iv;
  }
  return j;
}

Json to_json(const ResidencyReport& r) {
  Json per_core = Json::array();
  for (const auto& f : r.per_core) per_core.push_back(to_json(f));
  return {{"per_core", per_core}, {"aggregate", to_json(r.aggregate)}};
}

Json to_json(const TransitionBudget& b) {
  return {{"entry_ns", b.entry_ns}, {"exit_ns", b.exit_ns}, {"total_ns", b.total_ns}};
}

Json to_json(const LatencyImpact& li) {
  return {{"added_avg_ns", li.added_avg_ns}, {"relative_fraction", li.relative_fraction}};
}

Json to_json(const SignalSet& s) {
  return {{"InCC1", s.in_cc1},           {"AllowL0s", s.allow_l0s}, {"InL0s", s.in_l0s},
          {"Allow_CKE_OFF", s.allow_cke_off}, {"Ret", s.ret},         {"PwrOk", s.pwr_ok},
          {"ClkGated", s.clk_gated},     {"InPC1A", s.in_pc1a},     {"GPMU_wakeup", s.gpmu_wakeup}};
}

}  // namespace pkgc
