#include "pkgc/domain.hpp"

#include <algorithm>
#include <cmath>

namespace pkgc {

std::string_view to_string(CoreCState s) {
  switch (s) {
    case CoreCState::CC0: return "CC0";
    case CoreCState::CC1: return "CC1";
    case CoreCState::CC1E: return "CC1E";
    case CoreCState::CC6: return "CC6";
  }
  return "?";
}

std::string_view to_string(IoLState s) {
  switch (s) {
    case IoLState::L0: return "L0";
    case IoLState::L0s: return "L0s";
    case IoLState::L0p: return "L0p";
    case IoLState::L1: return "L1";
    case IoLState::NDA: return "NDA";
  }
  return "?";
}

std::string_view to_string(DramPowerMode m) {
  switch (m) {
    case DramPowerMode::Active: return "Active";
    case DramPowerMode::CkeOff: return "CkeOff";
    case DramPowerMode::SelfRefresh: return "SelfRefresh";
  }
  return "?";
}

std::string_view to_string(PackageState s) {
  switch (s) {
    case PackageState::PC0: return "PC0";
    case PackageState::PC0_idle: return "PC0_idle";
    case PackageState::PC2: return "PC2";
    case PackageState::PC6: return "PC6";
    case PackageState::ACC1: return "ACC1";
    case PackageState::PC1A: return "PC1A";
  }
  return "?";
}

std::optional<CoreCState> parse_core_cstate(std::string_view token) {
  for (auto s : {CoreCState::CC0, CoreCState::CC1, CoreCState::CC1E, CoreCState::CC6}) {
    if (token == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<PackageState> parse_package_state(std::string_view token) {
  for (auto s : {PackageState::PC0, PackageState::PC0_idle, PackageState::PC2, PackageState::PC6,
                 PackageState::ACC1, PackageState::PC1A}) {
    if (token == to_string(s)) return s;
  }
  return std::nullopt;
}

bool ValidationResult::has(std::string_view name) const {
  return std::find(violations.begin(), violations.end(), name) != violations.end();
}

namespace {

void add_once(ValidationResult& r, std::string name) {
  if (!r.has(name)) r.violations.push_back(std::move(name));
}

// Relative-plus-absolute slack for comparing cached composed values.
bool close(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

// Cached value is the composed one, either exact or truncated to one decimal
// the way the platform power table quotes it.
bool matches_composed(double cached, double composed) {
  return close(cached, composed) || close(cached, std::floor(composed * 10.0 + 1e-9) / 10.0);
}

}  // namespace

ValidationResult validate_profile(const PowerProfile& p) {
  ValidationResult r;
  for (double w : {p.p_pc0_max, p.p_pc0_idle_soc, p.p_pc0_idle_dram, p.p_pc6_soc, p.p_pc6_dram,
                   p.p_cores_diff, p.p_ios_diff, p.p_dram_diff, p.p_pll_each, p.p_pc1a_soc,
                   p.p_pc1a_dram}) {
    if (!(w >= 0.0)) add_once(r, "nonnegative");
  }
  if (p.n_plls_awake < 0) add_once(r, "nonnegative");

  if (!(p.p_pc6_soc <= p.p_pc1a_soc && p.p_pc1a_soc <= p.p_pc0_idle_soc &&
        p.p_pc0_idle_soc <= p.p_pc0_max)) {
    add_once(r, "ordering");
  }

  const double soc = p.p_pc6_soc + p.p_cores_diff + p.p_ios_diff + p.n_plls_awake * p.p_pll_each;
  const double dram = p.p_pc6_dram + p.p_dram_diff;
  if (!matches_composed(p.p_pc1a_soc, soc) || !matches_composed(p.p_pc1a_dram, dram)) add_once(r, "composition");
  return r;
}

ValidationResult validate_latency_profile(const LatencyProfile& p) {
  ValidationResult r;
  if (!(p.v_nominal_mv > p.v_retention_mv)) add_once(r, "voltage_order");
  for (double ns : {p.l0s_exit_ns, p.cke_entry_ns, p.cke_exit_ns}) {
    if (!(ns >= 0.0)) add_once(r, "nonnegative_latency");
  }
  if (p.clock_gate_cycles < 0 || p.signal_assert_cycles < 0) add_once(r, "nonnegative_latency");
  if (!(p.pmu_clock_hz > 0.0)) add_once(r, "pmu_clock");
  if (!(p.fivr_slew_mv_per_ns > 0.0)) add_once(r, "slew_rate");
  if (!(p.l0s_entry_fraction >= 0.0 && p.l0s_entry_fraction <= 1.0)) add_once(r, "fraction_range");
  return r;
}

ValidationResult validate_pc6_profile(const Pc6Profile& p) {
  ValidationResult r;
  for (double ns : {p.firmware_entry_ns, p.firmware_exit_ns, p.io_l1_entry_ns, p.io_l1_exit_ns,
                    p.dram_sr_entry_ns, p.dram_sr_exit_ns, p.pll_off_ns, p.pll_relock_ns}) {
    if (!(ns >= 0.0)) add_once(r, "nonnegative_latency");
  }
  return r;
}

TimeNs ceil_ns(double ns) {
  if (!(ns > 0.0)) return 0;
  // Absorb representation noise so that e.g. 4.000000000001 stays 4.
  const double rounded = std::round(ns);
  if (std::fabs(ns - rounded) <= 1e-9 * std::max(1.0, rounded)) return static_cast<TimeNs>(rounded);
  return static_cast<TimeNs>(std::ceil(ns));
}

TimeNs cycles_to_ns(int cycles, double clock_hz) {
  if (cycles <= 0) return 0;
  return ceil_ns(static_cast<double>(cycles) * 1e9 / clock_hz);
}

}  // namespace pkgc
