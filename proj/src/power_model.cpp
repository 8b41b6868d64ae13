#include "pkgc/power_model.hpp"

#include <cmath>

namespace pkgc {

namespace {

constexpr double kResidencyTolerance = 1e-9;

void check_fraction(double v, const char* name) {
  if (!(v >= -kResidencyTolerance && v <= 1.0 + kResidencyTolerance)) {
    throw InvalidResidency(std::string(name) + " outside [0,1]");
  }
}

void check_baseline(const ResidencyVector& res) {
  check_fraction(res.r_pc0, "r_pc0");
  check_fraction(res.r_pc0_idle, "r_pc0_idle");
  if (std::fabs(res.r_pc0 + res.r_pc0_idle - 1.0) > kResidencyTolerance) {
    throw InvalidResidency("baseline residencies must sum to 1");
  }
}

}  // namespace

Watts baseline_power(const ResidencyVector& res, const PowerProfile& prof, Watts p_pc0_at_load) {
  check_baseline(res);
  return res.r_pc0 * p_pc0_at_load + res.r_pc0_idle * prof.pc0_idle_total();
}

double pc1a_savings(const ResidencyVector& res, const PowerProfile& prof, Watts p_pc0_at_load) {
  const Watts baseline = baseline_power(res, prof, p_pc0_at_load);
  const double r_pc1a = res.pc1a();
  check_fraction(r_pc1a, "r_pc1a");
  if (r_pc1a > res.r_pc0_idle + kResidencyTolerance) {
    throw InvalidResidency("r_pc1a exceeds the baseline idle residency");
  }
  if (!(baseline > 0.0)) throw DegenerateBaseline("baseline power is zero");
  return r_pc1a * (prof.pc0_idle_total() - prof.pc1a_total()) / baseline;
}

Watts pll_power(int n_plls, Watts p_each) {
  if (n_plls < 0) throw std::invalid_argument("negative PLL count");
  return n_plls * p_each;
}

Pc1aPower compose_pc1a_power(const PowerProfile& prof) {
  Pc1aPower out;
  out.soc = prof.p_pc6_soc + prof.p_cores_diff + prof.p_ios_diff +
            pll_power(prof.n_plls_awake, prof.p_pll_each);
  out.dram = prof.p_pc6_dram + prof.p_dram_diff;
  return out;
}

PowerProfile with_composed_pc1a(PowerProfile prof) {
  const auto composed = compose_pc1a_power(prof);
  prof.p_pc1a_soc = composed.soc;
  prof.p_pc1a_dram = composed.dram;
  return prof;
}

double table_precision(Watts w) {
  // Nudge so that values like 29.1 that sit a hair under their decimal survive.
  return std::floor(w * 10.0 + 1e-9) / 10.0;
}

}  // namespace pkgc
