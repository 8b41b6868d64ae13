#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "pkgc/domain.hpp"

namespace pkgc {

/// Package residencies for a baseline (PC0 / PC0_idle) timeline, plus the PC1A
/// residency of the PC1A-enabled scenario. When r_pc1a is absent it is taken to
/// equal r_pc0_idle: every all-cores-idle instant of the baseline becomes PC1A.
struct ResidencyVector {
  double r_pc0 = 0.0;
  double r_pc0_idle = 1.0;
  std::optional<double> r_pc1a;
  std::optional<double> r_pc6;

  double pc1a() const { return r_pc1a.value_or(r_pc0_idle); }
};

class InvalidResidency : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateBaseline : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Residency-weighted baseline power. p_pc0_at_load is the average SoC+DRAM power
/// while at least one core is active; it is a measured input, not modelled here.
Watts baseline_power(const ResidencyVector& res, const PowerProfile& prof, Watts p_pc0_at_load);

/// Fractional savings of the PC1A scenario relative to the baseline.
/// Requires r_pc1a <= r_pc0_idle: PC1A can only occupy baseline idle time.
double pc1a_savings(const ResidencyVector& res, const PowerProfile& prof, Watts p_pc0_at_load);

struct Pc1aPower {
  Watts soc = 0.0;
  Watts dram = 0.0;
  Watts total() const { return soc + dram; }
};

/// PC1A keeps the PC6 floor and adds back what PC6 turns off but PC1A leaves on:
/// cores at CC1 instead of CC6, IOs in L0s/L0p instead of L1, the awake PLLs, and
/// DRAM in CKE-off instead of self-refresh.
Pc1aPower compose_pc1a_power(const PowerProfile& prof);

/// Returns a copy with p_pc1a_* refreshed from the component fields.
PowerProfile with_composed_pc1a(PowerProfile prof);

Watts pll_power(int n_plls, Watts p_each);

/// Truncates to one decimal, the precision the platform power table is quoted at.
double table_precision(Watts w);

}  // namespace pkgc
