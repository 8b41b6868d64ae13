#pragma once

#include <vector>

#include "pkgc/sim.hpp"

namespace pkgc {

struct SweepPoint {
  double rate_per_s = 0.0;
  SimResult result;
};

/// One run per rate, each with the config's seed (common random numbers across
/// the sweep). Rates must be sorted ascending. OpenMP-parallel across rates.
std::vector<SweepPoint> sweep_load(const SimConfig& config, const std::vector<double>& rates);

/// Serial reference for sweep_load.
std::vector<SweepPoint> sweep_load_serial(const SimConfig& config, const std::vector<double>& rates);

/// Shallow and Pc1a runs of the same request stream.
struct SavingsComparison {
  double rate_per_s = 0.0;
  SimResult shallow;
  SimResult pc1a;
  double measured_savings = 0.0;  // 1 - E_pc1a / E_shallow
  double model_savings = 0.0;     // pc1a_savings() on the measured residencies
};

SavingsComparison compare_policies(const SimConfig& config);

std::vector<SavingsComparison> savings_sweep(const SimConfig& config, const std::vector<double>& rates);
std::vector<SavingsComparison> savings_sweep_serial(const SimConfig& config,
                                                    const std::vector<double>& rates);

}  // namespace pkgc
