#include "pkgc/sweep.hpp"

#include <algorithm>
#include <exception>

#include "pkgc/power_model.hpp"

namespace pkgc {

namespace {

void check_rates(const std::vector<double>& rates) {
  if (!std::is_sorted(rates.begin(), rates.end())) {
    throw ValidationError("InvalidConfig", "sweep rates must be sorted ascending");
  }
}

SimConfig at_rate(SimConfig c, double rate) {
  c.arrivals.rate_per_s = rate;
  return c;
}

// Runs body(i) for i in [0, n) across OpenMP threads; the first exception by
// index is rethrown after the loop.
template <class Body>
void parallel_indices(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::vector<SweepPoint> sweep_load_serial(const SimConfig& config, const std::vector<double>& rates) {
  check_rates(rates);
  std::vector<SweepPoint> out;
  out.reserve(rates.size());
  for (double r : rates) out.push_back({r, run_sim(at_rate(config, r))});
  return out;
}

std::vector<SweepPoint> sweep_load(const SimConfig& config, const std::vector<double>& rates) {
  check_rates(rates);
  validate_config(config);
  std::vector<SweepPoint> out(rates.size());
  parallel_indices(rates.size(), [&](std::size_t i) {
    out[i] = {rates[i], run_sim(at_rate(config, rates[i]))};
  });
  return out;
}

SavingsComparison compare_policies(const SimConfig& config) {
  SimConfig shallow = config;
  shallow.policy = Policy::Shallow;
  SimConfig pc1a = config;
  pc1a.policy = Policy::Pc1a;

  SavingsComparison c;
  c.rate_per_s = config.arrivals.rate_per_s;
  c.shallow = run_sim(shallow);
  c.pc1a = run_sim(pc1a);
  c.measured_savings = 1.0 - c.pc1a.energy_joules / c.shallow.energy_joules;

  ResidencyVector res;
  res.r_pc0 = c.shallow.package(PackageState::PC0);
  res.r_pc0_idle = c.shallow.package(PackageState::PC0_idle);
  res.r_pc1a = c.pc1a.package(PackageState::PC1A);
  c.model_savings = pc1a_savings(res, config.power_profile, c.shallow.p_pc0_at_load_w);
  return c;
}

std::vector<SavingsComparison> savings_sweep_serial(const SimConfig& config,
                                                    const std::vector<double>& rates) {
  check_rates(rates);
  std::vector<SavingsComparison> out;
  out.reserve(rates.size());
  for (double r : rates) out.push_back(compare_policies(at_rate(config, r)));
  return out;
}

std::vector<SavingsComparison> savings_sweep(const SimConfig& config, const std::vector<double>& rates) {
  check_rates(rates);
  validate_config(config);
  std::vector<SavingsComparison> out(rates.size());
  parallel_indices(rates.size(), [&](std::size_t i) { out[i] = compare_policies(at_rate(config, rates[i])); });
  return out;
}

}  // namespace pkgc
