#include <cmath>

#include "doctest.h"
#include "pkgc/sim.hpp"
#include "pkgc/sweep.hpp"
#include "pkgc/fsm.hpp"
#include "pkgc/power_model.hpp"

using namespace pkgc;

namespace {

SimConfig base(Policy p, double util = 0.0) {
  SimConfig c;
  c.policy = p;
  c.duration_ns = 20'000'000;
  c.power_profile = PowerProfile::table1();
  c.arrivals.rate_per_s = rate_for_utilization(util, c.n_cores, c.service.mean_ns);
  return c;
}

}  // namespace

TEST_CASE("zero-load limits") {
  const auto prof = PowerProfile::table1();
  const auto s = run_sim(base(Policy::Shallow));
  CHECK(s.avg_power_w == doctest::Approx(prof.pc0_idle_total()).epsilon(0.01));
  CHECK(s.package(PackageState::PC0_idle) == doctest::Approx(1.0));

  const auto a = run_sim(base(Policy::Pc1a));
  CHECK(a.avg_power_w == doctest::Approx(prof.pc1a_total()).epsilon(0.01));
  CHECK(a.package(PackageState::PC1A) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(1.0 - a.avg_power_w / s.avg_power_w == doctest::Approx(0.412).epsilon(0.02));

  const auto d = run_sim(base(Policy::Deep));
  CHECK(d.avg_power_w == doctest::Approx(prof.pc6_total()).epsilon(0.01));
}

TEST_CASE("runs are deterministic") {
  const auto c = base(Policy::Pc1a, 0.1);
  const auto a = run_sim(c);
  const auto b = run_sim(c);
  CHECK(a.energy_joules == b.energy_joules);
  CHECK(a.requests_served == b.requests_served);
  CHECK(a.package_residency == b.package_residency);
  CHECK(a.p99_latency_ns == b.p99_latency_ns);

  auto other = c;
  other.seed = 2;
  CHECK(run_sim(other).energy_joules != a.energy_joules);
}

TEST_CASE("measured savings agree with the analytic model") {
  for (double u : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    const auto cmp = compare_policies(base(Policy::Pc1a, u));
    CHECK(std::abs(cmp.measured_savings - cmp.model_savings) < 1e-6);
    CHECK(cmp.shallow.requests_arrived == cmp.pc1a.requests_arrived);
  }
}

TEST_CASE("energy from residencies matches the segment integral") {
  for (auto p : {Policy::Shallow, Policy::Pc1a, Policy::Deep}) {
    const auto r = run_sim(base(p, 0.15));
    CHECK(r.energy_from_residency_joules == doctest::Approx(r.energy_joules).epsilon(1e-6));
    double sum = 0.0;
    for (double f : r.package_residency) sum += f;
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("latency bounds") {
  auto c = base(Policy::Pc1a, 0.1);
  c.service.kind = ServiceKind::Constant;
  const auto r = run_sim(c);
  REQUIRE(r.requests_served > 0);
  CHECK(r.avg_latency_ns >= c.service.mean_ns);
  CHECK(r.max_wake_penalty_ns <= transition_budget(c.latency_profile).exit_ns);
  CHECK(r.woken_requests > 0);

  auto d = base(Policy::Deep, 0.02);
  d.service.kind = ServiceKind::Constant;
  const auto rd = run_sim(d);
  REQUIRE(rd.woken_requests > 0);
  // requests that land mid-flow wait less; one that finds the package in PC6 pays the full exit
  CHECK(rd.max_wake_penalty_ns >= 50'000);
  CHECK(rd.min_wake_penalty_ns <= rd.max_wake_penalty_ns);
  CHECK(rd.avg_wake_penalty_ns > r.avg_wake_penalty_ns);
}

TEST_CASE("exported trace replays the run") {
  SUBCASE("idle cores sit in CC1") {
    auto c = base(Policy::Pc1a);
    c.n_cores = 2;
    c.capture_trace = true;
    const auto r = run_sim(c);
    const auto t = export_trace(r);
    REQUIRE(t.events.size() == 2);
    CHECK(t.events[0].state == CoreCState::CC1);
    CHECK(t.events[1].state == CoreCState::CC1);
  }
  SUBCASE("busy run") {
    auto c = base(Policy::Pc1a, 0.2);
    c.capture_trace = true;
    const auto r = run_sim(c);
    const auto t = export_trace(r);
    CHECK(t.n_cores == c.n_cores);
    const auto res = residency_by_state(t);
    for (std::size_t s = 0; s < kNumCoreStates; ++s) {
      CHECK(std::abs(res.aggregate[s] - r.core_residency_aggregate[s]) < 1e-9);
    }
    const auto idle = all_idle_intervals(t);
    CHECK(std::abs(idle.pc1a_residency_fraction - r.all_idle_fraction) < 1e-9);
    CHECK(idle.intervals.size() == r.all_idle_periods);
    // per core states alternate
    std::vector<int> last(t.n_cores, -1);
    for (const auto& e : t.events) {
      CHECK(static_cast<int>(e.state) != last[e.core_id]);
      last[e.core_id] = static_cast<int>(e.state);
    }
  }
}

TEST_CASE("overload and invalid configs") {
  auto c = base(Policy::Pc1a, 3.0);
  c.max_queue = 50;
  CHECK_THROWS_AS(run_sim(c), OverloadDetected);

  auto bad = base(Policy::Pc1a);
  bad.n_cores = 0;
  try {
    run_sim(bad);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.code() == "InvalidConfig");
  }
  bad = base(Policy::Pc1a);
  bad.arrivals.rate_per_s = -1.0;
  CHECK_THROWS_AS(run_sim(bad), ValidationError);
  bad = base(Policy::Pc1a);
  bad.warmup_ns = bad.duration_ns;
  CHECK_THROWS_AS(run_sim(bad), ValidationError);
}

TEST_CASE("sweeps") {
  const auto c = base(Policy::Pc1a);
  std::vector<double> rates;
  for (double u : {0.0, 0.05, 0.1, 0.3}) rates.push_back(rate_for_utilization(u, c.n_cores, c.service.mean_ns));
  const auto par = sweep_load(c, rates);
  const auto ser = sweep_load_serial(c, rates);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].result.energy_joules == ser[i].result.energy_joules);
    CHECK(par[i].result.package_residency == ser[i].result.package_residency);
  }
  CHECK(par[0].result.energy_joules == run_sim(c).energy_joules);

  const auto sp = savings_sweep(c, rates);
  const auto ss = savings_sweep_serial(c, rates);
  for (std::size_t i = 0; i < sp.size(); ++i) CHECK(sp[i].measured_savings == ss[i].measured_savings);

  CHECK_THROWS_AS(sweep_load(c, {2.0, 1.0}), ValidationError);
}
