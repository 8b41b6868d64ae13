// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fsm_model_check.hpp"
#include "oracles.hpp"
#include "pkgc/fsm.hpp"
#include "pkgc/json_io.hpp"
#include "pkgc/power_model.hpp"
#include "pkgc/reports.hpp"
#include "pkgc/sim.hpp"
#include "pkgc/sweep.hpp"
#include "pkgc/trace.hpp"

using namespace pkgc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d: %s - %s:%s\n", n, o.pass ? "PASS" : "FAIL", title, o.detail.str().c_str());
  std::fflush(stdout);
}

SimConfig load_config(Policy p, double util, std::uint64_t seed = 1) {
  SimConfig c;
  c.policy = p;
  c.power_profile = PowerProfile::table1();
  c.duration_ns = 100'000'000;
  c.seed = seed;
  c.arrivals.rate_per_s = rate_for_utilization(util, c.n_cores, c.service.mean_ns);
  return c;
}

double median3(double a, double b, double c) { return std::max(std::min(a, b), std::min(std::max(a, b), c)); }

}  // namespace

int main() {
  criterion(1, "PC1A power composes from the component deltas", [](Outcome& o) {
    const Pc1aPower p = compose_pc1a_power(PowerProfile::skx_default());
    o.detail << " soc " << p.soc << " W, dram " << p.dram << " W";
    o.require(std::abs(p.soc - 27.556) < 1e-9, "soc == 27.556");
    o.require(std::abs(p.dram - 1.61) < 1e-9, "dram == 1.61");
    o.require(std::abs(p.soc - 27.5) <= 0.1, "soc within 0.1 W of 27.5");
    o.require(std::abs(p.dram - 1.6) <= 0.1, "dram within 0.1 W of 1.6");
    o.require(validate_profile(PowerProfile::skx_default()).ok(), "default profile valid");
  });

  criterion(2, "full-idle savings", [](Outcome& o) {
    const PowerProfile prof = PowerProfile::table1();
    const double s = pc1a_savings({0.0, 1.0, 1.0, {}}, prof, prof.p_pc0_max);
    const double composed = pc1a_savings({0.0, 1.0, 1.0, {}}, PowerProfile::skx_default(), prof.p_pc0_max);
    const Json rep = estimate_power_report(prof, 1.0, std::nullopt);
    o.detail << " " << rep.at("savings_percent").get<std::string>() << " (composed profile "
             << composed * 100.0 << "%)";
    o.require(std::abs(s - 0.412) <= 0.005, "41.2% +- 0.5 pp");
    o.require(std::abs(composed - 0.412) <= 0.005, "composed profile also within 0.5 pp");
    o.require(render_estimate_power(rep).find("41.2% (idle)") != std::string::npos, "rendered 41.2%");
  });

  criterion(3, "transition budgets", [](Outcome& o) {
    const TransitionBudget a = transition_budget({});
    const TransitionBudget b = pc6_budget({}, {});
    const double ratio = static_cast<double>(b.total_ns) / static_cast<double>(a.total_ns);
    o.detail << " PC1A " << a.entry_ns << "+" << a.exit_ns << "=" << a.total_ns << " ns, PC6 " << b.total_ns
             << " ns (" << ratio << "x)";
    o.require(a.entry_ns >= 16 && a.entry_ns <= 20, "entry 18 +- 2 ns");
    o.require(a.exit_ns <= 150, "exit <= 150 ns");
    o.require(a.total_ns <= 200, "total <= 200 ns");
    o.require(b.exit_ns >= 50'000, "PC6 exit >= 50 us");
    o.require(ratio >= 250.0, "PC6 >= 250x PC1A");
  });

  criterion(4, "APMU model check and round-trip restore", [](Outcome& o) {
    const auto t0 = Clock::now();
    const auto rep = model_check::explore();
    const double secs = seconds_since(t0);
    o.detail << " " << rep.control_states << " control states, " << rep.abstract_states << " abstract states, "
             << rep.transitions << " transitions, fixpoint at depth " << rep.depth << " in " << secs << " s";
    for (const auto& v : rep.violations) o.require(false, v);
    o.require(secs < 1.0, "exploration under 1 s");
    o.require(rep.abstract_states <= 300, "a few hundred states at most");
    std::mt19937_64 rng(99);
    for (const auto& v : model_check::random_walks(rng, 2000, 40)) o.require(false, v);

    for (auto wake : {FsmEventKind::IoWakeup, FsmEventKind::GpmuWakeup}) {
      ApmuState s = initial_state({});
      SignalSet g;
      TimeNs lat = 0;
      auto step = [&](FsmEventKind k, TimeNs t) {
        const auto r = apmu_step(s, g, {k, t});
        s = r.state;
        g = r.signals;
        lat += r.latency_ns;
      };
      auto settle = [&] {
        while (auto d = apmu_next_due(s)) step(d->kind, d->at_ns);
      };
      step(FsmEventKind::AllCoresEnteredCC1, 0);
      step(FsmEventKind::AllIosEnteredL0s, 0);
      settle();
      o.require(s.package == PackageState::PC1A && g.in_pc1a, "reached PC1A");
      step(wake, s.now_ns);
      settle();
      step(FsmEventKind::CoreInterrupt, s.now_ns);
      o.require(s.package == PackageState::PC0 && g == SignalSet{} && s.dram == DramPowerMode::Active &&
                    s.io == IoLState::L0 && s.rail.mv_at(s.now_ns, 2.0) == 800.0,
                "baseline restored");
      o.require(lat <= 168, "round trip <= 168 ns");
    }
  });

  criterion(5, "all-idle analysis matches the brute-force oracle", [](Outcome& o) {
    std::mt19937_64 rng(2024);
    std::vector<CStateTrace> traces;
    traces.reserve(1000);
    for (int i = 0; i < 1000; ++i) traces.push_back(oracle::random_trace(rng, 8, 1'000'000));

    const auto t0 = Clock::now();
    const auto reports = analyze_traces(traces);
    const double analyze_secs = seconds_since(t0);

    std::size_t mismatches = 0;
    std::size_t floor_breaks = 0;
    std::size_t intervals = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const auto expect = oracle::idle_intervals(traces[i]);
      intervals += expect.size();
      TimeNs idle = 0;
      for (const auto& iv : expect) idle += iv.duration();
      if (reports[i].intervals != expect || reports[i].total_idle_ns != idle) ++mismatches;
      double prev = 2.0;
      for (TimeNs f : {TimeNs{0}, TimeNs{100}, TimeNs{1'000}, TimeNs{10'000}, TimeNs{100'000}}) {
        const double r = apply_sampling_floor(reports[i], f).pc1a_residency_fraction;
        if (r > prev) ++floor_breaks;
        prev = r;
      }
    }
    const double total_secs = seconds_since(t0);
    o.detail << " 1000 traces, " << intervals << " intervals, analysis " << analyze_secs << " s, with oracle "
             << total_secs << " s";
    o.require(mismatches == 0, std::to_string(mismatches) + " traces differ from the oracle");
    o.require(floor_breaks == 0, "residency non-increasing in the sampling floor");
    o.require(total_secs < 30.0, "under 30 s");
  });

  criterion(6, "simulator limits and savings consistency", [](Outcome& o) {
    const PowerProfile prof = PowerProfile::table1();
    const SimResult s = run_sim(load_config(Policy::Shallow, 0.0));
    const SimResult a = run_sim(load_config(Policy::Pc1a, 0.0));
    o.detail << " zero load " << s.avg_power_w << " W / " << a.avg_power_w << " W;";
    o.require(std::abs(s.avg_power_w / prof.pc0_idle_total() - 1.0) <= 0.01, "shallow idle within 1%");
    o.require(std::abs(a.avg_power_w / prof.pc1a_total() - 1.0) <= 0.01, "PC1A idle within 1%");
    double worst = 0.0;
    for (double u : {0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5}) {
      const auto cmp = compare_policies(load_config(Policy::Pc1a, u));
      worst = std::max(worst, std::abs(cmp.measured_savings - cmp.model_savings));
    }
    o.detail << " worst |measured - model| " << worst;
    o.require(worst <= 1e-6, "savings agree within 1e-6");
  });

  criterion(7, "latency impact at low load", [](Outcome& o) {
    const TimeNs cost = transition_budget({}).total_ns;
    for (double u : {0.05, 0.10, 0.15, 0.20}) {
      const SimResult r = run_sim(load_config(Policy::Pc1a, u));
      const LatencyImpact li = latency_impact(r.package_wakes, cost, r.requests_served, r.network_latency_ns);
      const double measured = r.avg_wake_penalty_ns / r.avg_end_to_end_ns();
      o.detail << " u=" << u << ": " << li.relative_fraction << " (measured " << measured << ")";
      o.require(li.relative_fraction < 1e-3, "relative impact < 0.1% at u=" + std::to_string(u));
      o.require(measured < 1e-3, "measured penalty < 0.1% at u=" + std::to_string(u));
    }
  });

  criterion(8, "load curves (substitute properties: savings and PC1A residency fall with load, trace replay)", [](Outcome& o) {
    const std::vector<double> utils{0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
    std::vector<double> rates;
    for (double u : utils) rates.push_back(rate_for_utilization(u, 10, 20'000.0));
    std::vector<std::array<double, 3>> sav(utils.size()), res(utils.size());
    for (std::uint64_t seed : {1, 2, 3}) {
      SimConfig c = load_config(Policy::Pc1a, 0.0, seed);
      c.duration_ns = 50'000'000;
      const auto pts = savings_sweep(c, rates);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        sav[i][seed - 1] = pts[i].measured_savings;
        res[i][seed - 1] = pts[i].pc1a.package(PackageState::PC1A);
      }
    }
    double prev_s = 2.0;
    double prev_r = 2.0;
    for (std::size_t i = 0; i < utils.size(); ++i) {
      const double ms = median3(sav[i][0], sav[i][1], sav[i][2]);
      const double mr = median3(res[i][0], res[i][1], res[i][2]);
      o.detail << " u=" << utils[i] << ": " << ms * 100.0 << "%/" << mr;
      o.require(ms <= prev_s, "savings non-increasing at u=" + std::to_string(utils[i]));
      o.require(mr <= prev_r, "residency non-increasing at u=" + std::to_string(utils[i]));
      prev_s = ms;
      prev_r = mr;
    }

    SimConfig c = load_config(Policy::Pc1a, 0.15);
    c.duration_ns = 20'000'000;
    c.capture_trace = true;
    const SimResult r = run_sim(c);
    std::ostringstream csv;
    write_trace_csv(csv, export_trace(r));
    const CStateTrace back = parse_trace_string(csv.str());
    const auto idle = all_idle_intervals(back);
    o.require(std::abs(idle.pc1a_residency_fraction - r.all_idle_fraction) < 1e-9, "trace replay all-idle");
    const auto agg = residency_by_state(back).aggregate;
    for (std::size_t s = 0; s < kNumCoreStates; ++s) {
      o.require(std::abs(agg[s] - r.core_residency_aggregate[s]) < 1e-9, "trace replay residency");
    }
  });

  criterion(9, "JSON output is byte-identical across runs", [](Outcome& o) {
    SimConfig c = load_config(Policy::Pc1a, 0.1);
    c.duration_ns = 20'000'000;
    const std::string a = dump(simulate_report(c, run_sim(c)));
    const std::string b = dump(simulate_report(c, run_sim(c)));
    const std::vector<double> rates{0.0, 25'000.0, 50'000.0, 100'000.0};
    const std::string sa = dump(sweep_report(c, rates));
    const std::string sb = dump(sweep_report(c, savings_sweep_serial(c, rates)));
    o.detail << " result " << a.size() << " bytes, sweep " << sa.size() << " bytes";
    o.require(a == b, "simulate report identical");
    o.require(sa == sb, "parallel and serial sweep reports identical");
  });

  return failures == 0 ? 0 : 1;
}
