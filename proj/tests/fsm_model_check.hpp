#pragma once

// Exhaustive exploration of the APMU step function over a region abstraction
// of time. A node is identified by its control state, the branch flags, the
// order of the pending deadlines and the phase of the rail ramp; the step
// function only distinguishes timestamps by which deadlines have passed, so
// from each node it is enough to try "now", every pending deadline, a point
// strictly between each pair of consecutive deadlines and a point after the
// last one.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pkgc/fsm.hpp"

namespace model_check {

using namespace pkgc;

struct Report {
  std::size_t control_states = 0;   // distinct (package, pending, signals, dram, io)
  std::size_t abstract_states = 0;  // control state plus timer order and ramp phase
  std::size_t transitions = 0;
  std::size_t depth = 0;
  std::vector<std::string> violations;
};

using ControlKey = std::tuple<int, int, bool, bool, bool, bool, bool, bool, bool, bool, int, int>;
// control, clm_done, dram_done, io_wake, rail phase, deadline ranks
using AbstractKey = std::tuple<ControlKey, bool, bool, bool, int, std::array<int, 5>>;

inline ControlKey control_key(const ApmuState& s, const SignalSet& g) {
  return {static_cast<int>(s.package), static_cast<int>(s.pending), g.in_cc1, g.allow_l0s, g.in_l0s,
          g.allow_cke_off, g.ret, g.pwr_ok, g.clk_gated, g.in_pc1a, static_cast<int>(s.dram),
          static_cast<int>(s.io)};
}

/// Instant the rail reaches its target, or now if it already has.
inline TimeNs rail_settles(const ApmuState& s, double slew) {
  if (s.rail.mv_at(s.now_ns, slew) == s.rail.target_mv) return s.now_ns;
  return s.rail.ramp_start_ns + ceil_ns(std::abs(s.rail.target_mv - s.rail.start_mv) / slew);
}

inline std::array<TimeNs, 5> deadlines(const ApmuState& s, double slew) {
  return {s.clm_due_ns, s.dram_due_ns, s.link_due_ns, s.pwr_ok_due_ns, rail_settles(s, slew)};
}

/// Rank of each future deadline among the future deadlines (ties share a rank);
/// 0 for deadlines at or before now.
inline std::array<int, 5> deadline_ranks(const ApmuState& s, double slew) {
  const auto d = deadlines(s, slew);
  std::vector<TimeNs> future;
  for (TimeNs t : d) {
    if (t > s.now_ns) future.push_back(t);
  }
  std::sort(future.begin(), future.end());
  future.erase(std::unique(future.begin(), future.end()), future.end());
  std::array<int, 5> r{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > s.now_ns) {
      r[i] = 1 + static_cast<int>(std::lower_bound(future.begin(), future.end(), d[i]) - future.begin());
    }
  }
  return r;
}

inline AbstractKey abstract_key(const ApmuState& s, const SignalSet& g, double slew) {
  const double v = s.rail.mv_at(s.now_ns, slew);
  const int dir = v == s.rail.target_mv ? 0 : (s.rail.target_mv < v ? -1 : 1);
  // a settled rail is told apart by its level only
  const int level = dir == 0 ? static_cast<int>(std::lround(v)) : 0;
  return {control_key(s, g), s.clm_done, s.dram_done, s.io_wake, dir * 10000 + level, deadline_ranks(s, slew)};
}

/// Timestamps that cover every region reachable from s.
inline std::vector<TimeNs> probe_times(const ApmuState& s, double slew) {
  std::vector<TimeNs> marks{s.now_ns};
  for (TimeNs t : deadlines(s, slew)) {
    if (t > s.now_ns) marks.push_back(t);
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::vector<TimeNs> out;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    out.push_back(marks[i]);
    if (i + 1 < marks.size() && marks[i + 1] - marks[i] > 1) out.push_back(marks[i] + (marks[i + 1] - marks[i]) / 2);
  }
  out.push_back(marks.back() + 37);
  return out;
}

/// Safety predicates checked on every reachable node.
inline void check_node(const ApmuState& s, const SignalSet& g, const LatencyProfile& lat,
                       std::vector<std::string>& out) {
  auto fail = [&](const std::string& what) { out.push_back(what); };
  for (const auto& v : signal_violations(g)) fail("signal invariant " + v);
  if (g.allow_cke_off && !g.in_cc1) fail("Allow_CKE_OFF with a core in CC0");
  if (s.dram != DramPowerMode::Active && !g.in_cc1) fail("DRAM not addressable with a core in CC0");
  if (s.package == PackageState::PC0 && s.dram != DramPowerMode::Active) fail("PC0 with DRAM not Active");
  if (s.dram == DramPowerMode::SelfRefresh) fail("self-refresh reached from the PC1A flow");
  if (g.in_pc1a && !(g.in_cc1 && g.in_l0s && g.allow_l0s && g.allow_cke_off && g.clk_gated && g.ret)) {
    fail("InPC1A without the full gate predicate");
  }
  if (!g.clk_gated) {
    for (TimeNs dt : {TimeNs{0}, TimeNs{1}, TimeNs{1000}}) {
      if (s.rail.mv_at(s.now_ns + dt, lat.fivr_slew_mv_per_ns) < lat.v_nominal_mv - 1e-9) {
        fail("CLM clock running below nominal voltage");
        break;
      }
    }
    if (g.ret) fail("Ret set with the clock running");
  }
  if (g.in_pc1a != (s.package == PackageState::PC1A && s.pending == Pending::None)) {
    fail("InPC1A disagrees with the package state");
  }
}

inline std::string describe(const std::vector<FsmEvent>& path) {
  std::string out = "start";
  for (const auto& e : path) out += " > " + std::string(to_string(e.kind)) + "@" + std::to_string(e.timestamp_ns);
  return out;
}

inline const FsmEventKind kAllKinds[] = {FsmEventKind::AllCoresEnteredCC1, FsmEventKind::AllCoresEnteredCC6,
                                         FsmEventKind::CoreInterrupt,      FsmEventKind::AllIosEnteredL0s,
                                         FsmEventKind::IoWakeup,           FsmEventKind::GpmuWakeup,
                                         FsmEventKind::PwrOkAsserted,      FsmEventKind::TimerTick};

inline Report explore(const LatencyProfile& lat = {}, std::size_t max_depth = 64) {
  Report r;
  const double slew = lat.fivr_slew_mv_per_ns;
  struct Node {
    ApmuState s;
    SignalSet g;
    std::size_t depth;
    std::size_t parent;
    FsmEvent via;
  };
  constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

  std::vector<Node> nodes;
  auto path_to = [&](std::size_t i, const FsmEvent& last) {
    std::vector<FsmEvent> evs{last};
    for (; i != kRoot && nodes[i].parent != kRoot; i = nodes[i].parent) evs.push_back(nodes[i].via);
    std::reverse(evs.begin(), evs.end());
    return describe(evs);
  };

  std::set<AbstractKey> seen;
  std::set<ControlKey> controls;
  const ApmuState s0 = initial_state(lat);
  nodes.push_back({s0, SignalSet{}, 0, kRoot, {}});
  seen.insert(abstract_key(s0, SignalSet{}, slew));
  controls.insert(control_key(s0, SignalSet{}));
  std::vector<std::string> found;
  check_node(s0, SignalSet{}, lat, found);
  for (const auto& f : found) r.violations.push_back(f + " at start");

  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const Node n = nodes[head];
    r.depth = std::max(r.depth, n.depth);
    if (n.depth >= max_depth) continue;
    for (TimeNs t : probe_times(n.s, slew)) {
      for (auto k : kAllKinds) {
        StepResult res;
        try {
          res = apmu_step(n.s, n.g, FsmEvent{k, t}, lat);
        } catch (const IllegalEvent&) {
          continue;
        }
        ++r.transitions;
        found.clear();
        check_node(res.state, res.signals, lat, found);
        for (const auto& f : found) {
          if (r.violations.size() < 20) r.violations.push_back(f + " after " + path_to(head, {k, t}));
        }
        controls.insert(control_key(res.state, res.signals));
        if (seen.insert(abstract_key(res.state, res.signals, slew)).second) {
          nodes.push_back({res.state, res.signals, n.depth + 1, head, {k, t}});
        }
      }
    }
  }
  r.control_states = controls.size();
  r.abstract_states = seen.size();
  return r;
}

/// Random walks with arbitrary delays between events; complements the
/// abstraction above with concrete timings.
template <class Rng>
std::vector<std::string> random_walks(Rng& rng, std::size_t walks, std::size_t steps,
                                      const LatencyProfile& lat = {}) {
  std::vector<std::string> out;
  std::vector<std::string> found;
  for (std::size_t w = 0; w < walks && out.size() < 20; ++w) {
    ApmuState s = initial_state(lat);
    SignalSet g;
    std::vector<FsmEvent> path;
    for (std::size_t i = 0; i < steps; ++i) {
      FsmEvent ev{kAllKinds[rng() % 8], s.now_ns + rng() % 200};
      if (rng() % 3 == 0) {
        if (auto d = apmu_next_due(s)) ev = FsmEvent{d->kind, d->at_ns};
      }
      StepResult res;
      try {
        res = apmu_step(s, g, ev, lat);
      } catch (const IllegalEvent&) {
        continue;
      }
      s = res.state;
      g = res.signals;
      path.push_back(ev);
      found.clear();
      check_node(s, g, lat, found);
      for (const auto& f : found) out.push_back(f + " after " + describe(path));
    }
  }
  return out;
}

}  // namespace model_check
