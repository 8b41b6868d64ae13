#include "pkgc/fsm.hpp"

#include <algorithm>
#include <cmath>

namespace pkgc {

std::vector<std::string> signal_violations(const SignalSet& s) {
  std::vector<std::string> out;
  if (s.in_pc1a && !(s.in_cc1 && s.in_l0s && s.allow_cke_off && s.clk_gated)) {
    out.emplace_back("in_pc1a_gate");
  }
  if (!s.clk_gated && (s.ret || !s.pwr_ok)) out.emplace_back("clock_at_retention");
  return out;
}

std::string_view to_string(Pending p) {
  switch (p) {
    case Pending::None: return "None";
    case Pending::EntryBranches: return "EntryBranches";
    case Pending::ExitBranches: return "ExitBranches";
  }
  return "?";
}

std::string_view to_string(FsmEventKind k) {
  switch (k) {
    case FsmEventKind::AllCoresEnteredCC1: return "AllCoresEnteredCC1";
    case FsmEventKind::AllCoresEnteredCC6: return "AllCoresEnteredCC6";
    case FsmEventKind::CoreInterrupt: return "CoreInterrupt";
    case FsmEventKind::AllIosEnteredL0s: return "AllIosEnteredL0s";
    case FsmEventKind::IoWakeup: return "IoWakeup";
    case FsmEventKind::GpmuWakeup: return "GpmuWakeup";
    case FsmEventKind::PwrOkAsserted: return "PwrOkAsserted";
    case FsmEventKind::TimerTick: return "TimerTick";
  }
  return "?";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::SetAllowL0s: return "SetAllowL0s";
    case Action::UnsetAllowL0s: return "UnsetAllowL0s";
    case Action::ClkGateClm: return "ClkGateClm";
    case Action::ClkUngateClm: return "ClkUngateClm";
    case Action::SetRet: return "SetRet";
    case Action::UnsetRet: return "UnsetRet";
    case Action::SetAllowCkeOff: return "SetAllowCkeOff";
    case Action::UnsetAllowCkeOff: return "UnsetAllowCkeOff";
    case Action::AssertInPC1A: return "AssertInPC1A";
    case Action::DeassertInPC1A: return "DeassertInPC1A";
    case Action::EnterPC2: return "EnterPC2";
    case Action::ExitPC2: return "ExitPC2";
    case Action::IosToL1: return "IosToL1";
    case Action::IosToL0: return "IosToL0";
    case Action::DramEnterSelfRefresh: return "DramEnterSelfRefresh";
    case Action::DramExitSelfRefresh: return "DramExitSelfRefresh";
    case Action::PllsOff: return "PllsOff";
    case Action::PllsOn: return "PllsOn";
  }
  return "?";
}

double RailState::mv_at(TimeNs t, double slew_mv_per_ns) const {
  if (t <= ramp_start_ns || start_mv == target_mv) return start_mv;
  const double moved = slew_mv_per_ns * static_cast<double>(t - ramp_start_ns);
  if (target_mv < start_mv) return std::max(target_mv, start_mv - moved);
  return std::min(target_mv, start_mv + moved);
}

ApmuState initial_state(const LatencyProfile& lat) {
  ApmuState s;
  s.rail = RailState{lat.v_nominal_mv, lat.v_nominal_mv, 0};
  return s;
}

namespace {

TimeNs ramp_ns(double from_mv, double to_mv, double slew) {
  return ceil_ns(std::fabs(to_mv - from_mv) / slew);
}

/// Working copy of one step.
struct Step {
  ApmuState s;
  SignalSet sig;
  std::vector<Action> actions;
  TimeNs latency = 0;
  TimeNs t = 0;
  FsmEventKind kind;

  [[noreturn]] void illegal(const char* why) const {
    throw IllegalEvent(std::string(why) + ": " + std::string(to_string(kind)) + " in " +
                           std::string(to_string(s.package)) + "/" +
                           std::string(to_string(s.pending)),
                       s.package, kind);
  }

  void emit(Action a) { actions.push_back(a); }

  StepResult finish() {
    s.elapsed_ns = s.pending == Pending::None ? 0 : t - s.started_ns;
    sig.gpmu_wakeup = false;  // pulse
    return StepResult{s, sig, std::move(actions), latency};
  }
};

Step begin(const ApmuState& state, const SignalSet& signals, const FsmEvent& ev) {
  Step st{state, signals, {}, 0, ev.timestamp_ns, ev.kind};
  if (ev.timestamp_ns < state.now_ns) st.illegal("timestamp regression");
  if (!signal_violations(signals).empty()) st.illegal("input signals violate invariants");
  st.s.now_ns = ev.timestamp_ns;
  if (ev.kind == FsmEventKind::GpmuWakeup) st.sig.gpmu_wakeup = true;
  return st;
}

// ---- PC1A flow ------------------------------------------------------------

void apmu_start_entry(Step& st, const LatencyProfile& lat) {
  const TimeNs gate = cycles_to_ns(lat.clock_gate_cycles, lat.pmu_clock_hz);
  const TimeNs assert_ns = cycles_to_ns(lat.signal_assert_cycles, lat.pmu_clock_hz);

  st.sig.in_l0s = true;
  st.s.io = IoLState::L0s;

  // Branch (i): gate the CLM clock, then command retention; the ramp runs in
  // the background from the instant Ret is set.
  st.emit(Action::ClkGateClm);
  st.sig.clk_gated = true;
  st.emit(Action::SetRet);
  st.sig.ret = true;
  st.sig.pwr_ok = false;
  const double v_now = st.s.rail.mv_at(st.t, lat.fivr_slew_mv_per_ns);
  st.s.rail = RailState{v_now, lat.v_retention_mv, st.t + gate};
  st.s.clm_due_ns = st.t + gate;

  // Branch (ii): allow CKE off; the MCs power down once they see it.
  st.emit(Action::SetAllowCkeOff);
  st.sig.allow_cke_off = true;
  st.s.dram_due_ns = st.t + gate + assert_ns + ceil_ns(lat.cke_entry_ns);

  st.s.started_ns = st.t;
  st.s.pending = Pending::EntryBranches;
  st.s.clm_done = false;
  st.s.dram_done = false;
  st.s.io_wake = false;
}

void apmu_try_complete_entry(Step& st) {
  st.s.clm_done = st.t >= st.s.clm_due_ns;
  st.s.dram_done = st.t >= st.s.dram_due_ns;
  if (!(st.s.clm_done && st.s.dram_done)) return;
  st.emit(Action::AssertInPC1A);
  st.sig.in_pc1a = true;
  st.s.package = PackageState::PC1A;
  st.s.pending = Pending::None;
  st.s.dram = DramPowerMode::CkeOff;
  st.latency = std::max(st.s.clm_due_ns, st.s.dram_due_ns) - st.s.started_ns;
}

void apmu_start_exit(Step& st, const LatencyProfile& lat, bool by_io) {
  const TimeNs assert_ns = cycles_to_ns(lat.signal_assert_cycles, lat.pmu_clock_hz);

  if (st.sig.in_pc1a) {
    st.emit(Action::DeassertInPC1A);
    st.sig.in_pc1a = false;
  }
  // Branch (i): ramp back up from wherever the rail is now.
  st.emit(Action::UnsetRet);
  st.sig.ret = false;
  const double v_now = st.s.rail.mv_at(st.t, lat.fivr_slew_mv_per_ns);
  st.s.rail = RailState{v_now, lat.v_nominal_mv, st.t};
  st.s.pwr_ok_due_ns = st.t + ramp_ns(v_now, lat.v_nominal_mv, lat.fivr_slew_mv_per_ns);

  // Branch (ii): reactivate the memory controllers.
  st.emit(Action::UnsetAllowCkeOff);
  st.sig.allow_cke_off = false;
  st.s.dram_due_ns = st.t + assert_ns + ceil_ns(lat.cke_exit_ns);

  st.s.io_wake = by_io;
  if (by_io) {
    st.sig.in_l0s = false;
    st.s.io = IoLState::L0;
    st.s.link_due_ns = st.t + ceil_ns(lat.l0s_exit_ns);
  }

  st.s.started_ns = st.t;
  st.s.pending = Pending::ExitBranches;
  st.s.clm_done = false;
  st.s.dram_done = false;
}

TimeNs apmu_exit_join_time(const ApmuState& s) {
  TimeNs join = std::max(s.clm_due_ns, s.dram_due_ns);
  if (s.io_wake) join = std::max(join, s.link_due_ns);
  return join;
}

void apmu_try_complete_exit(Step& st) {
  st.s.dram_done = st.t >= st.s.dram_due_ns;
  if (!st.sig.pwr_ok) return;
  st.s.clm_done = true;
  const TimeNs join = apmu_exit_join_time(st.s);
  if (st.t < join) return;
  st.s.package = PackageState::ACC1;
  st.s.pending = Pending::None;
  st.s.dram_done = true;
  st.s.dram = DramPowerMode::Active;
  st.latency = join - st.s.started_ns;
}

void apmu_acc1_to_pc0(Step& st) {
  st.emit(Action::UnsetAllowL0s);
  st.sig.allow_l0s = false;
  st.sig.in_cc1 = false;
  st.sig.in_l0s = false;
  st.s.io = IoLState::L0;
  st.s.package = PackageState::PC0;
}

}  // namespace

StepResult apmu_step(const ApmuState& state, const SignalSet& signals, const FsmEvent& event,
                     const LatencyProfile& lat) {
  Step st = begin(state, signals, event);
  using K = FsmEventKind;
  const K k = event.kind;

  switch (st.s.pending) {
    case Pending::None:
      switch (st.s.package) {
        case PackageState::PC0:
          if (k == K::AllCoresEnteredCC1) {
            st.emit(Action::SetAllowL0s);
            st.sig.allow_l0s = true;
            st.sig.in_cc1 = true;
            st.s.package = PackageState::ACC1;
          } else if (k != K::TimerTick) {
            st.illegal("undefined event");
          }
          break;

        case PackageState::ACC1:
          if (k == K::AllIosEnteredL0s) {
            apmu_start_entry(st, lat);
            apmu_try_complete_entry(st);
          } else if (k == K::CoreInterrupt) {
            apmu_acc1_to_pc0(st);
          } else if (k == K::IoWakeup) {
            st.sig.in_l0s = false;
            st.s.io = IoLState::L0;
          } else if (k != K::GpmuWakeup && k != K::TimerTick) {
            st.illegal("undefined event");
          }
          break;

        case PackageState::PC1A:
          if (k == K::IoWakeup || k == K::GpmuWakeup) {
            apmu_start_exit(st, lat, k == K::IoWakeup);
          } else if (k != K::TimerTick) {
            st.illegal("undefined event");
          }
          break;

        default:
          st.illegal("state not part of the PC1A flow");
      }
      break;

    case Pending::EntryBranches:
      if (k == K::TimerTick) {
        apmu_try_complete_entry(st);
      } else if (k == K::IoWakeup || k == K::GpmuWakeup) {
        apmu_start_exit(st, lat, k == K::IoWakeup);
      } else {
        st.illegal("undefined event during entry");
      }
      break;

    case Pending::ExitBranches:
      if (k == K::PwrOkAsserted) {
        if (st.sig.pwr_ok) st.illegal("PwrOk already asserted");
        if (st.t < st.s.pwr_ok_due_ns) st.illegal("PwrOk before the rail reaches nominal");
        st.sig.pwr_ok = true;
        st.emit(Action::ClkUngateClm);
        st.sig.clk_gated = false;
        // Ungating overlaps the PwrOk handshake; it only extends the branch
        // when the ramp is shorter than the ungate itself.
        st.s.clm_due_ns = std::max(st.t, st.s.started_ns + cycles_to_ns(lat.clock_gate_cycles,
                                                                         lat.pmu_clock_hz));
        apmu_try_complete_exit(st);
      } else if (k == K::TimerTick) {
        apmu_try_complete_exit(st);
      } else if (k == K::IoWakeup) {
        if (st.sig.in_l0s) {
          st.sig.in_l0s = false;
          st.s.io = IoLState::L0;
          st.s.io_wake = true;
          st.s.link_due_ns = st.t + ceil_ns(lat.l0s_exit_ns);
        }
      } else if (k != K::GpmuWakeup) {
        st.illegal("undefined event during exit");
      }
      break;
  }
  return st.finish();
}

std::optional<DueEvent> apmu_next_due(const ApmuState& s) {
  switch (s.pending) {
    case Pending::None: return std::nullopt;
    case Pending::EntryBranches:
      return DueEvent{std::max(s.clm_due_ns, s.dram_due_ns), FsmEventKind::TimerTick};
    case Pending::ExitBranches:
      if (!s.clm_done) return DueEvent{s.pwr_ok_due_ns, FsmEventKind::PwrOkAsserted};
      return DueEvent{apmu_exit_join_time(s), FsmEventKind::TimerTick};
  }
  return std::nullopt;
}

// ---- PC6 flow ---------------------------------------------------------------

namespace {

TimeNs pc6_entry_ns(const Pc6Profile& p, TimeNs ramp) {
  return ceil_ns(p.firmware_entry_ns) +
         std::max(ceil_ns(p.io_l1_entry_ns), ceil_ns(p.dram_sr_entry_ns)) +
         ceil_ns(p.pll_off_ns) + ramp;
}

TimeNs pc6_exit_ns(const Pc6Profile& p, TimeNs ramp) {
  return ceil_ns(p.firmware_exit_ns) + ramp + ceil_ns(p.pll_relock_ns) +
         std::max(ceil_ns(p.io_l1_exit_ns), ceil_ns(p.dram_sr_exit_ns));
}

void pc6_start_exit(Step& st, const LatencyProfile& lat, const Pc6Profile& pc6, bool by_io) {
  st.emit(Action::UnsetRet);
  st.sig.ret = false;
  st.emit(Action::PllsOn);
  st.emit(Action::DramExitSelfRefresh);
  st.emit(Action::IosToL0);
  if (by_io) st.sig.in_l0s = false;

  const double v_now = st.s.rail.mv_at(st.t, lat.fivr_slew_mv_per_ns);
  st.s.rail = RailState{v_now, lat.v_nominal_mv, st.t};
  const TimeNs ramp = ramp_ns(v_now, lat.v_nominal_mv, lat.fivr_slew_mv_per_ns);
  st.s.started_ns = st.t;
  st.s.clm_due_ns = st.s.dram_due_ns = st.t + pc6_exit_ns(pc6, ramp);
  st.s.pwr_ok_due_ns = st.t + ramp;
  st.s.io_wake = by_io;
  st.s.package = PackageState::PC2;
  st.s.pending = Pending::ExitBranches;
  st.s.clm_done = st.s.dram_done = false;
}

}  // namespace

StepResult pc6_step(const ApmuState& state, const SignalSet& signals, const FsmEvent& event,
                    const LatencyProfile& lat, const Pc6Profile& pc6) {
  Step st = begin(state, signals, event);
  using K = FsmEventKind;
  const K k = event.kind;

  switch (st.s.pending) {
    case Pending::None:
      if (st.s.package == PackageState::PC0) {
        if (k == K::AllCoresEnteredCC6) {
          st.sig.in_cc1 = true;
          st.emit(Action::EnterPC2);
          st.emit(Action::IosToL1);
          st.sig.in_l0s = true;
          st.emit(Action::DramEnterSelfRefresh);
          st.emit(Action::PllsOff);
          st.emit(Action::ClkGateClm);
          st.sig.clk_gated = true;
          st.emit(Action::SetRet);
          st.sig.ret = true;
          st.sig.pwr_ok = false;

          const TimeNs ramp =
              ramp_ns(lat.v_nominal_mv, lat.v_retention_mv, lat.fivr_slew_mv_per_ns);
          const TimeNs before_ramp = pc6_entry_ns(pc6, 0);
          const double v_now = st.s.rail.mv_at(st.t, lat.fivr_slew_mv_per_ns);
          st.s.rail = RailState{v_now, lat.v_retention_mv, st.t + before_ramp};
          st.s.started_ns = st.t;
          st.s.clm_due_ns = st.s.dram_due_ns = st.t + before_ramp + ramp;
          st.s.package = PackageState::PC2;
          st.s.pending = Pending::EntryBranches;
          st.s.clm_done = st.s.dram_done = false;
          st.s.io = IoLState::L1;
          st.s.plls_on = false;
        } else if (k != K::TimerTick) {
          st.illegal("undefined event");
        }
      } else if (st.s.package == PackageState::PC6) {
        if (k == K::IoWakeup || k == K::GpmuWakeup) {
          pc6_start_exit(st, lat, pc6, k == K::IoWakeup);
        } else if (k != K::TimerTick) {
          st.illegal("undefined event");
        }
      } else {
        st.illegal("state not part of the PC6 flow");
      }
      break;

    case Pending::EntryBranches:
      if (k == K::TimerTick) {
        if (st.t >= st.s.clm_due_ns) {
          st.s.package = PackageState::PC6;
          st.s.pending = Pending::None;
          st.s.clm_done = st.s.dram_done = true;
          st.s.dram = DramPowerMode::SelfRefresh;
          st.latency = st.s.clm_due_ns - st.s.started_ns;
        }
      } else if (k == K::IoWakeup || k == K::GpmuWakeup) {
        pc6_start_exit(st, lat, pc6, k == K::IoWakeup);
      } else {
        st.illegal("undefined event during entry");
      }
      break;

    case Pending::ExitBranches:
      if (k == K::TimerTick) {
        if (st.t >= st.s.clm_due_ns) {
          st.emit(Action::ClkUngateClm);
          st.sig.pwr_ok = true;
          st.sig.clk_gated = false;
          st.emit(Action::ExitPC2);
          st.sig.in_cc1 = false;
          st.sig.in_l0s = false;
          st.s.package = PackageState::PC0;
          st.s.pending = Pending::None;
          st.s.clm_done = st.s.dram_done = true;
          st.s.dram = DramPowerMode::Active;
          st.s.io = IoLState::L0;
          st.s.plls_on = true;
          st.latency = st.s.clm_due_ns - st.s.started_ns;
        }
      } else if (k != K::IoWakeup && k != K::GpmuWakeup) {
        st.illegal("undefined event during exit");
      }
      break;
  }
  return st.finish();
}

std::optional<DueEvent> pc6_next_due(const ApmuState& s) {
  if (s.pending == Pending::None) return std::nullopt;
  return DueEvent{s.clm_due_ns, FsmEventKind::TimerTick};
}

// ---- Budgets ----------------------------------------------------------------

TransitionBudget transition_budget(const LatencyProfile& lat) {
  const TimeNs gate = cycles_to_ns(lat.clock_gate_cycles, lat.pmu_clock_hz);
  const TimeNs assert_ns = cycles_to_ns(lat.signal_assert_cycles, lat.pmu_clock_hz);
  const TimeNs ramp = ramp_ns(lat.v_nominal_mv, lat.v_retention_mv, lat.fivr_slew_mv_per_ns);

  TransitionBudget b;
  b.entry_ns = gate + assert_ns + ceil_ns(lat.cke_entry_ns);
  const TimeNs clm_branch = std::max(ramp, gate);
  const TimeNs dram_branch = assert_ns + ceil_ns(lat.cke_exit_ns);
  b.exit_ns = std::max({clm_branch, dram_branch, ceil_ns(lat.l0s_exit_ns)});
  b.total_ns = b.entry_ns + b.exit_ns;
  return b;
}

TransitionBudget pc6_budget(const LatencyProfile& lat, const Pc6Profile& pc6) {
  const TimeNs ramp = ramp_ns(lat.v_nominal_mv, lat.v_retention_mv, lat.fivr_slew_mv_per_ns);
  TransitionBudget b;
  b.entry_ns = pc6_entry_ns(pc6, ramp);
  b.exit_ns = pc6_exit_ns(pc6, ramp);
  b.total_ns = b.entry_ns + b.exit_ns;
  return b;
}

}  // namespace pkgc
