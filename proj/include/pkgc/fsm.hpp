#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pkgc/domain.hpp"

namespace pkgc {

// ---------------------------------------------------------------------------
// Signals, state, events
// ---------------------------------------------------------------------------

/// Control and status wires between the APMU, IO controllers, memory
/// controllers, the CLM FIVR/clock tree and the GPMU.
struct SignalSet {
  bool in_cc1 = false;        // AND over cores of "CC1 or deeper"
  bool allow_l0s = false;
  bool in_l0s = false;        // AND over IO links of "L0s or deeper"
  bool allow_cke_off = false;
  bool ret = false;
  bool pwr_ok = true;
  bool clk_gated = false;
  bool in_pc1a = false;
  bool gpmu_wakeup = false;

  bool operator==(const SignalSet&) const = default;
};

/// Names of violated SignalSet invariants; empty when consistent.
std::vector<std::string> signal_violations(const SignalSet& s);

enum class Pending : std::uint8_t { None, EntryBranches, ExitBranches };

std::string_view to_string(Pending p);

/// CLM rail under FIVR control. Voltage moves linearly at the slew rate from
/// start_mv toward target_mv beginning at ramp_start_ns; a new command preempts
/// the ramp from the instantaneous voltage.
struct RailState {
  double start_mv = 800.0;
  double target_mv = 800.0;
  TimeNs ramp_start_ns = 0;

  double mv_at(TimeNs t, double slew_mv_per_ns) const;
  bool operator==(const RailState&) const = default;
};

struct ApmuState {
  PackageState package = PackageState::PC0;
  Pending pending = Pending::None;
  bool clm_done = true;
  bool dram_done = true;
  TimeNs elapsed_ns = 0;

  TimeNs now_ns = 0;           // timestamp of the last processed event
  TimeNs started_ns = 0;       // start of the in-flight transition
  TimeNs clm_due_ns = 0;       // CLM branch completion (entry: clock gated; exit: ungated)
  TimeNs dram_due_ns = 0;      // memory-controller branch completion
  TimeNs link_due_ns = 0;      // IO link back in L0 (exit by IO wakeup)
  TimeNs pwr_ok_due_ns = 0;    // rail back at nominal (exit)
  bool io_wake = false;        // exit was (also) triggered by an IO link

  RailState rail{};
  DramPowerMode dram = DramPowerMode::Active;
  IoLState io = IoLState::L0;
  bool plls_on = true;

  bool operator==(const ApmuState&) const = default;
};

/// Returns the APMU/PC6 initial state for a rail at the profile's nominal voltage.
ApmuState initial_state(const LatencyProfile& lat);

enum class FsmEventKind : std::uint8_t {
  AllCoresEnteredCC1,
  AllCoresEnteredCC6,
  CoreInterrupt,
  AllIosEnteredL0s,
  IoWakeup,
  GpmuWakeup,
  PwrOkAsserted,
  TimerTick,
};

std::string_view to_string(FsmEventKind k);

struct FsmEvent {
  FsmEventKind kind;
  TimeNs timestamp_ns;
};

enum class Action : std::uint8_t {
  SetAllowL0s,
  UnsetAllowL0s,
  ClkGateClm,
  ClkUngateClm,
  SetRet,
  UnsetRet,
  SetAllowCkeOff,
  UnsetAllowCkeOff,
  AssertInPC1A,
  DeassertInPC1A,
  // PC6 flow
  EnterPC2,
  ExitPC2,
  IosToL1,
  IosToL0,
  DramEnterSelfRefresh,
  DramExitSelfRefresh,
  PllsOff,
  PllsOn,
};

std::string_view to_string(Action a);

struct StepResult {
  ApmuState state;
  SignalSet signals;
  std::vector<Action> actions;
  /// Wall-clock time charged when a transition completes in this step (entry
  /// or exit duration); zero for steps that only start or advance a flow.
  TimeNs latency_ns = 0;
};

class IllegalEvent : public std::logic_error {
 public:
  IllegalEvent(const std::string& what, PackageState state, FsmEventKind event)
      : std::logic_error(what), state_(state), event_(event) {}
  PackageState state() const { return state_; }
  FsmEventKind event() const { return event_; }

 private:
  PackageState state_;
  FsmEventKind event_;
};

// ---------------------------------------------------------------------------
// Flows
// ---------------------------------------------------------------------------

/// One step of the APMU PC1A flow. Pure: the result depends only on the arguments.
///
/// Entry: PC0 -AllCoresEnteredCC1-> ACC1 (SetAllowL0s). ACC1 -AllIosEnteredL0s->
/// two concurrent branches, (i) ClkGateClm then SetRet (ramp is background) and
/// (ii) SetAllowCkeOff; a TimerTick at or after the join asserts InPC1A.
///
/// Exit: IoWakeup/GpmuWakeup during PC1A (or a not-yet-joined entry) unsets Ret
/// and Allow_CKE_OFF concurrently; PwrOkAsserted ungates the CLM clock; the join
/// returns to ACC1. CoreInterrupt in ACC1 returns to PC0 (UnsetAllowL0s).
///
/// Throws IllegalEvent for events the current state does not define, for
/// timestamps that go backwards, and for inputs breaking SignalSet invariants.
StepResult apmu_step(const ApmuState& state, const SignalSet& signals, const FsmEvent& event,
                     const LatencyProfile& lat = {});

/// One step of the firmware PC6 flow: PC0 -AllCoresEnteredCC6-> PC2 (IOs to L1,
/// DRAM self-refresh, PLLs off, CLM to retention) -> PC6, and the reverse on a
/// wakeup, ending in PC0.
StepResult pc6_step(const ApmuState& state, const SignalSet& signals, const FsmEvent& event,
                    const LatencyProfile& lat = {}, const Pc6Profile& pc6 = {});

/// Time at which the in-flight flow needs its next event, and which one.
struct DueEvent {
  TimeNs at_ns;
  FsmEventKind kind;
};
std::optional<DueEvent> apmu_next_due(const ApmuState& state);
std::optional<DueEvent> pc6_next_due(const ApmuState& state);

// ---------------------------------------------------------------------------
// Latency budgets
// ---------------------------------------------------------------------------

struct TransitionBudget {
  TimeNs entry_ns = 0;
  TimeNs exit_ns = 0;
  TimeNs total_ns = 0;
};

/// Worst-case PC1A entry and exit measured from ACC1.
/// entry = clock-gate cycles + Allow_CKE_OFF assert cycles + CKE entry (the
/// retention ramp does not block). exit = max over the concurrent exit branches:
/// full retention-to-nominal ramp (clock ungating overlaps the PwrOk handshake),
/// Allow_CKE_OFF deassert + CKE exit, and L0s exit.
TransitionBudget transition_budget(const LatencyProfile& lat);

/// PC6 round trip; entry and exit are serial firmware sequences.
TransitionBudget pc6_budget(const LatencyProfile& lat, const Pc6Profile& pc6);

}  // namespace pkgc
