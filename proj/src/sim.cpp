#include "pkgc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "pkgc/fsm.hpp"

namespace pkgc {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::Shallow: return "shallow";
    case Policy::Deep: return "deep";
    case Policy::Pc1a: return "pc1a";
  }
  return "?";
}

std::optional<Policy> parse_policy(std::string_view token) {
  for (auto p : {Policy::Shallow, Policy::Deep, Policy::Pc1a}) {
    if (token == to_string(p)) return p;
  }
  return std::nullopt;
}

std::string_view to_string(ArrivalKind k) {
  switch (k) {
    case ArrivalKind::Deterministic: return "deterministic";
    case ArrivalKind::Poisson: return "poisson";
    case ArrivalKind::Bursty: return "bursty";
  }
  return "?";
}

std::optional<ArrivalKind> parse_arrival_kind(std::string_view token) {
  for (auto k : {ArrivalKind::Deterministic, ArrivalKind::Poisson, ArrivalKind::Bursty}) {
    if (token == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ServiceKind k) {
  return k == ServiceKind::Constant ? "constant" : "exponential";
}

std::optional<ServiceKind> parse_service_kind(std::string_view token) {
  if (token == "constant") return ServiceKind::Constant;
  if (token == "exponential") return ServiceKind::Exponential;
  return std::nullopt;
}

Watts SimConfig::effective_core_active_w() const {
  if (p_core_active_w) return *p_core_active_w;
  const Watts span = power_profile.p_pc0_max - power_profile.pc0_idle_total();
  return n_cores == 0 ? 0.0 : std::max(0.0, span) / static_cast<double>(n_cores);
}

double rate_for_utilization(double utilization, std::size_t n_cores, double mean_service_ns) {
  return utilization * static_cast<double>(n_cores) * 1e9 / mean_service_ns;
}

void validate_config(const SimConfig& c) {
  auto fail = [](const std::string& what) { throw ValidationError("InvalidConfig", what); };
  if (c.n_cores < 1) fail("n_cores must be >= 1");
  if (!(c.duration_ns > c.effective_warmup_ns())) fail("duration_ns must exceed warmup_ns");
  if (!(c.arrivals.rate_per_s >= 0.0) || !std::isfinite(c.arrivals.rate_per_s)) {
    fail("arrival rate must be finite and >= 0");
  }
  if (c.arrivals.kind == ArrivalKind::Bursty &&
      !(c.arrivals.burst_on_ns > 0.0 && c.arrivals.burst_off_ns >= 0.0)) {
    fail("bursty arrivals need burst_on_ns > 0 and burst_off_ns >= 0");
  }
  if (!(c.service.mean_ns > 0.0)) fail("service mean_ns must be > 0");
  if (auto v = validate_profile(c.power_profile); !v.ok()) {
    fail("power_profile violates " + v.violations.front());
  }
  if (auto v = validate_latency_profile(c.latency_profile); !v.ok()) {
    fail("latency_profile violates " + v.violations.front());
  }
  if (auto v = validate_pc6_profile(c.pc6_profile); !v.ok()) {
    fail("pc6_profile violates " + v.violations.front());
  }
  if (c.p_core_active_w && !(*c.p_core_active_w >= 0.0)) fail("p_core_active_w must be >= 0");
  if (c.max_queue == 0) fail("max_queue must be >= 1");
}

namespace {

enum class EvType : std::uint8_t { Arrival, ServiceDone, CoreWakeDone, Promote, L0sEntry, FsmDue, GpmuTimer };

struct Event {
  TimeNs t = 0;
  std::uint64_t seq = 0;
  EvType type = EvType::Arrival;
  std::size_t core = 0;
  std::uint64_t token = 0;
  FsmEventKind fsm = FsmEventKind::TimerTick;
  CoreCState target = CoreCState::CC1;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    return a.t != b.t ? a.t > b.t : a.seq > b.seq;
  }
};

struct Request {
  TimeNs arrival = 0;
  TimeNs service = 0;
  bool waited_for_pkg = false;
  TimeNs wake_penalty = 0;
};

struct Core {
  CoreCState state = CoreCState::CC1;
  bool busy = false;
  Request req{};
  std::uint64_t gov_token = 0;
};

std::size_t idx(PackageState s) { return static_cast<std::size_t>(s); }
std::size_t idx(CoreCState s) { return static_cast<std::size_t>(s); }

class Simulator {
 public:
  explicit Simulator(const SimConfig& c)
      : cfg_(c),
        warm_(c.effective_warmup_ns()),
        end_(c.duration_ns),
        p_active_(c.effective_core_active_w()),
        p_cc6_saving_(c.power_profile.p_cores_diff / static_cast<double>(c.n_cores)),
        cores_(c.n_cores),
        core_time_(c.n_cores, {0, 0, 0, 0}),
        core_events_(c.n_cores) {
    std::seed_seq arrival_seed{c.seed, std::uint64_t{0xA11}};
    std::seed_seq service_seed{c.seed, std::uint64_t{0x5E7}};
    arrival_rng_.seed(arrival_seed);
    service_rng_.seed(service_seed);
    fs_ = initial_state(c.latency_profile);
  }

  SimResult run() {
    for (std::size_t c = 0; c < cores_.size(); ++c) {
      record_core_event(c, CoreCState::CC1, 0);
      if (cfg_.policy == Policy::Deep) schedule_promotions(c, 0);
    }
    if (cfg_.policy == Policy::Pc1a) on_all_idle(0);
    if (cfg_.arrivals.rate_per_s > 0.0) {
      if (cfg_.arrivals.kind == ArrivalKind::Bursty) phase_end_ = sample_exp(cfg_.arrivals.burst_on_ns);
      schedule_next_arrival();
    }
    if (cfg_.gpmu_timer_period_ns > 0) push({cfg_.gpmu_timer_period_ns, 0, EvType::GpmuTimer});

    while (!pq_.empty()) {
      const Event ev = pq_.top();
      if (ev.t >= end_) break;
      pq_.pop();
      advance(ev.t);
      handle(ev);
    }
    advance(end_);
    return collect();
  }

 private:
  // ---- event plumbing -------------------------------------------------------

  void push(Event ev) {
    ev.seq = next_seq_++;
    pq_.push(ev);
  }

  void handle(const Event& ev) {
    switch (ev.type) {
      case EvType::Arrival: on_arrival(ev.t); break;
      case EvType::ServiceDone: on_service_done(ev.core, ev.t); break;
      case EvType::CoreWakeDone: start_service(ev.core, ev.t); break;
      case EvType::Promote: on_promote(ev.core, ev.target, ev.token, ev.t); break;
      case EvType::L0sEntry: on_l0s_entry(ev.token, ev.t); break;
      case EvType::FsmDue:
        if (ev.token == fsm_token_) {
          fsm(ev.fsm, ev.t);
          after_fsm_progress(ev.t);
        }
        break;
      case EvType::GpmuTimer: on_gpmu_timer(ev.t); break;
    }
  }

  double sample_exp(double mean) {
    if (!(mean > 0.0)) return 0.0;
    std::exponential_distribution<double> d(1.0 / mean);
    return d(arrival_rng_);
  }

  void schedule_next_arrival() {
    const auto& a = cfg_.arrivals;
    const double mean_gap = 1e9 / a.rate_per_s;
    switch (a.kind) {
      case ArrivalKind::Deterministic: arrival_clock_ += mean_gap; break;
      case ArrivalKind::Poisson: arrival_clock_ += sample_exp(mean_gap); break;
      case ArrivalKind::Bursty: {
        const double on_gap = mean_gap * a.burst_on_ns / (a.burst_on_ns + a.burst_off_ns);
        while (true) {
          const double gap = sample_exp(on_gap);
          if (arrival_clock_ + gap <= phase_end_) {
            arrival_clock_ += gap;
            break;
          }
          arrival_clock_ = phase_end_ + sample_exp(a.burst_off_ns);
          phase_end_ = arrival_clock_ + sample_exp(a.burst_on_ns);
        }
        break;
      }
    }
    if (arrival_clock_ >= static_cast<double>(end_)) return;
    push({static_cast<TimeNs>(std::llround(arrival_clock_)), 0, EvType::Arrival});
  }

  TimeNs draw_service() {
    double ns = cfg_.service.mean_ns;
    if (cfg_.service.kind == ServiceKind::Exponential) {
      std::exponential_distribution<double> d(1.0 / cfg_.service.mean_ns);
      ns = d(service_rng_);
    }
    return std::max<TimeNs>(1, static_cast<TimeNs>(std::llround(ns)));
  }

  // ---- accounting -----------------------------------------------------------

  PackageState bucket() const {
    switch (cfg_.policy) {
      case Policy::Shallow:
        return n_active() > 0 ? PackageState::PC0 : PackageState::PC0_idle;
      case Policy::Pc1a:
        if (fs_.pending == Pending::None && fs_.package == PackageState::PC1A) return PackageState::PC1A;
        return fs_.package == PackageState::PC0 ? PackageState::PC0 : PackageState::ACC1;
      case Policy::Deep:
        if (fs_.pending != Pending::None) return PackageState::PC2;
        if (fs_.package == PackageState::PC6) return PackageState::PC6;
        return n_active() > 0 ? PackageState::PC0 : PackageState::PC0_idle;
    }
    return PackageState::PC0;
  }

  std::size_t n_active() const {
    return static_cast<std::size_t>(std::count_if(
        cores_.begin(), cores_.end(), [](const Core& c) { return c.state == CoreCState::CC0; }));
  }

  std::size_t n_in(CoreCState s) const {
    return static_cast<std::size_t>(
        std::count_if(cores_.begin(), cores_.end(), [s](const Core& c) { return c.state == s; }));
  }

  Watts power(PackageState b) const {
    const auto& p = cfg_.power_profile;
    if (b == PackageState::PC1A) return p.pc1a_total();
    if (b == PackageState::PC6) return p.pc6_total();
    return p.pc0_idle_total() + static_cast<double>(n_active()) * p_active_ -
           static_cast<double>(n_in(CoreCState::CC6)) * p_cc6_saving_;
  }

  void advance(TimeNs t) {
    const TimeNs a = std::max(last_t_, warm_);
    const TimeNs b = std::min(t, end_);
    if (b > a) {
      const TimeNs dt = b - a;
      const PackageState pkg = bucket();
      const double e = power(pkg) * static_cast<double>(dt);
      energy_wns_ += e;
      pkg_time_[idx(pkg)] += dt;
      if (pkg == PackageState::PC0) pc0_energy_wns_ += e;
      for (std::size_t c = 0; c < cores_.size(); ++c) core_time_[c][idx(cores_[c].state)] += dt;
      const bool all_idle = n_active() == 0;
      if (all_idle) {
        all_idle_time_ += dt;
        if (!last_seg_all_idle_) ++all_idle_periods_;
      }
      last_seg_all_idle_ = all_idle;
    }
    last_t_ = std::max(last_t_, t);
  }

  bool in_window(TimeNs t) const { return t >= warm_ && t < end_; }

  void record_core_event(std::size_t c, CoreCState s, TimeNs t) {
    if (!cfg_.capture_trace) return;
    auto& evs = core_events_[c];
    if (!evs.empty() && evs.back().timestamp_ns == t) {
      evs.back().state = s;
      if (evs.size() >= 2 && evs[evs.size() - 2].state == s) evs.pop_back();
      return;
    }
    evs.push_back(TraceEvent{t, c, s});
  }

  void set_core_state(std::size_t c, CoreCState s, TimeNs t) {
    if (cores_[c].state == s) return;
    cores_[c].state = s;
    record_core_event(c, s, t);
  }

  // ---- package FSM ----------------------------------------------------------

  bool pkg_available() const {
    switch (cfg_.policy) {
      case Policy::Shallow: return true;
      case Policy::Pc1a:
        return fs_.pending == Pending::None &&
               (fs_.package == PackageState::PC0 || fs_.package == PackageState::ACC1);
      case Policy::Deep:
        return fs_.pending == Pending::None && fs_.package == PackageState::PC0;
    }
    return true;
  }

  void fsm(FsmEventKind kind, TimeNs t) {
    const FsmEvent ev{kind, t};
    StepResult r = cfg_.policy == Policy::Deep
                       ? pc6_step(fs_, sig_, ev, cfg_.latency_profile, cfg_.pc6_profile)
                       : apmu_step(fs_, sig_, ev, cfg_.latency_profile);

    if (auto v = signal_violations(r.signals); !v.empty()) {
      throw std::logic_error("package FSM produced inconsistent signals: " + v.front());
    }
    if (r.signals.allow_cke_off && n_active() > 0) {
      throw std::logic_error("Allow_CKE_OFF asserted with an active core");
    }
    if (r.state.pending == Pending::EntryBranches && fs_.pending != Pending::EntryBranches &&
        in_window(t)) {
      if (cfg_.policy == Policy::Deep) {
        ++pc6_transitions_;
      } else {
        ++pc1a_transitions_;
      }
    }
    if (r.state.pending == Pending::ExitBranches && fs_.pending != Pending::ExitBranches &&
        in_window(t)) {
      ++package_wakes_;
    }
    fs_ = r.state;
    sig_ = r.signals;

    ++fsm_token_;
    const auto due = cfg_.policy == Policy::Deep ? pc6_next_due(fs_) : apmu_next_due(fs_);
    if (due) {
      Event e{std::max(due->at_ns, t), 0, EvType::FsmDue};
      e.token = fsm_token_;
      e.fsm = due->kind;
      push(e);
    }
  }

  void after_fsm_progress(TimeNs t) {
    if (!pkg_available()) return;
    if (cfg_.policy == Policy::Pc1a && fs_.package == PackageState::ACC1) {
      pkg_available_since_ = t;
      if (!queue_.empty()) {
        dispatch(t);
      } else if (link_in_l0s_) {
        fsm(FsmEventKind::AllIosEnteredL0s, t);  // still idle after a GPMU wakeup
      } else if (in_system() == 0) {
        start_l0s_timer(t);
      }
    } else if (cfg_.policy == Policy::Deep && fs_.package == PackageState::PC0) {
      pkg_available_since_ = t;
      dispatch(t);
      if (in_system() == 0 && n_in(CoreCState::CC6) == cores_.size()) {
        fsm(FsmEventKind::AllCoresEnteredCC6, t);
      }
    }
  }

  // ---- workload -------------------------------------------------------------

  std::size_t in_system() const {
    return queue_.size() + static_cast<std::size_t>(std::count_if(
                               cores_.begin(), cores_.end(), [](const Core& c) { return c.busy; }));
  }

  void on_arrival(TimeNs t) {
    if (in_window(t)) ++arrived_;
    ++arrived_total_;
    Request r{t, draw_service(), !pkg_available(), 0};
    queue_.push_back(r);
    io_activity(t);
    dispatch(t);
    if (queue_.size() > cfg_.max_queue) {
      std::ostringstream msg;
      msg << "request queue exceeded " << cfg_.max_queue << " at t=" << t << " ns";
      throw OverloadDetected(msg.str());
    }
    schedule_next_arrival();
  }

  void io_activity(TimeNs t) {
    if (cfg_.policy == Policy::Pc1a) {
      ++l0s_token_;
      if (link_in_l0s_) {
        link_in_l0s_ = false;
        fsm(FsmEventKind::IoWakeup, t);
      }
    } else if (cfg_.policy == Policy::Deep) {
      if (fs_.pending != Pending::None || fs_.package == PackageState::PC6) {
        fsm(FsmEventKind::IoWakeup, t);
      }
    }
  }

  TimeNs core_exit_latency(CoreCState s) const {
    switch (s) {
      case CoreCState::CC0: return 0;
      case CoreCState::CC1: return cfg_.governor.cc1_exit_ns;
      case CoreCState::CC1E: return cfg_.governor.cc1e_exit_ns;
      case CoreCState::CC6: return cfg_.governor.cc6_exit_ns;
    }
    return 0;
  }

  void dispatch(TimeNs t) {
    while (!queue_.empty() && pkg_available()) {
      const auto it = std::find_if(cores_.begin(), cores_.end(), [](const Core& c) { return !c.busy; });
      if (it == cores_.end()) break;
      const auto c = static_cast<std::size_t>(it - cores_.begin());
      if (cfg_.policy == Policy::Pc1a && fs_.package == PackageState::ACC1) {
        fsm(FsmEventKind::CoreInterrupt, t);
      }
      Request r = queue_.front();
      queue_.pop_front();
      if (r.waited_for_pkg) r.wake_penalty = pkg_available_since_ - r.arrival;

      Core& core = cores_[c];
      core.busy = true;
      core.req = r;
      ++core.gov_token;
      const TimeNs wake = core_exit_latency(core.state);
      set_core_state(c, CoreCState::CC0, t);
      if (wake == 0) {
        start_service(c, t);
      } else {
        Event e{t + wake, 0, EvType::CoreWakeDone};
        e.core = c;
        push(e);
      }
    }
  }

  void start_service(std::size_t c, TimeNs t) {
    Event e{t + cores_[c].req.service, 0, EvType::ServiceDone};
    e.core = c;
    push(e);
  }

  void on_service_done(std::size_t c, TimeNs t) {
    Core& core = cores_[c];
    const Request& r = core.req;
    if (r.arrival >= warm_) {
      const TimeNs lat = t - r.arrival;
      ++served_;
      latency_sum_ += static_cast<double>(lat);
      service_sum_ += static_cast<double>(r.service);
      latencies_.push_back(lat);
      penalty_sum_ += static_cast<double>(r.wake_penalty);
      max_penalty_ = std::max(max_penalty_, r.wake_penalty);
      if (r.waited_for_pkg) {
        ++woken_;
        min_penalty_ = std::min(min_penalty_, r.wake_penalty);
      }
    }
    ++served_total_;
    core.busy = false;
    dispatch(t);
    if (core.busy) return;

    set_core_state(c, CoreCState::CC1, t);
    if (cfg_.policy == Policy::Deep) schedule_promotions(c, t);
    if (std::none_of(cores_.begin(), cores_.end(), [](const Core& k) { return k.busy; })) {
      on_all_idle(t);
    }
  }

  void on_all_idle(TimeNs t) {
    if (cfg_.policy != Policy::Pc1a) return;
    if (fs_.pending == Pending::None && fs_.package == PackageState::PC0) {
      fsm(FsmEventKind::AllCoresEnteredCC1, t);
    }
    start_l0s_timer(t);
  }

  void start_l0s_timer(TimeNs t) {
    ++l0s_token_;
    const auto& lat = cfg_.latency_profile;
    Event e{t + ceil_ns(lat.l0s_entry_fraction * lat.l0s_exit_ns), 0, EvType::L0sEntry};
    e.token = l0s_token_;
    push(e);
  }

  void on_l0s_entry(std::uint64_t token, TimeNs t) {
    if (token != l0s_token_ || link_in_l0s_ || in_system() != 0) return;
    if (fs_.pending != Pending::None || fs_.package != PackageState::ACC1) return;
    link_in_l0s_ = true;
    fsm(FsmEventKind::AllIosEnteredL0s, t);
  }

  void schedule_promotions(std::size_t c, TimeNs t) {
    Core& core = cores_[c];
    ++core.gov_token;
    const auto& g = cfg_.governor;
    if (g.cc1e_after_ns < g.cc6_after_ns) {
      Event e{t + g.cc1e_after_ns, 0, EvType::Promote};
      e.core = c;
      e.token = core.gov_token;
      e.target = CoreCState::CC1E;
      push(e);
    }
    Event e{t + g.cc6_after_ns, 0, EvType::Promote};
    e.core = c;
    e.token = core.gov_token;
    e.target = CoreCState::CC6;
    push(e);
  }

  void on_promote(std::size_t c, CoreCState target, std::uint64_t token, TimeNs t) {
    Core& core = cores_[c];
    if (token != core.gov_token || core.busy) return;
    set_core_state(c, target, t);
    if (target == CoreCState::CC6 && n_in(CoreCState::CC6) == cores_.size() &&
        fs_.pending == Pending::None && fs_.package == PackageState::PC0) {
      fsm(FsmEventKind::AllCoresEnteredCC6, t);
    }
  }

  void on_gpmu_timer(TimeNs t) {
    const bool entering = fs_.pending == Pending::EntryBranches;
    if (cfg_.policy == Policy::Pc1a &&
        (entering || (fs_.pending == Pending::None && fs_.package == PackageState::PC1A))) {
      fsm(FsmEventKind::GpmuWakeup, t);
    } else if (cfg_.policy == Policy::Deep &&
               (entering || (fs_.pending == Pending::None && fs_.package == PackageState::PC6))) {
      fsm(FsmEventKind::GpmuWakeup, t);
    }
    push({t + cfg_.gpmu_timer_period_ns, 0, EvType::GpmuTimer});
  }

  // ---- results --------------------------------------------------------------

  SimResult collect() {
    if (arrived_total_ != served_total_ + in_system()) {
      throw std::logic_error("request conservation violated");
    }
    SimResult r;
    r.policy = cfg_.policy;
    r.arrival_rate_per_s = cfg_.arrivals.rate_per_s;
    r.network_latency_ns = cfg_.network_latency_ns;
    const TimeNs window = end_ - warm_;
    r.window_ns = window;
    const double w = static_cast<double>(window);

    for (std::size_t b = 0; b < kNumPackageStates; ++b) {
      r.package_residency[b] = static_cast<double>(pkg_time_[b]) / w;
    }
    r.core_residency.assign(cores_.size(), StateFractions{});
    std::array<TimeNs, kNumCoreStates> core_totals{0, 0, 0, 0};
    for (std::size_t c = 0; c < cores_.size(); ++c) {
      for (std::size_t s = 0; s < kNumCoreStates; ++s) {
        r.core_residency[c][s] = static_cast<double>(core_time_[c][s]) / w;
        r.core_residency_aggregate[s] += r.core_residency[c][s] / static_cast<double>(cores_.size());
        core_totals[s] += core_time_[c][s];
      }
    }
    r.all_idle_fraction = static_cast<double>(all_idle_time_) / w;
    r.all_idle_periods = all_idle_periods_;
    r.pc1a_transitions = pc1a_transitions_;
    r.pc6_transitions = pc6_transitions_;
    r.package_wakes = package_wakes_;

    r.energy_joules = energy_wns_ * 1e-9;
    r.avg_power_w = energy_wns_ / w;
    const TimeNs pc0_time = pkg_time_[idx(PackageState::PC0)];
    r.p_pc0_at_load_w = pc0_time ? pc0_energy_wns_ / static_cast<double>(pc0_time) : 0.0;

    // Second route: rebuild energy from residencies and per-core state time.
    const auto& p = cfg_.power_profile;
    const double t_pc1a = static_cast<double>(pkg_time_[idx(PackageState::PC1A)]);
    const double t_pc6 = static_cast<double>(pkg_time_[idx(PackageState::PC6)]);
    const double t_cc6_outside_pc6 =
        static_cast<double>(core_totals[idx(CoreCState::CC6)]) - static_cast<double>(cores_.size()) * t_pc6;
    const double rebuilt = t_pc1a * p.pc1a_total() + t_pc6 * p.pc6_total() +
                           (w - t_pc1a - t_pc6) * p.pc0_idle_total() +
                           static_cast<double>(core_totals[idx(CoreCState::CC0)]) * p_active_ -
                           t_cc6_outside_pc6 * p_cc6_saving_;
    r.energy_from_residency_joules = rebuilt * 1e-9;

    r.requests_arrived = arrived_;
    r.requests_served = served_;
    r.woken_requests = woken_;
    if (served_ > 0) {
      const double n = static_cast<double>(served_);
      r.avg_latency_ns = latency_sum_ / n;
      r.avg_service_ns = service_sum_ / n;
      r.avg_wake_penalty_ns = penalty_sum_ / n;
      std::vector<TimeNs> sorted = latencies_;
      std::sort(sorted.begin(), sorted.end());
      const auto rank = static_cast<std::size_t>(std::ceil(0.99 * n));
      r.p99_latency_ns = static_cast<double>(sorted[std::max<std::size_t>(rank, 1) - 1]);
    }
    r.max_wake_penalty_ns = max_penalty_;
    r.min_wake_penalty_ns = woken_ ? min_penalty_ : 0;
    if (cfg_.capture_latencies) r.latencies_ns = latencies_;

    if (cfg_.capture_trace) {
      CStateTrace tr;
      tr.n_cores = cores_.size();
      tr.t_start = warm_;
      tr.t_end = end_;
      for (const auto& evs : core_events_) tr.events.insert(tr.events.end(), evs.begin(), evs.end());
      std::sort(tr.events.begin(), tr.events.end(), [](const TraceEvent& a, const TraceEvent& b) {
        return a.timestamp_ns != b.timestamp_ns ? a.timestamp_ns < b.timestamp_ns : a.core_id < b.core_id;
      });
      r.trace = std::move(tr);
    }
    return r;
  }

  const SimConfig& cfg_;
  const TimeNs warm_;
  const TimeNs end_;
  const Watts p_active_;
  const Watts p_cc6_saving_;

  std::priority_queue<Event, std::vector<Event>, Later> pq_;
  std::uint64_t next_seq_ = 0;
  std::mt19937_64 arrival_rng_;
  std::mt19937_64 service_rng_;
  double arrival_clock_ = 0.0;
  double phase_end_ = 0.0;

  std::vector<Core> cores_;
  std::deque<Request> queue_;
  ApmuState fs_;
  SignalSet sig_;
  std::uint64_t fsm_token_ = 0;
  bool link_in_l0s_ = false;
  std::uint64_t l0s_token_ = 0;
  TimeNs pkg_available_since_ = 0;

  TimeNs last_t_ = 0;
  double energy_wns_ = 0.0;
  double pc0_energy_wns_ = 0.0;
  std::array<TimeNs, kNumPackageStates> pkg_time_{};
  std::vector<std::array<TimeNs, kNumCoreStates>> core_time_;
  TimeNs all_idle_time_ = 0;
  std::size_t all_idle_periods_ = 0;
  bool last_seg_all_idle_ = false;
  std::size_t pc1a_transitions_ = 0;
  std::size_t pc6_transitions_ = 0;
  std::size_t package_wakes_ = 0;

  std::size_t arrived_ = 0;
  std::size_t served_ = 0;
  std::size_t woken_ = 0;
  double latency_sum_ = 0.0;
  double service_sum_ = 0.0;
  double penalty_sum_ = 0.0;
  TimeNs max_penalty_ = 0;
  TimeNs min_penalty_ = std::numeric_limits<TimeNs>::max();
  std::size_t arrived_total_ = 0;
  std::size_t served_total_ = 0;
  std::vector<TimeNs> latencies_;
  std::vector<std::vector<TraceEvent>> core_events_;
};

}  // namespace

SimResult run_sim(const SimConfig& config) {
  validate_config(config);
  Simulator sim(config);
  return sim.run();
}

CStateTrace export_trace(const SimResult& run) {
  if (!run.trace) throw std::logic_error("run was executed without capture_trace");
  return *run.trace;
}

}  // namespace pkgc
