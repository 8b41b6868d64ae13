#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pkgc/domain.hpp"
#include "pkgc/trace.hpp"

namespace pkgc {

/// Package-state management policy.
///  Shallow: cores use CC1 only, no package C-state (all-idle = PC0_idle).
///  Deep:    CC1 -> CC1E -> CC6 governor; PC6 once every core is in CC6.
///  Pc1a:    cores use CC1 only; the APMU drives ACC1/PC1A.
enum class Policy : std::uint8_t { Shallow, Deep, Pc1a };

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view token);

enum class ArrivalKind : std::uint8_t { Deterministic, Poisson, Bursty };
std::string_view to_string(ArrivalKind k);
std::optional<ArrivalKind> parse_arrival_kind(std::string_view token);

struct ArrivalProcess {
  ArrivalKind kind = ArrivalKind::Poisson;
  double rate_per_s = 0.0;  // long-run average
  // Bursty only: exponentially distributed ON/OFF phases; arrivals are Poisson
  // during ON at rate_per_s * (on + off) / on and absent during OFF.
  double burst_on_ns = 200'000.0;
  double burst_off_ns = 800'000.0;
};

enum class ServiceKind : std::uint8_t { Constant, Exponential };
std::string_view to_string(ServiceKind k);
std::optional<ServiceKind> parse_service_kind(std::string_view token);

struct ServiceTime {
  ServiceKind kind = ServiceKind::Exponential;
  double mean_ns = 20'000.0;
};

/// Idle governor and core wake latencies. Promotion thresholds apply under
/// the Deep policy only and are measured from the moment a core goes idle.
struct GovernorConfig {
  TimeNs cc1e_after_ns = 20'000;
  TimeNs cc6_after_ns = 50'000;
  TimeNs cc1_exit_ns = 0;
  TimeNs cc1e_exit_ns = 10'000;
  TimeNs cc6_exit_ns = 133'000;
};

struct SimConfig {
  std::size_t n_cores = 10;
  ArrivalProcess arrivals{};
  ServiceTime service{};
  Policy policy = Policy::Pc1a;
  PowerProfile power_profile = PowerProfile::skx_default();
  LatencyProfile latency_profile{};
  Pc6Profile pc6_profile{};
  GovernorConfig governor{};
  TimeNs duration_ns = 200'000'000;
  std::optional<TimeNs> warmup_ns;  // default: 5% of duration
  std::uint64_t seed = 1;
  TimeNs network_latency_ns = 117'000;
  /// Extra SoC+DRAM power per core in CC0. Default spreads the gap between the
  /// all-idle baseline and the PC0 ceiling evenly over the cores.
  std::optional<Watts> p_core_active_w;
  /// Periodic GPMU wakeups (timer interrupts); 0 disables them.
  TimeNs gpmu_timer_period_ns = 0;
  std::size_t max_queue = 100'000;
  bool capture_trace = false;
  bool capture_latencies = false;

  TimeNs effective_warmup_ns() const { return warmup_ns.value_or(duration_ns / 20); }
  Watts effective_core_active_w() const;
};

constexpr std::size_t kNumPackageStates = 6;
using PackageFractions = std::array<double, kNumPackageStates>;  // indexed by PackageState

struct SimResult {
  Policy policy = Policy::Pc1a;
  double arrival_rate_per_s = 0.0;
  TimeNs window_ns = 0;

  PackageFractions package_residency{};
  std::vector<StateFractions> core_residency;
  StateFractions core_residency_aggregate{};
  double all_idle_fraction = 0.0;  // every core at CC1 or deeper
  std::size_t all_idle_periods = 0;

  std::size_t pc1a_transitions = 0;  // PC1A entry flows started
  std::size_t pc6_transitions = 0;   // PC6 entry flows started
  std::size_t package_wakes = 0;     // exit flows started

  double energy_joules = 0.0;                // event-by-event segment integral
  double energy_from_residency_joules = 0.0; // same energy rebuilt from residencies
  double avg_power_w = 0.0;
  double p_pc0_at_load_w = 0.0;  // average power while package is PC0

  std::size_t requests_arrived = 0;
  std::size_t requests_served = 0;
  double avg_latency_ns = 0.0;   // server-side, arrival to completion
  double p99_latency_ns = 0.0;
  double avg_service_ns = 0.0;
  double avg_wake_penalty_ns = 0.0;  // averaged over all served requests
  TimeNs max_wake_penalty_ns = 0;
  TimeNs min_wake_penalty_ns = 0;    // over woken requests
  std::size_t woken_requests = 0;    // requests that waited for a package exit
  TimeNs network_latency_ns = 0;

  std::optional<CStateTrace> trace;
  std::vector<TimeNs> latencies_ns;

  double package(PackageState s) const { return package_residency[static_cast<std::size_t>(s)]; }
  double avg_end_to_end_ns() const { return avg_latency_ns + static_cast<double>(network_latency_ns); }
};

class OverloadDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ValidationError("InvalidConfig") listing the first problem found.
void validate_config(const SimConfig& config);

/// Event-driven run of one configuration. Deterministic for a given config.
/// Throws ValidationError for invalid configs and OverloadDetected when the
/// request queue exceeds max_queue.
SimResult run_sim(const SimConfig& config);

/// Per-core C-state trace of a run with capture_trace enabled.
CStateTrace export_trace(const SimResult& run);

/// Arrival rate giving the requested per-core utilization.
double rate_for_utilization(double utilization, std::size_t n_cores, double mean_service_ns);

}  // namespace pkgc
