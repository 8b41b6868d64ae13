#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pkgc/domain.hpp"

namespace pkgc {

/// A core ENTERS `state` at `timestamp_ns` and holds it until its next event.
struct TraceEvent {
  TimeNs timestamp_ns = 0;
  std::size_t core_id = 0;
  CoreCState state = CoreCState::CC0;

  bool operator==(const TraceEvent&) const = default;
};

/// Time-ordered per-core C-state trace over the half-open window [t_start, t_end).
///
/// Every core has a defined state at t_start, either from an event at or before
/// t_start or from `initial_states`.
struct CStateTrace {
  std::vector<TraceEvent> events;  // sorted by (timestamp, core_id)
  std::size_t n_cores = 0;
  TimeNs t_start = 0;
  TimeNs t_end = 0;
  std::vector<std::optional<CoreCState>> initial_states;  // size n_cores or empty

  TimeNs window_ns() const { return t_end - t_start; }
};

enum class TraceErrorKind { MalformedRow, NonMonotonicTimestamp, UnknownState, MissingInitialState };

std::string_view to_string(TraceErrorKind k);

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(TraceErrorKind kind, std::size_t line, const std::string& detail);
  TraceErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  TraceErrorKind kind_;
  std::size_t line_;
};

/// Parses the CSV trace format:
///
///     # n_cores=<N>                  optional; default max(core_id)+1
///     # window_ns=<start>,<end>      optional; default [first, last] timestamp
///     # initial=<S0>,<S1>,...        optional; state of each core at start
///     timestamp_ns,core_id,cstate    mandatory header
///     <ts>,<core>,<CC0|CC1|CC1E|CC6>
///
/// UTF-8, LF or CRLF line endings. Other `#` lines are ignored. Rows may be
/// interleaved across cores but each core's timestamps must strictly increase
/// and consecutive rows for a core must change state.
CStateTrace parse_trace(std::istream& in);
CStateTrace parse_trace_string(const std::string& text);

/// Inverse of parse_trace; always writes the n_cores and window headers.
void write_trace_csv(std::ostream& out, const CStateTrace& trace);

struct Interval {
  TimeNs start_ns = 0;
  TimeNs end_ns = 0;
  TimeNs duration() const { return end_ns - start_ns; }
  bool operator==(const Interval&) const = default;
};

/// Counts per half-open duration bin. Bin i covers [lower(i), upper_edges[i]),
/// where lower(0) = 0; the last edge is +infinity.
struct Histogram {
  static constexpr TimeNs kInfinity = std::numeric_limits<TimeNs>::max();

  std::vector<TimeNs> upper_edges;
  std::vector<std::size_t> counts;

  TimeNs lower(std::size_t bin) const { return bin == 0 ? 0 : upper_edges[bin - 1]; }
  std::size_t total() const;
  /// Sum of the bins fully inside [lo, hi); lo and hi must be bin edges.
  std::size_t count_in_range(TimeNs lo, TimeNs hi) const;
  bool operator==(const Histogram&) const = default;
};

/// {1us, 10us, 20us, 100us, 200us, 1ms, inf}; an underflow bin [0, 1us) is implicit.
std::vector<TimeNs> default_histogram_edges();

Histogram idle_histogram(const std::vector<Interval>& intervals,
                         const std::vector<TimeNs>& edges = default_histogram_edges());

struct IdleIntervalReport {
  std::vector<Interval> intervals;
  TimeNs window_ns = 0;
  TimeNs total_idle_ns = 0;
  double pc1a_residency_fraction = 0.0;
  Histogram histogram;
  std::size_t n_transitions = 0;

  bool operator==(const IdleIntervalReport&) const = default;
};

/// Maximal sub-intervals of the window during which every core is at `gate`
/// depth or deeper. Sweep-line over the merged event stream.
IdleIntervalReport all_idle_intervals(const CStateTrace& trace,
                                      CoreCState gate = CoreCState::CC1);

/// Drops all-idle intervals shorter than floor_ns, mirroring a sampling tool that
/// cannot see short idle periods.
IdleIntervalReport apply_sampling_floor(const IdleIntervalReport& report, TimeNs floor_ns = 10000);

constexpr std::size_t kNumCoreStates = 4;
using StateFractions = std::array<double, kNumCoreStates>;  // indexed by CoreCState

struct ResidencyReport {
  std::vector<StateFractions> per_core;
  StateFractions aggregate{};  // mean over cores
};

ResidencyReport residency_by_state(const CStateTrace& trace);

struct WakeWidthDistribution {
  /// weight[k] is the relative frequency of exits that wake k+1 cores.
  std::vector<double> weight;
  double mean() const;
};

class DegenerateWorkload : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct LatencyImpact {
  double added_avg_ns = 0.0;
  double relative_fraction = 0.0;
};

/// Average latency added per request when each package wake costs
/// transition_cost_ns to every core it wakes.
LatencyImpact latency_impact(std::size_t n_transitions, TimeNs transition_cost_ns,
                             std::size_t n_requests, TimeNs baseline_latency_ns,
                             const std::optional<WakeWidthDistribution>& wake_width = std::nullopt);

void write_intervals_csv(std::ostream& out, const std::vector<Interval>& intervals);

// ---- batch analysis ---------------------------------------------------------

/// Analyzes independent traces; OpenMP-parallel across traces.
std::vector<IdleIntervalReport> analyze_traces(const std::vector<CStateTrace>& traces,
                                               CoreCState gate = CoreCState::CC1);

/// Serial reference for analyze_traces.
std::vector<IdleIntervalReport> analyze_traces_serial(const std::vector<CStateTrace>& traces,
                                                      CoreCState gate = CoreCState::CC1);

}  // namespace pkgc
