#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pkgc/json_io.hpp"
#include "pkgc/sweep.hpp"

namespace pkgc {

// Report builders behind each CLI subcommand. The CLI only parses flags, calls
// one of these and writes dump(report) to disk or stdout.

/// Full-idle style estimate: every idle instant of the baseline becomes PC1A.
/// r_pc0 = 1 - r_pc1a; p_pc0 defaults to the profile's p_pc0_max.
Json estimate_power_report(const PowerProfile& prof, double r_pc1a, std::optional<Watts> p_pc0);
std::string render_estimate_power(const Json& report);

Json transition_budget_report(const PlatformProfile& profile);
std::string render_transition_budget(const Json& report);

Json simulate_report(const SimConfig& config, const SimResult& result);

/// Shallow vs Pc1a at each rate, plus the analytic latency impact of the
/// measured wakes against the configured network latency.
Json sweep_report(const SimConfig& config, const std::vector<SavingsComparison>& points);
Json sweep_report(const SimConfig& config, const std::vector<double>& rates);

Json analyze_trace_report(const CStateTrace& trace, TimeNs floor_ns, CoreCState gate);

// ---- flows -------------------------------------------------------------------

enum class FlowScenario { Pc1aEntryExit, Pc6EntryExit };
std::string_view to_string(FlowScenario s);
std::optional<FlowScenario> parse_flow_scenario(std::string_view token);

/// Step-by-step trajectory: idle entry, wake by an IO at 1 us (PC1A) or
/// 100 us (PC6), then return to PC0.
Json flow_log(FlowScenario scenario, const PlatformProfile& profile = {});
std::string render_flow_log(const Json& log);

// ---- collation -----------------------------------------------------------------

struct CollatedReport {
  std::string table1_csv;
  std::string fig8_power_csv;    // empty when no sweep.json was found
  std::string fig8_latency_csv;  // empty when no sweep.json was found
  std::vector<std::string> sources;
};

/// Reads sweep.json / result.json / profile.json from dir when present.
CollatedReport collate_reports(const std::filesystem::path& dir);

/// Package-state power table at one-decimal precision, with the modelled
/// PC1A and PC6 round-trip latencies.
std::string table1_csv(const PowerProfile& prof, const PlatformProfile& platform);
std::string table1_csv(const PowerProfile& prof);

}  // namespace pkgc
