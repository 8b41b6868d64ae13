#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pkgc {

/// Simulation time in nanoseconds.
using TimeNs = std::uint64_t;

/// Power in watts.
using Watts = double;

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

/// Core idle states. Declaration order is the depth order (deeper = lower power).
enum class CoreCState : std::uint8_t { CC0, CC1, CC1E, CC6 };

/// IO link states. Declaration order is NOT the power order; use io_power_rank().
enum class IoLState : std::uint8_t { L0, L0s, L0p, L1, NDA };

enum class DramPowerMode : std::uint8_t { Active, CkeOff, SelfRefresh };

enum class PackageState : std::uint8_t { PC0, PC0_idle, PC2, PC6, ACC1, PC1A };

constexpr int depth(CoreCState s) { return static_cast<int>(s); }

constexpr bool deeper_or_equal(CoreCState a, CoreCState b) { return depth(a) >= depth(b); }

/// Gate predicate used by both the APMU and the trace analyzer: CC1E and CC6
/// count as "CC1 or deeper".
constexpr bool at_least_cc1(CoreCState s) { return depth(s) >= depth(CoreCState::CC1); }

/// Power rank of a link state: L0 > L0p > L0s > L1 >= NDA. Higher rank draws more power.
constexpr int io_power_rank(IoLState s) {
  switch (s) {
    case IoLState::L0: return 4;
    case IoLState::L0p: return 3;
    case IoLState::L0s: return 2;
    case IoLState::L1: return 1;
    case IoLState::NDA: return 0;
  }
  return 0;
}

/// InL0s predicate: the link is in L0s or any state at least as deep.
constexpr bool in_l0s_or_deeper(IoLState s) { return s != IoLState::L0; }

std::string_view to_string(CoreCState s);
std::string_view to_string(IoLState s);
std::string_view to_string(DramPowerMode m);
std::string_view to_string(PackageState s);

std::optional<CoreCState> parse_core_cstate(std::string_view token);
std::optional<PackageState> parse_package_state(std::string_view token);

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

/// Package-level SoC/DRAM power figures for a 10-core Skylake-SP server, plus the
/// component deltas that separate PC1A from PC6. Defaults reproduce the measured
/// platform values; p_pc1a_* are the composed results.
struct PowerProfile {
  Watts p_pc0_max = 92.0;
  Watts p_pc0_idle_soc = 44.0;
  Watts p_pc0_idle_dram = 5.5;
  Watts p_pc6_soc = 11.9;
  Watts p_pc6_dram = 0.51;
  Watts p_cores_diff = 12.1;
  Watts p_ios_diff = 3.5;
  Watts p_dram_diff = 1.1;
  Watts p_pll_each = 0.007;
  int n_plls_awake = 8;
  // Same summation order as compose_pc1a_power() so the defaults are bit-identical.
  Watts p_pc1a_soc = p_pc6_soc + p_cores_diff + p_ios_diff + n_plls_awake * p_pll_each;
  Watts p_pc1a_dram = p_pc6_dram + p_dram_diff;

  Watts pc0_idle_total() const { return p_pc0_idle_soc + p_pc0_idle_dram; }
  Watts pc6_total() const { return p_pc6_soc + p_pc6_dram; }
  Watts pc1a_total() const { return p_pc1a_soc + p_pc1a_dram; }

  static PowerProfile skx_default() { return PowerProfile{}; }
  /// skx_default with the PC1A levels as quoted in the platform power table
  /// (27.5 W + 1.6 W = 29.1 W).
  static PowerProfile table1() {
    PowerProfile p;
    p.p_pc1a_soc = 27.5;
    p.p_pc1a_dram = 1.6;
    return p;
  }

  bool operator==(const PowerProfile&) const = default;
};

/// Component latencies that compose the PC1A entry/exit time.
struct LatencyProfile {
  double pmu_clock_hz = 500e6;
  double l0s_exit_ns = 64.0;
  double l0s_entry_fraction = 0.25;
  double cke_entry_ns = 10.0;
  double cke_exit_ns = 24.0;
  double fivr_slew_mv_per_ns = 2.0;
  double v_nominal_mv = 800.0;
  double v_retention_mv = 500.0;
  int clock_gate_cycles = 2;
  int signal_assert_cycles = 2;

  bool operator==(const LatencyProfile&) const = default;
};

/// Firmware-sequenced PC6 flow constants. These are microsecond-scale and only
/// their total (> 50 us round trip) is anchored to measurement.
struct Pc6Profile {
  double firmware_entry_ns = 20000.0;
  double firmware_exit_ns = 30000.0;
  double io_l1_entry_ns = 4000.0;
  double io_l1_exit_ns = 16000.0;
  double dram_sr_entry_ns = 1000.0;
  double dram_sr_exit_ns = 10000.0;
  double pll_off_ns = 500.0;
  double pll_relock_ns = 5000.0;

  bool operator==(const Pc6Profile&) const = default;
};

/// Everything a platform description file carries.
struct PlatformProfile {
  PowerProfile power = PowerProfile::skx_default();
  LatencyProfile latency{};
  Pc6Profile pc6{};

  bool operator==(const PlatformProfile&) const = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Violations are data. An empty list means the profile is valid.
struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view name) const;
};

/// Checks "nonnegative", "ordering" (pc6 <= pc1a <= pc0_idle <= pc0_max on the
/// SoC rail) and "composition" (cached p_pc1a_* match the component sum).
ValidationResult validate_profile(const PowerProfile& profile);

/// Checks "voltage_order", "nonnegative_latency", "pmu_clock" and "fraction_range".
ValidationResult validate_latency_profile(const LatencyProfile& profile);

ValidationResult validate_pc6_profile(const Pc6Profile& profile);

/// Thrown at API boundaries that require a valid input (simulator config,
/// CLI inputs). Carries a stable machine-readable code.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Cycles at the given clock rounded up to whole nanoseconds.
TimeNs cycles_to_ns(int cycles, double clock_hz);

/// Rounds a non-negative nanosecond quantity up to an integer.
TimeNs ceil_ns(double ns);

}  // namespace pkgc
