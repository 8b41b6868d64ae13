#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pkgc/domain.hpp"
#include "pkgc/fsm.hpp"
#include "pkgc/sim.hpp"
#include "pkgc/trace.hpp"

namespace pkgc {

// nlohmann::json keeps object keys in a std::map, so every dump is sorted-key.
using Json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pretty-printed, sorted-key, newline-terminated.
std::string dump(const Json& j);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Readers accept partial objects (missing keys keep defaults) and reject
// unknown keys and wrong types with ValidationError(code).

Json to_json(const PowerProfile& p);
Json to_json(const LatencyProfile& p);
Json to_json(const Pc6Profile& p);
Json to_json(const PlatformProfile& p);
PowerProfile power_profile_from_json(const Json& j);
LatencyProfile latency_profile_from_json(const Json& j);
Pc6Profile pc6_profile_from_json(const Json& j);
/// Accepts {"power": ..., "latency": ..., "pc6": ...}.
PlatformProfile platform_from_json(const Json& j);

Json to_json(const GovernorConfig& g);
Json to_json(const SimConfig& c);
SimConfig sim_config_from_json(const Json& j);

Json to_json(const StateFractions& f);
Json to_json(const SimResult& r);
Json to_json(const Histogram& h);
Json to_json(const IdleIntervalReport& r, bool with_intervals = false);
Json to_json(const ResidencyReport& r);
Json to_json(const TransitionBudget& b);
Json to_json(const LatencyImpact& li);
Json to_json(const SignalSet& s);

}  // namespace pkgc
