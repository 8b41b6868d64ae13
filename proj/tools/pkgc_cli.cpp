// pkgc: command-line front end for the package C-state models.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pkgc/fsm.hpp"
#include "pkgc/json_io.hpp"
#include "pkgc/power_model.hpp"
#include "pkgc/reports.hpp"
#include "pkgc/sim.hpp"
#include "pkgc/sweep.hpp"
#include "pkgc/trace.hpp"

namespace fs = std::filesystem;
using namespace pkgc;

namespace {

PlatformProfile default_platform() {
  PlatformProfile p;
  p.power = PowerProfile::table1();
  return p;
}

// A profile file is either a platform object {"power", "latency", "pc6"} or a
// bare power profile.
PlatformProfile load_profile(const std::string& path) {
  if (path.empty()) return default_platform();
  const Json j = read_json_file(path);
  if (j.is_object() && (j.contains("power") || j.contains("latency") || j.contains("pc6"))) {
    return platform_from_json(j);
  }
  PlatformProfile p;
  p.power = power_profile_from_json(j);
  return p;
}

SimConfig load_config(const std::string& path) {
  SimConfig c = sim_config_from_json(read_json_file(path));
  if (const char* env = std::getenv("PKGC_SIM_SEED"); env && *env) {
    std::uint64_t seed = 0;
    std::istringstream in(env);
    if (!(in >> seed) || !in.eof()) {
      throw ValidationError("InvalidConfig", std::string("PKGC_SIM_SEED is not an unsigned integer: ") + env);
    }
    c.seed = seed;
  }
  return c;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

std::vector<double> parse_rates(const std::string& list) {
  std::vector<double> rates;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw ValidationError("InvalidConfig", "bad rate \"" + item + "\" in --rates");
    }
    rates.push_back(v);
  }
  if (rates.empty()) throw ValidationError("InvalidConfig", "--rates is empty");
  return rates;
}

std::string to_csv(const std::vector<TimeNs>& values, const char* header) {
  std::ostringstream out;
  out << header << '\n';
  for (auto v : values) out << v << '\n';
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"Package C-state power and latency models: PC1A vs PC6 vs no package C-state"};
  app.name("pkgc");
  app.require_subcommand(1, 1);

  // simulate
  std::string sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write result.json");
  simulate->add_option("--config", sim_config, "Simulation config JSON")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();

  // sweep
  std::string sweep_config, sweep_rates, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Shallow vs PC1A across arrival rates; writes sweep.json");
  sweep->add_option("--config", sweep_config, "Simulation config JSON")->required();
  sweep->add_option("--rates", sweep_rates, "Comma-separated arrival rates (req/s), ascending")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  // analyze-trace
  std::string trace_path, trace_out, gate_name = "CC1";
  TimeNs floor_ns = 10'000;
  auto* analyze = app.add_subcommand("analyze-trace", "All-idle intervals and residency of a C-state trace");
  analyze->add_option("--trace", trace_path, "Trace CSV")->required();
  analyze->add_option("--floor-ns", floor_ns, "Sampling floor for the sampled view")->capture_default_str();
  analyze->add_option("--gate", gate_name, "Shallowest core state counted as idle")->capture_default_str();
  analyze->add_option("--out", trace_out, "Output directory")->required();

  // estimate-power
  std::string est_profile;
  double r_pc1a = 0.0;
  double p_pc0 = 0.0;
  bool est_json = false;
  auto* estimate = app.add_subcommand("estimate-power", "Savings from PC1A residency");
  estimate->add_option("--profile", est_profile, "Profile JSON (default: built-in Skylake-SP table)");
  estimate->add_option("--r-pc1a", r_pc1a, "PC1A residency fraction in [0, 1]")->required();
  auto* p_pc0_opt = estimate->add_option("--p-pc0", p_pc0, "Average PC0 power at load in W (default p_pc0_max)");
  estimate->add_flag("--json", est_json, "Print the JSON report");

  // transition-budget
  std::string budget_profile;
  bool budget_json = false;
  auto* budget = app.add_subcommand("transition-budget", "PC1A and PC6 entry/exit latency");
  budget->add_option("--profile", budget_profile, "Profile JSON (default: built-in Skylake-SP table)");
  budget->add_flag("--json", budget_json, "Print the JSON report");

  // explain-flow
  std::string scenario_name, flow_log_path, flow_profile, flow_out;
  auto* explain = app.add_subcommand("explain-flow", "Step-by-step package flow with signals and actions");
  auto* scenario_opt = explain->add_option("--scenario", scenario_name, "Flow to run")
                           ->check(CLI::IsMember({"pc1a-entry-exit", "pc6-entry-exit"}));
  auto* log_opt = explain->add_option("--log", flow_log_path, "Render an existing flow log JSON instead");
  scenario_opt->excludes(log_opt);
  explain->add_option("--profile", flow_profile, "Profile JSON (default: built-in Skylake-SP table)");
  explain->add_option("--out", flow_out, "Also write flow_log.json to this directory");

  // report
  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Collate table1.csv and fig8 CSVs from an output directory");
  report->add_option("--in", report_in, "Directory holding sweep.json / result.json")->required();
  report->add_option("--out", report_out, "Output directory (default: --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "pkgc-error: UsageError: " << e.what() << '\n';
    return 1;
  }

  if (*simulate) {
    const SimConfig cfg = load_config(sim_config);
    const SimResult res = run_sim(cfg);
    ensure_dir(sim_out);
    write_text_file(fs::path(sim_out) / "result.json", dump(simulate_report(cfg, res)));
    if (res.trace) {
      std::ostringstream csv;
      write_trace_csv(csv, *res.trace);
      write_text_file(fs::path(sim_out) / "trace.csv", csv.str());
    }
    if (cfg.capture_latencies) {
      write_text_file(fs::path(sim_out) / "latencies.csv", to_csv(res.latencies_ns, "latency_ns"));
    }
    std::cout << "policy " << to_string(res.policy) << ": avg power " << res.avg_power_w << " W, served "
              << res.requests_served << ", avg latency " << res.avg_latency_ns << " ns\n";
  } else if (*sweep) {
    const SimConfig cfg = load_config(sweep_config);
    const Json rep = sweep_report(cfg, parse_rates(sweep_rates));
    ensure_dir(sweep_out);
    write_text_file(fs::path(sweep_out) / "sweep.json", dump(rep));
    for (const auto& p : rep.at("points")) {
      std::cout << "rate " << p.at("rate_per_s").get<double>() << "/s: savings "
                << p.at("measured_savings").get<double>() * 100.0 << "%\n";
    }
  } else if (*analyze) {
    const auto gate = parse_core_cstate(gate_name);
    if (!gate) throw ValidationError("InvalidConfig", "unknown gate state \"" + gate_name + "\"");
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + trace_path);
    const CStateTrace trace = parse_trace(in);
    const Json rep = analyze_trace_report(trace, floor_ns, *gate);
    ensure_dir(trace_out);
    write_text_file(fs::path(trace_out) / "analysis.json", dump(rep));
    std::ostringstream iv;
    write_intervals_csv(iv, all_idle_intervals(trace, *gate).intervals);
    write_text_file(fs::path(trace_out) / "intervals.csv", iv.str());
    std::cout << rep.at("all_idle").at("n_intervals").get<std::size_t>() << " all-idle intervals, residency "
              << rep.at("all_idle").at("pc1a_residency_fraction").get<double>() << '\n';
  } else if (*estimate) {
    const PlatformProfile prof = load_profile(est_profile);
    std::optional<Watts> p0;
    if (p_pc0_opt->count() > 0) p0 = p_pc0;
    const Json rep = estimate_power_report(prof.power, r_pc1a, p0);
    std::cout << (est_json ? dump(rep) : render_estimate_power(rep));
  } else if (*budget) {
    const Json rep = transition_budget_report(load_profile(budget_profile));
    std::cout << (budget_json ? dump(rep) : render_transition_budget(rep));
  } else if (*explain) {
    Json log;
    if (log_opt->count() > 0) {
      log = read_json_file(flow_log_path);
    } else if (scenario_opt->count() > 0) {
      log = flow_log(*parse_flow_scenario(scenario_name), load_profile(flow_profile));
    } else {
      throw ValidationError("InvalidConfig", "explain-flow needs --scenario or --log");
    }
    if (!flow_out.empty()) {
      ensure_dir(flow_out);
      write_text_file(fs::path(flow_out) / "flow_log.json", dump(log));
    }
    try {
      std::cout << render_flow_log(log);
    } catch (const Json::exception& e) {
      throw ValidationError("InvalidJson", std::string("malformed flow log: ") + e.what());
    }
  } else if (*report) {
    const CollatedReport col = collate_reports(report_in);
    const fs::path out = report_out.empty() ? fs::path(report_in) : fs::path(report_out);
    ensure_dir(out);
    write_text_file(out / "table1.csv", col.table1_csv);
    std::cout << (out / "table1.csv").string() << '\n';
    if (!col.fig8_power_csv.empty()) {
      write_text_file(out / "fig8_power.csv", col.fig8_power_csv);
      write_text_file(out / "fig8_latency.csv", col.fig8_latency_csv);
      std::cout << (out / "fig8_power.csv").string() << '\n' << (out / "fig8_latency.csv").string() << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::string code;
  std::string message;
  int status = 0;
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    code = "IoError", message = e.what(), status = 2;
  } catch (const ValidationError& e) {
    code = e.code(), message = e.what(), status = 1;
  } catch (const TraceParseError& e) {
    code = "TraceParseError", message = e.what(), status = 1;
  } catch (const IllegalEvent& e) {
    code = "IllegalEvent", message = e.what(), status = 1;
  } catch (const InvalidResidency& e) {
    code = "InvalidResidency", message = e.what(), status = 1;
  } catch (const DegenerateBaseline& e) {
    code = "DegenerateBaseline", message = e.what(), status = 1;
  } catch (const DegenerateWorkload& e) {
    code = "DegenerateWorkload", message = e.what(), status = 1;
  } catch (const OverloadDetected& e) {
    code = "OverloadDetected", message = e.what(), status = 1;
  } catch (const Json::exception& e) {
    code = "InvalidJson", message = e.what(), status = 1;
  } catch (const fs::filesystem_error& e) {
    code = "IoError", message = e.what(), status = 2;
  }
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "pkgc-error: " << code << ": " << message << '\n';
  return status;
}
