#pragma once

// Scenario assembly and the verify / classify / mc / certify pipelines behind
// the command-line tool. Each pipeline returns a versioned JSON run report and
// the process exit status.

#include <optional>
#include <string>

#include <json.hpp>

#include "mcurv/config.hpp"

namespace mcurv {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitConfig = 2,
  kExitPrecondition = 3,
  kExitInvariant = 4,
  kExitIndeterminate = 5,
};

struct Scenario {
  ScenarioConfig config;
  ChartPtr chart;
  std::optional<ZonalFlow> flow;
};

Profile build_profile(const ProfileSpec& spec);
ChartPtr build_chart(const ScenarioConfig& config);
// The flow is omitted on a corrupted chart, which has no Killing algebra.
Scenario build_scenario(const ScenarioConfig& config);

// Y for perturbation modes zero, flow and explicit. Explicit bumps use
// t = -q xi + p mu in 3D and t = theta in 2D; in 2D the bump depends on theta
// and therefore does not commute with d_theta.
VectorField build_perturbation(const Scenario& s);

struct RunOptions {
  double resolution_scale = 1.0;
  std::optional<unsigned long long> seed;
  std::string out_dir;            // empty: no files written
  std::string from_certificate;   // certify only
};

struct RunReport {
  nlohmann::json document;
  int exit_code = kExitOk;
};

inline constexpr int kRunReportSchemaVersion = 1;

// Applies --resolution-scale and --seed to a parsed scenario.
ScenarioConfig apply_overrides(ScenarioConfig c, const RunOptions& opt);

RunReport cmd_verify(const ScenarioConfig& c, const RunOptions& opt = {});
RunReport cmd_classify(const ScenarioConfig& c, const RunOptions& opt = {});
RunReport cmd_mc(const ScenarioConfig& c, const RunOptions& opt = {});
// With opt.from_certificate set the scenario comes from the certificate and
// `c` is ignored.
RunReport cmd_certify(const ScenarioConfig& c, const RunOptions& opt = {});

// Runs a command by name, mapping library errors to exit codes. Writes
// report.json into opt.out_dir when it is set.
RunReport run_command(const std::string& command, const std::optional<ScenarioConfig>& c,
                      const RunOptions& opt);

}  // namespace mcurv
