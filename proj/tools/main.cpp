#include <CLI11.hpp>
#include <iostream>

#include "mcurv/commands.hpp"
#include "mcurv/errors.hpp"
#include "mcurv/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mcurv: Misiolek curvature of zonal flows on ellipsoids"};
  app.set_version_flag("--version", mcurv::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  mcurv::RunOptions opt;
  unsigned long long seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "directory for report.json and CSV outputs");
    sub->add_option("--resolution-scale", opt.resolution_scale, "multiplies every quadrature resolution");
    sub->add_option("--seed", seed, "seed for sampling and the perturbation search");
  };
  auto* verify = app.add_subcommand("verify", "run the invariant suite on the configured chart and flow");
  auto* classify = app.add_subcommand("classify", "classify the configured zonal flow");
  auto* mc = app.add_subcommand("mc", "evaluate mc(Z, Y) with every applicable formula");
  auto* certify = app.add_subcommand("certify", "search for a positivity certificate or replay one");
  for (auto* sub : {verify, classify, mc, certify}) add_common(sub);
  certify->add_option("--from-certificate", opt.from_certificate, "replay and re-validate a certificate")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mcurv::kExitConfig;
  }
  const CLI::App* active = app.get_subcommands().front();
  const std::string command = active->get_name();
  if (active->count("--seed") > 0) opt.seed = seed;

  std::optional<mcurv::ScenarioConfig> config;
  if (!config_path.empty()) {
    try {
      config = mcurv::load_config(config_path);
    } catch (const mcurv::ConfigError& e) {
      std::cerr << config_path << ": " << e.what() << "\n";
      return mcurv::kExitConfig;
    }
  }

  const mcurv::RunReport run = mcurv::run_command(command, config, opt);
  std::cout << run.document.dump(2) << "\n";
  if (run.document.contains("error"))
    std::cerr << "mcurv " << command << ": " << run.document["error"]["message"].get<std::string>() << "\n";
  return run.exit_code;
}
