#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <mcurv/commands.hpp>

#include "support.hpp"

using namespace mcurv;
using namespace mcurv::test;
namespace fs = std::filesystem;

namespace {

ScenarioConfig scenario(const std::string& name) {
  return load_config(std::string(MCURV_SCENARIO_DIR) + "/" + name + ".cfg");
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mcurv_test_" + name);
  fs::remove_all(dir);
  return dir;
}

size_t rectangular_rows(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return 0;
  const auto columns = std::count(line.begin(), line.end(), ',');
  size_t rows = 0;
  while (std::getline(in, line)) {
    if (std::count(line.begin(), line.end(), ',') != columns) return 0;
    ++rows;
  }
  return rows;
}

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("verify exit codes") {
    CHECK(run_command("verify", scenario("sphere2"), {}).exit_code == kExitOk);
    const auto bad = run_command("verify", scenario("corrupted"), {});
    CHECK(bad.exit_code == kExitInvariant);
    CHECK(bad.document.at("result").at("schema") == "mcurv.verify_report");
  }

  TEST_CASE("classify reports verdicts") {
    const auto r = run_command("classify", scenario("certified"), {});
    CHECK(r.exit_code == kExitOk);
    const auto& v = r.document.at("result").at("verdicts");
    CHECK(v.at("zonal") == "yes");
    CHECK(v.at("positive") == true);
    CHECK(v.at("geodesic") == false);
    CHECK(run_command("classify", scenario("geodesic"), {}).document.at("result").at("verdicts").at("geodesic") ==
          true);
  }

  TEST_CASE("mc with Y = Z is zero and writes its files") {
    const fs::path dir = fresh_dir("mc_self");
    ScenarioConfig c = scenario("self");
    c.output.integrand_csv = true;
    RunOptions opt;
    opt.resolution_scale = 0.25;
    opt.out_dir = dir.string();
    const auto r = run_command("mc", c, opt);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.document.at("result").at("mc_direct").get<double>() == 0.0);
    CHECK(r.document.at("schema") == "mcurv.run_report");
    CHECK(r.document.contains("input_digest"));
    CHECK(fs::exists(dir / "report.json"));
    CHECK(rectangular_rows(dir / "integrand.csv") > 0);
    fs::remove_all(dir);
  }

  TEST_CASE("certify refuses a geodesic flow") {
    RunOptions opt;
    opt.resolution_scale = 0.25;
    const auto r = run_command("certify", scenario("geodesic"), opt);
    CHECK(r.exit_code == kExitPrecondition);
    CHECK(r.document.at("error").at("kind") == "precondition");
  }

  TEST_CASE("certificate replays") {
    const fs::path dir = fresh_dir("certify");
    RunOptions opt;
    opt.resolution_scale = 0.5;
    opt.out_dir = dir.string();
    const auto first = run_command("certify", scenario("certified_explicit"), opt);
    CHECK(first.exit_code == kExitOk);
    REQUIRE(fs::exists(dir / "certificate.json"));
    RunOptions replay;
    replay.from_certificate = (dir / "certificate.json").string();
    const auto second = run_command("certify", std::nullopt, replay);
    CHECK(second.exit_code == kExitOk);
    CHECK(second.document.at("replay").at("reproduced") == true);
    CHECK(second.document.at("replay").at("mc_direct_difference").get<double>() == 0.0);
    fs::remove_all(dir);
  }

  TEST_CASE("usage errors map to the config exit code") {
    CHECK(run_command("verify", std::nullopt, {}).exit_code == kExitConfig);
    CHECK(run_command("frobnicate", scenario("sphere2"), {}).exit_code == kExitConfig);
    ScenarioConfig c = scenario("sphere2");
    c.perturbation.mode = "none";
    CHECK(run_command("mc", c, {}).exit_code != kExitOk);
  }

  TEST_CASE("overrides scale the resolution and set the seed") {
    RunOptions opt;
    opt.resolution_scale = 0.5;
    opt.seed = 7;
    const auto c = apply_overrides(scenario("certified"), opt);
    CHECK(c.resolution() == std::array<int, kMaxDim>{16, 16, 48});
    CHECK(c.perturbation.seed == 7);
  }
}
