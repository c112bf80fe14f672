#include <doctest.h>

#include <filesystem>

#include <mcurv/config.hpp>
#include <mcurv/errors.hpp>

#include "support.hpp"

using namespace mcurv;
using namespace mcurv::test;

namespace {

// Random valid scenario covering every manifold, profile family and mode.
ScenarioConfig random_config(std::mt19937_64& rng) {
  ScenarioConfig c;
  const char* kinds[] = {"ellipsoid3d", "ellipsoid2d", "sphere2"};
  c.manifold.kind = kinds[uniform_int(rng, 0, 2)];
  const bool three = c.manifold.kind == "ellipsoid3d";
  if (c.manifold.kind != "sphere2") c.manifold.a = uniform(rng, 0.3, 3.0);
  if (c.manifold.kind == "ellipsoid2d") c.manifold.profile_resolution = uniform_int(rng, 8, 512);

  c.flow.present = true;
  if (three) {
    c.flow.p = uniform_int(rng, 0, 3);
    c.flow.q = uniform_int(rng, 1, 3);
  }
  ProfileSpec& pr = c.flow.profile;
  switch (uniform_int(rng, 0, 4)) {
    case 0:
      pr.family = "bump";
      pr.lo = uniform(rng, 0.1, 0.3);
      pr.peak = uniform(rng, 0.4, 0.6);
      pr.hi = uniform(rng, 0.7, 1.0);
      pr.amplitude = uniform(rng, 0.1, 2.0);
      break;
    case 1:
      pr.family = "raised_cosine";
      pr.center = uniform(rng, 0.2, 1.0);
      pr.width = uniform(rng, 0.1, 0.5);
      pr.amplitude = uniform(rng, 0.1, 2.0);
      break;
    case 2:
      pr.family = "cos2_polynomial";
      for (int k = 0, n = uniform_int(rng, 1, 4); k < n; ++k) pr.coefficients.push_back(uniform(rng, -1, 1));
      break;
    case 3: {
      pr.family = "table";
      double x = uniform(rng, 0.0, 0.2);
      for (int k = 0, n = uniform_int(rng, 2, 6); k < n; ++k) {
        pr.xs.push_back(x);
        pr.fs.push_back(uniform(rng, 0, 1));
        x += uniform(rng, 0.05, 0.3);
      }
      pr.degree = uniform_int(rng, 0, 1) ? 3 : 1;
      break;
    }
    default:
      pr.family = "constant";
      pr.value = uniform(rng, -2, 2);
  }
  if (uniform_int(rng, 0, 3) == 0) pr.mirror_about = uniform(rng, 0.3, 0.9);

  const char* modes[] = {"none", "zero", "flow", "explicit", "search"};
  c.perturbation.mode = modes[uniform_int(rng, 0, three ? 4 : 3)];
  if (c.perturbation.mode == "explicit" || c.perturbation.mode == "search") {
    c.perturbation.bump.chi0 = uniform(rng, 0.4, 0.8);
    c.perturbation.bump.radius = uniform(rng, 0.05, 0.3);
    c.perturbation.bump.t_half_width = uniform(rng, 0.5, 3.0);
    c.perturbation.bump.amplitude = uniform(rng, 0.1, 2.0);
  }
  if (c.perturbation.mode == "explicit" && uniform_int(rng, 0, 1)) c.perturbation.weighting = "none";
  if (c.perturbation.mode == "search") {
    c.perturbation.budget = uniform_int(rng, 1, 500);
    c.perturbation.seed = rng();
    c.perturbation.min_margin = uniform(rng, 0.001, 0.05);
  }
  for (int i = 0, d = three ? 3 : 2; i < d; ++i) c.quadrature.resolution.push_back(uniform_int(rng, 4, 128));
  c.quadrature.collar = uniform(rng, 1e-6, 0.1);
  c.output.integrand_csv = uniform_int(rng, 0, 1);
  c.output.profile_csv = uniform_int(rng, 0, 1);
  return c;
}

std::string error_of(const std::string& text, int* line = nullptr, std::string* field = nullptr) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    if (line) *line = e.line();
    if (field) *field = e.field();
    return e.what();
  }
  return {};
}

const char* kMinimal =
    "manifold.kind = ellipsoid3d\n"
    "manifold.a = 2\n"
    "flow.p = 1\n"
    "flow.q = 0\n";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal scenario and defaults") {
    const auto c = parse_config(kMinimal);
    CHECK(c.manifold.kind == "ellipsoid3d");
    CHECK(c.flow.present);
    CHECK(c.dim() == 3);
    CHECK(c.resolution() == std::array<int, kMaxDim>{32, 32, 96});
    CHECK(c.perturbation.mode == "none");
  }

  TEST_CASE("canonical text is a fixed point of parse and serialize") {
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 200; ++trial) {
      const ScenarioConfig c = random_config(rng);
      const std::string once = serialize_config(c);
      ScenarioConfig parsed;
      REQUIRE_NOTHROW(parsed = parse_config(once));
      CHECK(serialize_config(parsed) == once);
      CHECK(config_digest(parsed) == config_digest(c));
      CHECK(parsed.quadrature.collar == c.quadrature.collar);
      CHECK(parsed.flow.profile.xs == c.flow.profile.xs);
    }
  }

  TEST_CASE("digest depends on every value") {
    auto a = parse_config(kMinimal);
    auto b = a;
    b.manifold.a = std::nextafter(2.0, 3.0);
    CHECK(config_digest(a) != config_digest(b));
    CHECK(config_digest(a).size() == 16);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  }

  TEST_CASE("comments and blank lines are ignored") {
    const auto c = parse_config("# scenario\n\nmanifold.kind = sphere2   # round\nflow.profile.family = constant\n");
    CHECK(c.manifold.kind == "sphere2");
    CHECK(c.flow.profile.family == "constant");
  }

  TEST_CASE("errors carry the line and key") {
    int line = 0;
    std::string field;
    CHECK(error_of("manifold.kind = sphere2\nmanifold.colour = red\n", &line, &field).find("unknown key") !=
          std::string::npos);
    CHECK(line == 2);
    CHECK(field == "manifold.colour");

    CHECK(error_of(std::string(kMinimal) + "manifold.a = 3\n", &line).find("duplicate") != std::string::npos);
    CHECK(line == 5);

    CHECK(error_of("manifold.kind = ellipsoid3d\nmanifold.a = two\n", &line, &field).find("number") !=
          std::string::npos);
    CHECK(line == 2);
    CHECK(field == "manifold.a");

    CHECK(error_of("manifold.kind = cube\n", &line, &field) != "");
    CHECK(field == "manifold.kind");

    CHECK(error_of("manifold.kind = sphere2\nmanifold.a = 2\n", &line, &field).find("does not apply") !=
          std::string::npos);
    CHECK(field == "manifold.a");

    CHECK(error_of("manifold.kind\n", &line) != "");
    CHECK(line == 1);
  }

  TEST_CASE("semantic checks") {
    CHECK(error_of(std::string(kMinimal) + "flow.p = 1.5\n") != "");
    CHECK(error_of("manifold.kind = ellipsoid3d\nperturbation.mode = explicit\n") != "");
    CHECK(error_of("manifold.kind = ellipsoid2d\nflow.profile.family = constant\nperturbation.mode = search\n") != "");
    CHECK(error_of(std::string(kMinimal) + "quadrature.resolution = 8, 8\n") != "");
    CHECK(error_of(std::string(kMinimal) + "quadrature.collar = 0.5\n") != "");
    CHECK(error_of(std::string(kMinimal) + "flow.profile.lo = 0.9\n") != "");
    CHECK(error_of("manifold.kind = ellipsoid3d\nflow.p = 1\nflow.q = 1.4142135623730951\nflow.pq_kind = irrational\n") == "");
  }

  TEST_CASE("shipped scenarios parse") {
    int count = 0;
    for (const auto& e : std::filesystem::directory_iterator(MCURV_SCENARIO_DIR)) {
      if (e.path().extension() != ".cfg") continue;
      CAPTURE(e.path().string());
      CHECK_NOTHROW(load_config(e.path().string()));
      ++count;
    }
    CHECK(count >= 8);
    CHECK_THROWS_AS(load_config("/nonexistent/scenario.cfg"), ConfigError);
  }
}
