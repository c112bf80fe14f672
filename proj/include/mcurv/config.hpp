#pragma once

// Scenario files: one `dotted.key = value` per line, `#` starts a comment.
// Lists are comma separated. Unknown keys, duplicates, malformed values and
// keys that do not apply to the chosen manifold, profile family or
// perturbation mode are rejected with the offending line and key.

#include <optional>
#include <string>
#include <vector>

#include "mcurv/perturbation.hpp"

namespace mcurv {

struct ProfileSpec {
  std::string family = "bump";  // bump | raised_cosine | cos2_polynomial | table | constant
  double lo = 0.35, hi = 0.95, peak = 0.85;  // bump
  double center = 0.6, width = 0.25;         // raised_cosine
  double amplitude = 1.0;                    // bump, raised_cosine
  std::vector<double> coefficients;          // cos2_polynomial
  std::vector<double> xs, fs;                // table
  int degree = 3;                            // table
  double value = 1.0;                        // constant
  std::optional<double> mirror_about;
};

struct ScenarioConfig {
  struct Manifold {
    std::string kind = "ellipsoid3d";  // ellipsoid2d | ellipsoid3d | sphere2 | flat_torus
    double a = 2.0;
    int profile_resolution = 256;
    int dim = 2;                        // flat_torus only
    std::string corruption = "none";   // none | negate_g22
  } manifold;

  struct Flow {
    bool present = false;
    double p = 1.0, q = 0.0;
    std::string pq_kind = "integer";  // integer | irrational
    ProfileSpec profile;
  } flow;

  struct Perturbation {
    std::string mode = "none";  // none | zero | flow | explicit | search
    BumpProfile bump;
    std::string weighting = "density";  // density | none
    int budget = 200;
    unsigned long long seed = 0;
    double min_margin = 0.01;
  } perturbation;

  struct Quadrature {
    std::vector<int> resolution;  // empty: 32 per periodic axis, 96 on the profile axis
    double collar = 1e-3;
  } quadrature;

  struct Output {
    bool integrand_csv = false;
    bool profile_csv = false;
  } output;

  int dim() const;
  std::array<int, kMaxDim> resolution() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Canonical text: every resolved key in a fixed order, numbers in shortest
// round-trip form. serialize(parse(serialize(c))) == serialize(c).
std::string serialize_config(const ScenarioConfig& c);

// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_digest(const ScenarioConfig& c);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace mcurv
