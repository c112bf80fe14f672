#pragma once

// Invariant suite for a chart (and optionally a zonal flow on it): metric
// sanity, Christoffel symbols, Killing identities, jets against finite
// differences, torsion and metric compatibility.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcurv/zonal.hpp"

namespace mcurv {

enum class CheckStatus { Pass, Fail, Skipped };
std::string to_string(CheckStatus s);

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;
};

struct VerifyReport {
  std::string chart_kind;
  std::vector<Check> checks;

  bool all_pass() const;
  int failures() const;
  nlohmann::json to_json() const;
};

inline constexpr int kVerifyReportSchemaVersion = 1;

struct VerifyOptions {
  double collar = 1e-3;
  int grid_per_axis = 20;
  int random_points = 500;
  unsigned long long seed = 0;
  double identity_tolerance = 1e-8;
  double fd_step = 1e-5;
  double fd_tolerance = 1e-6;
};

VerifyReport verify_chart(const ChartPtr& chart, const VerifyOptions& opt = {},
                          const ZonalFlow* flow = nullptr);

// Smooth random test fields built from a few sinusoids; frequencies along
// periodic axes are integers so the fields are periodic.
ScalarField random_scalar_field(const ChartPtr& chart, std::mt19937_64& rng);
VectorField random_vector_field(const ChartPtr& chart, std::mt19937_64& rng);

// max over samples of the central-difference error of the first and second
// partials of a jet-valued map, relative to the largest partial seen.
double jet_fd_error(const Chart& chart, const std::function<Jet(const Point&)>& f,
                    const std::vector<Point>& samples, double step);

}  // namespace mcurv
