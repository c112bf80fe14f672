#pragma once

// Divergence-free rotational bump fields and the positivity certificate search.
//
// A bump lives in a plane spanned by a transverse angle t (an integer
// combination of periodic coordinates) and the profile coordinate s. In that
// plane
//   Y0 = A rho(R) ((s - s0) / lambda d_t - lambda (t - t0) d_s),
//   R^2 = (lambda^2 (t - t0)^2 + (s - s0)^2) / radius^2, lambda = radius / t_half_width,
// which has zero flat divergence. Lifting d_t to (c . d) / |c|^2 and dividing by
// the chart volume density H gives a field with zero Riemannian divergence.
// When c is orthogonal to the Killing direction the lift commutes with X.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcurv/mc.hpp"

namespace mcurv {

struct BumpProfile {
  double t0 = 0.0;
  double chi0 = 0.6;
  double radius = 0.24;
  double amplitude = 1.0;
  // Half extent of the support along t; must be below pi.
  double t_half_width = 3.0;

  double lambda() const { return radius / t_half_width; }
  Interval chi_support() const { return {chi0 - radius, chi0 + radius}; }
};

struct PerturbationField {
  VectorField Y;
  ScalarField H;  // chart volume density relative to the flat coordinate density
  BumpProfile bump;
  std::array<int, kMaxDim> t_coefficients{};
  int profile_axis = -1;
  bool weighted = true;
};

// Bump with t = sum_i c_i x_i over the periodic axes. With `weighted` false the
// division by H is skipped, which breaks the divergence-free property.
PerturbationField rotational_bump(const ChartPtr& chart, const std::array<int, kMaxDim>& c,
                                  const BumpProfile& bump, bool weighted = true);

// Y = rho(|x - center| / radius) ((y - y0) d_x - (x - x0) d_y) on a chart whose
// first two coordinates are Euclidean.
VectorField planar_rotational_bump(const ChartPtr& chart, double x0, double y0, double radius);

// The commuting bump for a zonal flow on the 3D ellipsoid: t = -q xi + p mu.
// Throws CapabilityError for a = 1 or a non-integer direction, and
// ConstructionError when the support leaves U+ or the trimmed chart.
PerturbationField build_commuting_bump(const ZonalFlow& z, const BumpProfile& bump,
                                       double collar = 1e-3,
                                       const std::optional<std::vector<Interval>>& u_plus = {});

struct ConditionReport {
  double divergence = 0.0;     // (a) max |div Y|
  double commutator = 0.0;     // (b) max |[X,Y]|
  bool support_in_u_plus = false;
  double support_margin = 0.0; // (c) distance from supp Y to the boundary of U+
  int support_violations = 0;  // sampled support points with sgn(Z) != +1
  double max_y_h = 0.0;        // (d) max |Y(||X||^2)| over the support

  bool holds(double tol = 1e-8) const {
    return divergence <= tol && commutator <= tol && support_in_u_plus && support_margin > 0.0 &&
           max_y_h > 0.0;
  }
  nlohmann::json to_json() const;
};

// Evaluates the four conditions on a sample grid. When `declared_support` is
// given, the margin is measured from that profile-axis interval instead of the
// sampled support.
ConditionReport condition_report(const VectorField& Y, const ZonalFlow& z,
                                 const std::optional<Interval>& declared_support = {},
                                 double collar = 1e-3);

struct SearchOptions {
  int budget = 200;
  unsigned long long seed = 0;
  std::array<int, kMaxDim> resolution = {32, 32, 96};
  double collar = 1e-3;
  double min_margin = 0.01;
  double t_half_width = 3.0;
  double step_tolerance = 1e-3;
  std::optional<BumpProfile> initial;
};

struct SearchTrace {
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
  double best_objective = 0.0;
};

struct Certificate {
  std::string verdict;  // "positive" or "indeterminate"
  BumpProfile bump;
  std::array<int, kMaxDim> t_coefficients{};
  ConditionReport conditions;
  McReport report;
  SearchTrace trace;
  ClassificationReport classification;
  nlohmann::json scenario;  // filled by the caller

  nlohmann::json to_json() const;
};

inline constexpr int kCertificateSchemaVersion = 1;

// Pattern search over (chi0, radius, amplitude) maximizing the commuting
// formula, followed by validation with every formula at doubled resolution.
// Throws PreconditionError when the flow is not a non-geodesic positive
// S^1-zonal flow with supp f inside the trimmed chart.
Certificate certify_positive(const ZonalFlow& z, const SearchOptions& opt = {});

// Builds the certificate for a fixed bump without searching.
Certificate certify_bump(const ZonalFlow& z, const BumpProfile& bump, const SearchOptions& opt = {});

BumpProfile bump_from_json(const nlohmann::json& j);
nlohmann::json bump_to_json(const BumpProfile& b);

}  // namespace mcurv
