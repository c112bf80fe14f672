#pragma once

// Zonal flows Z = f X: zonality checks, the collinearity factor F, sgn(Z),
// the positive region U+ and the geodesic / S^1 / positive classification.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcurv/field.hpp"
#include "mcurv/profiles.hpp"

namespace mcurv {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x > lo && x < hi; }
};

// Direction (p, q) of X = p d_1 + q d_2 on a 3D chart. With `integer` set the
// pair must be integral and is reduced to coprime form; otherwise q/p is
// declared irrational.
struct Direction {
  double p = 1.0;
  double q = 0.0;
  bool integer = true;

  // (p, q) divided by gcd(|p|, |q|). Throws ArgumentError for non-integral
  // or zero input.
  std::pair<long long, long long> reduced() const;
};

struct ZonalFlow {
  ChartPtr chart;
  VectorField X;
  ScalarField f;
  // Set for flows built from a one-variable profile.
  std::optional<Profile> profile;
  int profile_axis = -1;
  Direction direction;

  VectorField Z() const { return f * X; }
};

// f = profile(x[profile axis]) and X = d_theta (2D) or p d_xi + q d_mu (3D).
ZonalFlow make_zonal_flow(const ChartPtr& chart, const Profile& profile,
                          const Direction& direction = {});

struct ZonalThresholds {
  double accept = 1e-7;
  double reject = 1e-4;
  double killing = 1e-8;
  double grad_floor = 1e-12;
};

enum class Tri { Yes, No, Indeterminate };
std::string to_string(Tri t);

struct ClassificationReport {
  Tri is_zonal = Tri::Indeterminate;
  double killing_residual = 0.0;
  double xf_residual = 0.0;
  double collinearity_residual = 0.0;
  double xF_residual = 0.0;
  int u0_samples = 0;

  std::optional<bool> is_geodesic;
  double norm_spread = 0.0;        // (max - min) of ||X||^2 over samples
  double max_nabla_xx = 0.0;       // max ||nabla_X X||
  bool geodesic_cross_check = true;

  std::optional<bool> is_s1;
  std::string s1_witness;

  std::optional<bool> is_positive;
  std::optional<Point> positive_witness;
  std::vector<Interval> u_plus;

  ZonalThresholds thresholds;
  std::vector<std::string> rejects;

  nlohmann::json to_json() const;
};

inline constexpr int kClassificationSchemaVersion = 1;

// Evaluates the zonality conditions: X Killing (precondition, PreconditionError
// otherwise), X(f) = 0, and collinearity of grad f^2 with grad ||X||^2 on U0.
ClassificationReport check_zonal(const ScalarField& f, const VectorField& X,
                                 const ZonalThresholds& th = {});

// F = g(grad f^2, grad h) / |grad h|^2 with h = ||X||^2, as an order-1 jet.
// Throws DomainError where |grad h| is below the floor.
Jet F_jet(const ZonalFlow& z, const Point& x, double grad_floor = 1e-12);
// F as a scalar field. Throws DomainError when U0 is empty on the samples.
ScalarField extract_F(const ZonalFlow& z, double grad_floor = 1e-12);

// sign(F) on U0, 0 elsewhere.
int sgn_Z(const ZonalFlow& z, const Point& x, double grad_floor = 1e-12);

struct IntrinsicSign {
  double lhs = 0.0;       // g(grad ||Z||^2 + 2 nabla_Z Z, 2 nabla_Z Z)
  double rhs = 0.0;       // -F f^2 ||X||^2 ||grad ||X||^2||^2
  double residual = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|, tiny)
  int sign = 0;           // -sign(lhs)
};
IntrinsicSign intrinsic_sign(const ZonalFlow& z, const Point& x);

// Maximal intervals of the profile axis where sgn(Z) = +1, found by a dense
// scan with bisection refinement of the end points.
std::vector<Interval> positive_region(const ZonalFlow& z, int scan_points = 4000,
                                      double collar = 1e-3);

struct GeodesicTest {
  bool geodesic = false;
  double norm_spread = 0.0;
  double max_nabla_xx = 0.0;
  bool consistent = true;
};
GeodesicTest geodesic_test(const ZonalFlow& z, double tolerance = 1e-8);

// Full classification of a zonal flow on any built-in chart.
ClassificationReport classify(const ZonalFlow& z, const ZonalThresholds& th = {});

// Classification on the 3D ellipsoid. Throws CapabilityError for a = 1.
ClassificationReport classify_3d(const Direction& direction, double a, const Profile& profile,
                                 const ZonalThresholds& th = {});

// Sample set used by the zonal checks: a midpoint grid plus seeded random
// points inside the collar.
std::vector<Point> zonal_samples(const Chart& chart, double collar = 1e-3);

}  // namespace mcurv
