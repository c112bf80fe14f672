#pragma once

// Built-in charts: the 2D ellipsoid of revolution and round sphere in (r, theta),
// the 3D ellipsoid in Hopf-type coordinates (xi, mu, chi), and a flat torus.

#include <memory>
#include <vector>

#include "mcurv/field.hpp"

namespace mcurv {

// Arclength parametrization of the generating curve z -> (a sqrt(1 - z^2), z).
//
// Internally the curve is (a cos phi, sin phi); r(phi) is tabulated at
// `resolution` panels on [0, pi/2] with a 20-point Gauss-Legendre rule per
// panel, and phi(r) is recovered by Hermite interpolation followed by Newton
// polishing, so the returned jets are accurate to rounding.
class ArclengthProfile {
 public:
  ArclengthProfile(double a, int resolution);

  double a() const { return a_; }
  // Half-length d of the r-interval.
  double half_length() const { return d_; }

  double arclength(double phi) const;
  double phi(double r) const;
  // phi(r) as a jet in the coordinates r depends on.
  Jet phi(const Jet& r) const;
  Jet c1(const Jet& r) const;
  Jet c2(const Jet& r) const;

 private:
  double speed(double phi) const;
  double panel_integral(double lo, double hi) const;

  double a_;
  double d_;
  std::vector<double> phi_nodes_;
  std::vector<double> r_nodes_;
};

ChartPtr make_ellipsoid_2d(double a, int profile_resolution = 256);
ChartPtr make_sphere2();
ChartPtr make_ellipsoid_3d(double a);
ChartPtr make_flat_torus(int dim = 2);

// Profile backing an ellipsoid2d chart, or nullptr for other charts.
std::shared_ptr<const ArclengthProfile> arclength_profile(const Chart& chart);

struct KillingBasis {
  std::vector<VectorField> fields;
  // False when the chart's isometry algebra is larger than the listed span
  // (round spheres).
  bool complete = true;
};

// Throws CapabilityError for charts without a built-in Killing algebra.
KillingBasis killing_basis(const ChartPtr& chart);

// p d_xi + q d_mu on an ellipsoid3d chart, or p d_1 + q d_2 on a flat torus.
VectorField killing_combination(const ChartPtr& chart, double p, double q);

// Axis-aligned Killing field used by zonal flows: d_theta in 2D,
// p d_xi + q d_mu in 3D.
VectorField zonal_killing_field(const ChartPtr& chart, double p = 1.0, double q = 0.0);

}  // namespace mcurv
