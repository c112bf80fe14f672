#pragma once

// One-variable smooth functions: the smooth step and mollifier used by bump
// fields, and the profile families f(x) of zonal flows.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mcurv/field.hpp"

namespace mcurv {

// S(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)}), 0 for u <= 0, 1 for u >= 1.
Jet smooth_step(const Jet& u);
// sqrt(S(u)), evaluated without forming S so it stays smooth near u = 0.
Jet sqrt_smooth_step(const Jet& u);
// Mollifier rho with rho = 1 on |x| <= 1/2 and rho = 0 on |x| >= 1, taken as a
// function of s = x^2 so it is smooth at the origin.
Jet mollifier_of_square(const Jet& s);

// A profile f(x) along the chart's profile axis.
struct Profile {
  std::string family;
  std::map<std::string, double> params;
  std::function<Jet(const Jet&)> eval;

  Jet operator()(const Jet& x) const { return eval(x); }
  double operator()(double x) const { return eval(Jet::variable(x, 0)).v; }
};

// A * sqrt(S((x-lo)/(peak-lo))) * sqrt(S((hi-x)/(hi-peak))): zero outside
// (lo, hi), strictly monotone on (lo, peak) and (peak, hi), maximal at peak.
// f^2 rises as A^2 S((x-lo)/(peak-lo)) on (lo, peak).
Profile bump_profile(double lo, double hi, double peak, double amplitude);
// A (1 + cos(pi (x - center) / width)) / 2 on |x - center| < width, else 0.
Profile raised_cosine_profile(double center, double width, double amplitude);
// sum_k c_k cos^{2k}(x).
Profile cos2_polynomial_profile(std::vector<double> coefficients);
// Interpolation of (x_i, f_i): degree 1 is piecewise linear, degree 3 a natural
// cubic spline. Constant extension outside [x_0, x_n].
Profile table_profile(std::vector<double> xs, std::vector<double> fs, int degree);
Profile constant_profile(double c);
// x -> f(2m - x).
Profile mirrored(const Profile& f, double m);

// Scalar field x -> f(x[axis]) on a chart.
ScalarField profile_field(const ChartPtr& chart, const Profile& f, int axis);

}  // namespace mcurv
