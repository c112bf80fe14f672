#pragma once

// Chart-based tensor calculus: Christoffel symbols, gradient, divergence,
// Lie bracket, covariant derivative, Hessian and the Killing residual.
//
// Conventions:
//   [V,W](h) = V(W(h)) - W(V(h)), i.e. [V,W]^k = V^i d_i W^k - W^i d_i V^k
//   (nabla_V W)^k = V^i d_i W^k + Gamma^k_ij V^i W^j
//
// Each field-level operation has a pointwise counterpart acting on jets; the
// quadrature kernels use the pointwise forms to avoid re-evaluating inputs.

#include <vector>

#include "mcurv/field.hpp"

namespace mcurv {

namespace pointwise {

ChristoffelJet christoffel(const MatJet& g, int dim);

// V(h) = V^i d_i h.
Jet apply(const VecJet& v, const Jet& h, int dim);
VecJet bracket(const VecJet& v, const VecJet& w, int dim);
VecJet covariant(const VecJet& v, const VecJet& w, const ChristoffelJet& gamma,
                 int dim);
Jet inner(const MatJet& g, const VecJet& v, const VecJet& w, int dim);
VecJet gradient(const MatJet& g_inv, const Jet& h, int dim);
// (1/sqrt g) d_i (sqrt g V^i), given log(sqrt g) as a jet.
Jet divergence(const VecJet& v, const Jet& log_density, int dim);

double inner_value(const MatJet& g, const VecJet& v, const VecJet& w, int dim);

}  // namespace pointwise

// Gamma^k_ij at a point, from the metric jets. Throws DomainError outside the
// chart and ConditioningError for a singular or indefinite metric.
ChristoffelValues christoffel(const Chart& chart, const Point& x);
// Order-1 jet of the Christoffel symbols.
ChristoffelJet christoffel_jet(const Chart& chart, const Point& x);

VectorField grad(const ScalarField& h);
ScalarField divergence(const VectorField& v);
VectorField lie_bracket(const VectorField& v, const VectorField& w);
VectorField covariant_derivative(const VectorField& v, const VectorField& w);

// V(h).
ScalarField directional(const VectorField& v, const ScalarField& h);
ScalarField inner(const VectorField& v, const VectorField& w);
ScalarField norm_squared(const VectorField& v);

// Hess_h(d_i, d_j) = d_i d_j h - Gamma^k_ij d_k h.
Matrix hessian(const ScalarField& h, const Point& x);

// max over samples and basis pairs (d_i, d_j) of
// |g(nabla_i X, d_j) + g(nabla_j X, d_i)|.
double killing_residual(const VectorField& x, const std::vector<Point>& samples);

// Largest metric-weighted norm of a vector field over samples.
double max_norm(const VectorField& v, const std::vector<Point>& samples);
double max_abs(const ScalarField& h, const std::vector<Point>& samples);

// Tensor grid with n nodes per axis inside the collar-trimmed chart.
std::vector<Point> sample_grid(const Chart& chart, int n_per_axis, double collar);
std::vector<Point> sample_grid(const Chart& chart, const std::array<int, kMaxDim>& n,
                               double collar);
// Uniform random points in the collar-trimmed chart.
std::vector<Point> sample_random(const Chart& chart, int count, unsigned long long seed,
                                 double collar);

}  // namespace mcurv
