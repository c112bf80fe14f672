#include "mcurv/chart.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "mcurv/errors.hpp"

namespace mcurv {

Chart::Chart(std::string kind, std::vector<Axis> axes, MetricExpr metric,
             ClosedChristoffel closed_form, std::map<std::string, double> params)
    : kind_(std::move(kind)),
      axes_(std::move(axes)),
      metric_(std::move(metric)),
      closed_(std::move(closed_form)),
      params_(std::move(params)) {
  if (axes_.empty() || axes_.size() > static_cast<size_t>(kMaxDim))
    throw ArgumentError("chart dimension must be between 1 and 3");
  for (const auto& a : axes_)
    if (!(a.lo < a.hi)) throw ArgumentError("axis '" + a.name + "' has an empty interval");
}

double Chart::param(const std::string& key) const {
  auto it = params_.find(key);
  if (it == params_.end()) throw ArgumentError("chart has no parameter '" + key + "'");
  return it->second;
}

int Chart::profile_axis() const {
  for (int i = 0; i < dim(); ++i)
    if (!axes_[i].periodic) return i;
  return -1;
}

bool Chart::contains(const Point& x) const {
  for (int i = 0; i < dim(); ++i) {
    if (!std::isfinite(x[i])) return false;
    if (!axes_[i].periodic && !(x[i] > axes_[i].lo && x[i] < axes_[i].hi)) return false;
  }
  return true;
}

void Chart::check_point(const Point& x) const {
  if (contains(x)) return;
  std::ostringstream os;
  os << "point (";
  for (int i = 0; i < dim(); ++i) os << (i ? ", " : "") << x[i];
  os << ") is outside the domain of chart '" << kind_ << "'";
  throw DomainError(os.str());
}

MatJet Chart::metric_jet(const Point& x) const {
  check_point(x);
  return metric_(seed(x));
}

Matrix Chart::metric(const Point& x) const {
  const MatJet g = metric_jet(x);
  Matrix m{};
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = 0; j < kMaxDim; ++j) m[i][j] = g[i][j].v;
  return m;
}

Jet Chart::volume_density_jet(const Point& x) const {
  return sqrt(det_jet(metric_jet(x), dim()));
}

double Chart::volume_density(const Point& x) const {
  return std::sqrt(det_jet(metric_jet(x), dim()).v);
}

ChristoffelValues Chart::christoffel_closed_form(const Point& x) const {
  if (!closed_) throw CapabilityError("chart '" + kind_ + "' has no closed-form Christoffel symbols");
  check_point(x);
  return closed_(x);
}

std::pair<double, double> Chart::trimmed_bounds(int i, double eps) const {
  const Axis& a = axes_.at(i);
  if (a.periodic) return {a.lo, a.hi};
  if (eps < 0.0 || 2.0 * eps >= a.hi - a.lo)
    throw ArgumentError("collar width " + std::to_string(eps) + " leaves axis '" + a.name + "' empty");
  return {a.lo + eps, a.hi - eps};
}

std::shared_ptr<const Chart> Chart::with_negated_g22() const {
  if (dim() < 2) throw CapabilityError("chart has no g_22 component");
  MetricExpr base = metric_;
  MetricExpr corrupted = [base](const JetPoint& x) {
    MatJet g = base(x);
    g[1][1] = -g[1][1];
    return g;
  };
  return std::make_shared<Chart>(kind_ + "+negated-g22", axes_, corrupted, ClosedChristoffel{},
                                 params_);
}

Jet det_jet(const MatJet& g, int dim) {
  switch (dim) {
    case 1:
      return g[0][0];
    case 2:
      return g[0][0] * g[1][1] - g[0][1] * g[1][0];
    default:
      return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
             g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
             g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  }
}

MatJet inverse_jet(const MatJet& g, int dim) {
  MatJet inv{};
  if (dim == 1) {
    inv[0][0] = reciprocal(g[0][0]);
    return inv;
  }
  // Diagonal metrics are the common case; skip the adjugate.
  bool diagonal = true;
  for (int i = 0; i < dim && diagonal; ++i)
    for (int j = 0; j < dim; ++j)
      if (i != j) {
        const Jet& e = g[i][j];
        if (e.v != 0.0) { diagonal = false; break; }
        for (int k = 0; k < kMaxDim; ++k) {
          if (e.d[k] != 0.0) diagonal = false;
          for (int l = 0; l < kMaxDim; ++l)
            if (e.h[k][l] != 0.0) diagonal = false;
        }
      }
  if (diagonal) {
    for (int i = 0; i < dim; ++i) inv[i][i] = reciprocal(g[i][i]);
    return inv;
  }
  const Jet rdet = reciprocal(det_jet(g, dim));
  if (dim == 2) {
    inv[0][0] = g[1][1] * rdet;
    inv[1][1] = g[0][0] * rdet;
    inv[0][1] = -g[0][1] * rdet;
    inv[1][0] = -g[1][0] * rdet;
    return inv;
  }
  auto cof = [&](int r0, int r1, int c0, int c1) {
    return g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0];
  };
  inv[0][0] = cof(1, 2, 1, 2) * rdet;
  inv[0][1] = -cof(0, 2, 1, 2) * rdet;
  inv[0][2] = cof(0, 1, 1, 2) * rdet;
  inv[1][0] = -cof(1, 2, 0, 2) * rdet;
  inv[1][1] = cof(0, 2, 0, 2) * rdet;
  inv[1][2] = -cof(0, 1, 0, 2) * rdet;
  inv[2][0] = cof(1, 2, 0, 1) * rdet;
  inv[2][1] = -cof(0, 2, 0, 1) * rdet;
  inv[2][2] = cof(0, 1, 0, 1) * rdet;
  return inv;
}

MetricConditioning metric_conditioning(const Matrix& g, int dim) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  MetricConditioning out;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      m(i, j) = g[i][j];
      if (std::abs(g[i][j] - g[j][i]) > 1e-12 * (1.0 + std::abs(g[i][j]))) out.symmetric = false;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.topLeftCorner(dim, dim));
  const auto& ev = es.eigenvalues();
  out.min_eigenvalue = ev.minCoeff();
  out.max_eigenvalue = ev.maxCoeff();
  out.condition_number = out.min_eigenvalue > 0.0 ? out.max_eigenvalue / out.min_eigenvalue
                                                  : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace mcurv
