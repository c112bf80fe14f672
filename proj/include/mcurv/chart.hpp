#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcurv/jet.hpp"

namespace mcurv {

using Matrix = std::array<std::array<double, kMaxDim>, kMaxDim>;

// Gamma[k][i][j] = Christoffel symbol of the second kind.
using ChristoffelValues = std::array<Matrix, kMaxDim>;
using ChristoffelJet = std::array<MatJet, kMaxDim>;

struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;
};

// Coordinate chart with a metric given as an expression in the coordinates.
// The metric closure is evaluated on seeded jets, so first and second metric
// partials come from forward differentiation.
class Chart {
 public:
  using MetricExpr = std::function<MatJet(const JetPoint&)>;
  using ClosedChristoffel = std::function<ChristoffelValues(const Point&)>;

  Chart(std::string kind, std::vector<Axis> axes, MetricExpr metric,
        ClosedChristoffel closed_form = {},
        std::map<std::string, double> params = {});
  virtual ~Chart() = default;

  const std::string& kind() const { return kind_; }
  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int i) const { return axes_.at(i); }
  const std::map<std::string, double>& params() const { return params_; }
  double param(const std::string& key) const;

  // Index of the single bounded axis (r or chi) or -1 when all are periodic.
  int profile_axis() const;

  bool contains(const Point& x) const;
  // Throws DomainError when x is not interior.
  void check_point(const Point& x) const;

  // Order-2 metric jet. Unused rows/columns (dim < 3) are zero.
  MatJet metric_jet(const Point& x) const;
  Matrix metric(const Point& x) const;
  // sqrt(det g) as an order-2 jet.
  Jet volume_density_jet(const Point& x) const;
  double volume_density(const Point& x) const;

  bool has_closed_form_christoffel() const { return bool(closed_); }
  ChristoffelValues christoffel_closed_form(const Point& x) const;

  // Bounds of axis i after removing collars of width eps at bounded ends.
  std::pair<double, double> trimmed_bounds(int i, double eps) const;

  // Returns a copy whose metric has g_22 (0-based g[1][1]) negated; used to
  // exercise the positive-definiteness check of the verification suite.
  std::shared_ptr<const Chart> with_negated_g22() const;

 private:
  std::string kind_;
  std::vector<Axis> axes_;
  MetricExpr metric_;
  ClosedChristoffel closed_;
  std::map<std::string, double> params_;
};

using ChartPtr = std::shared_ptr<const Chart>;

// Determinant, inverse and sqrt(det) of the leading dim x dim block, in jet
// arithmetic.
Jet det_jet(const MatJet& g, int dim);
MatJet inverse_jet(const MatJet& g, int dim);

// Eigenvalue-based conditioning of the metric at a point.
struct MetricConditioning {
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double condition_number = 0.0;
  bool symmetric = true;
};
MetricConditioning metric_conditioning(const Matrix& g, int dim);

}  // namespace mcurv
