#pragma once

#include <functional>

#include "mcurv/chart.hpp"

namespace mcurv {

// Scalar field on a chart, exposing jets up to `order` (0, 1 or 2).
class ScalarField {
 public:
  using Eval = std::function<Jet(const Point&)>;
  using Expr = std::function<Jet(const JetPoint&)>;

  ScalarField() = default;
  ScalarField(ChartPtr chart, int order, Eval eval);

  // Field given as a differentiable expression of the coordinates.
  static ScalarField from_expression(ChartPtr chart, Expr expr);
  static ScalarField constant(ChartPtr chart, double c);

  Jet jet(const Point& x) const { return eval_(x); }
  double operator()(const Point& x) const { return eval_(x).v; }

  int order() const { return order_; }
  const ChartPtr& chart() const { return chart_; }
  const Chart& chart_ref() const { return *chart_; }
  bool valid() const { return bool(eval_); }

  // Throws CapabilityError when the field lacks jets of order k.
  void require_order(int k, const char* what) const;

 private:
  ChartPtr chart_;
  int order_ = 0;
  Eval eval_;
};

// Vector field given by its coordinate coefficients V^i.
class VectorField {
 public:
  using Eval = std::function<VecJet(const Point&)>;
  using Expr = std::function<VecJet(const JetPoint&)>;

  VectorField() = default;
  VectorField(ChartPtr chart, int order, Eval eval);

  static VectorField from_expression(ChartPtr chart, Expr expr);
  static VectorField zero(ChartPtr chart);
  // Constant-coefficient field sum_i c_i d_i.
  static VectorField coordinate(ChartPtr chart, const Point& coefficients);

  VecJet jet(const Point& x) const { return eval_(x); }
  Point operator()(const Point& x) const;

  int order() const { return order_; }
  const ChartPtr& chart() const { return chart_; }
  const Chart& chart_ref() const { return *chart_; }
  int dim() const { return chart_->dim(); }
  bool valid() const { return bool(eval_); }

  void require_order(int k, const char* what) const;

 private:
  ChartPtr chart_;
  int order_ = 0;
  Eval eval_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double c, const VectorField& a);
VectorField operator*(const ScalarField& f, const VectorField& a);

}  // namespace mcurv
