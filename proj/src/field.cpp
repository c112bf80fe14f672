#include "mcurv/field.hpp"

#include <algorithm>
#include <string>

#include "mcurv/errors.hpp"

namespace mcurv {

namespace {

void same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a != b) throw ArgumentError("fields live on different charts");
}

}  // namespace

ScalarField::ScalarField(ChartPtr chart, int order, Eval eval)
    : chart_(std::move(chart)), order_(order), eval_(std::move(eval)) {}

ScalarField ScalarField::from_expression(ChartPtr chart, Expr expr) {
  return ScalarField(std::move(chart), 2, [expr = std::move(expr)](const Point& x) {
    return expr(seed(x));
  });
}

ScalarField ScalarField::constant(ChartPtr chart, double c) {
  return ScalarField(std::move(chart), 2, [c](const Point&) { return Jet::constant(c); });
}

void ScalarField::require_order(int k, const char* what) const {
  if (order_ < k)
    throw CapabilityError(std::string(what) + " needs an order-" + std::to_string(k) +
                          " jet but the scalar field carries order " + std::to_string(order_));
}

VectorField::VectorField(ChartPtr chart, int order, Eval eval)
    : chart_(std::move(chart)), order_(order), eval_(std::move(eval)) {}

VectorField VectorField::from_expression(ChartPtr chart, Expr expr) {
  return VectorField(std::move(chart), 2, [expr = std::move(expr)](const Point& x) {
    return expr(seed(x));
  });
}

VectorField VectorField::zero(ChartPtr chart) {
  return VectorField(std::move(chart), 2, [](const Point&) { return VecJet{}; });
}

VectorField VectorField::coordinate(ChartPtr chart, const Point& c) {
  return VectorField(std::move(chart), 2, [c](const Point&) {
    VecJet v{};
    for (int i = 0; i < kMaxDim; ++i) v[i] = Jet::constant(c[i]);
    return v;
  });
}

Point VectorField::operator()(const Point& x) const {
  const VecJet j = eval_(x);
  Point p{};
  for (int i = 0; i < kMaxDim; ++i) p[i] = j[i].v;
  return p;
}

void VectorField::require_order(int k, const char* what) const {
  if (order_ < k)
    throw CapabilityError(std::string(what) + " needs an order-" + std::to_string(k) +
                          " jet but the vector field carries order " + std::to_string(order_));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  same_chart(a.chart(), b.chart());
  return ScalarField(a.chart(), std::min(a.order(), b.order()),
                     [a, b](const Point& x) { return a.jet(x) + b.jet(x); });
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  same_chart(a.chart(), b.chart());
  return ScalarField(a.chart(), std::min(a.order(), b.order()),
                     [a, b](const Point& x) { return a.jet(x) * b.jet(x); });
}

ScalarField operator*(double c, const ScalarField& a) {
  return ScalarField(a.chart(), a.order(), [a, c](const Point& x) { return c * a.jet(x); });
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  same_chart(a.chart(), b.chart());
  return VectorField(a.chart(), std::min(a.order(), b.order()), [a, b](const Point& x) {
    VecJet u = a.jet(x);
    const VecJet w = b.jet(x);
    for (int i = 0; i < kMaxDim; ++i) u[i] += w[i];
    return u;
  });
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  return a + (-1.0) * b;
}

VectorField operator*(double c, const VectorField& a) {
  return VectorField(a.chart(), a.order(), [a, c](const Point& x) {
    VecJet u = a.jet(x);
    for (auto& e : u) e = c * e;
    return u;
  });
}

VectorField operator*(const ScalarField& f, const VectorField& a) {
  same_chart(f.chart(), a.chart());
  return VectorField(a.chart(), std::min(f.order(), a.order()), [a, f](const Point& x) {
    VecJet u = a.jet(x);
    const Jet s = f.jet(x);
    for (auto& e : u) e = s * e;
    return u;
  });
}

}  // namespace mcurv
