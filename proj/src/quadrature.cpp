#include "mcurv/quadrature.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "mcurv/errors.hpp"

namespace mcurv {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

void build_axis(QuadratureRule& rule, int i) {
  const int n = rule.resolution[i];
  const double lo = rule.lo[i], hi = rule.hi[i];
  auto& x = rule.nodes[i];
  auto& w = rule.weights[i];
  if (rule.periodic[i]) {
    const double h = (hi - lo) / n;
    x.resize(n);
    w.assign(n, h);
    for (int k = 0; k < n; ++k) x[k] = lo + k * h;
    return;
  }
  gauss_legendre(n, x, w);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int k = 0; k < n; ++k) {
    x[k] = mid + half * x[k];
    w[k] *= half;
  }
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ArgumentError("Gauss-Legendre rule needs at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  if (n == 1) {
    weights[0] = 2.0;
    return;
  }
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) weights[n / 2] = 2.0 / (legendre(n, 0.0).second * legendre(n, 0.0).second);
}

QuadratureRule QuadratureRule::for_chart(const Chart& chart,
                                         const std::array<int, kMaxDim>& resolution,
                                         double collar) {
  QuadratureRule rule;
  rule.dim = chart.dim();
  rule.collar = collar;
  for (int i = 0; i < rule.dim; ++i) {
    if (resolution[i] < 1) throw ArgumentError("quadrature resolution must be positive");
    const auto [lo, hi] = chart.trimmed_bounds(i, collar);
    rule.lo[i] = lo;
    rule.hi[i] = hi;
    rule.periodic[i] = chart.axis(i).periodic;
    rule.resolution[i] = resolution[i];
    build_axis(rule, i);
  }
  return rule;
}

QuadratureRule QuadratureRule::refined() const {
  QuadratureRule r = *this;
  for (int i = 0; i < dim; ++i) {
    r.resolution[i] = 2 * resolution[i];
    build_axis(r, i);
  }
  return r;
}

size_t QuadratureRule::size() const {
  size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<size_t>(resolution[i]);
  return s;
}

namespace {

struct SlabResult {
  std::vector<double> acc;
  bool bad = false;
  Point bad_at{};
  int bad_output = -1;
  std::exception_ptr error;
};

std::string describe(const Chart& chart, const Point& x) {
  std::ostringstream os;
  os << std::setprecision(17) << "(";
  for (int i = 0; i < chart.dim(); ++i) os << (i ? ", " : "") << chart.axis(i).name << "=" << x[i];
  os << ")";
  return os.str();
}

int extent(const QuadratureRule& rule, int axis) { return axis < rule.dim ? rule.resolution[axis] : 1; }

Point node_at(const QuadratureRule& rule, int a, int b, int c) {
  Point x{};
  x[0] = rule.nodes[0][a];
  if (rule.dim > 1) x[1] = rule.nodes[1][b];
  if (rule.dim > 2) x[2] = rule.nodes[2][c];
  return x;
}

double weight_at(const QuadratureRule& rule, int a, int b, int c) {
  double w = rule.weights[0][a];
  if (rule.dim > 1) w *= rule.weights[1][b];
  if (rule.dim > 2) w *= rule.weights[2][c];
  return w;
}

// Evaluates every node of slab `a` into `res`.
void run_slab(const Chart& chart, const QuadratureRule& rule, const std::vector<Reduction>& outputs,
              const NodeKernel& kernel, int a, SlabResult& res) {
  const size_t nout = outputs.size();
  res.acc.assign(nout, 0.0);
  std::vector<double> out(nout);
  const int n1 = extent(rule, 1), n2 = extent(rule, 2);
  try {
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n2; ++c) {
        const Point x = node_at(rule, a, b, c);
        const MatJet g = chart.metric_jet(x);
        const double density = std::sqrt(det_jet(g, chart.dim()).v);
        const Node node{x, g, density};
        std::fill(out.begin(), out.end(), 0.0);
        kernel(node, out.data());
        const double w = weight_at(rule, a, b, c) * density;
        for (size_t k = 0; k < nout; ++k) {
          if (!std::isfinite(out[k]) || !std::isfinite(w)) {
            if (!res.bad) {
              res.bad = true;
              res.bad_at = x;
              res.bad_output = static_cast<int>(k);
            }
            continue;
          }
          if (outputs[k] == Reduction::Sum)
            res.acc[k] += w * out[k];
          else
            res.acc[k] = std::max(res.acc[k], std::abs(out[k]));
        }
      }
  } catch (...) {
    res.error = std::current_exception();
  }
}

void raise_if_bad(const Chart& chart, const SlabResult& res) {
  if (res.error) std::rethrow_exception(res.error);
  if (res.bad)
    throw EvaluationError("non-finite integrand (output " + std::to_string(res.bad_output) +
                          ") or volume density at node " + describe(chart, res.bad_at));
}

}  // namespace

std::vector<double> integrate_many(const Chart& chart, const QuadratureRule& rule,
                                   const std::vector<Reduction>& outputs, const NodeKernel& kernel,
                                   Execution exec) {
  if (rule.dim != chart.dim()) throw ArgumentError("quadrature rule and chart dimensions differ");
  const int n0 = rule.resolution[0];
  std::vector<SlabResult> slabs(n0);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int a = 0; a < n0; ++a) run_slab(chart, rule, outputs, kernel, a, slabs[a]);
  } else {
    for (int a = 0; a < n0; ++a) run_slab(chart, rule, outputs, kernel, a, slabs[a]);
  }
  std::vector<double> total(outputs.size(), 0.0);
  for (const auto& s : slabs) {
    raise_if_bad(chart, s);
    for (size_t k = 0; k < outputs.size(); ++k) {
      if (outputs[k] == Reduction::Sum)
        total[k] += s.acc[k];
      else
        total[k] = std::max(total[k], s.acc[k]);
    }
  }
  return total;
}

std::vector<double> integrate_many_reference(const Chart& chart, const QuadratureRule& rule,
                                             const std::vector<Reduction>& outputs,
                                             const NodeKernel& kernel) {
  if (rule.dim != chart.dim()) throw ArgumentError("quadrature rule and chart dimensions differ");
  const size_t nout = outputs.size();
  std::vector<double> total(nout, 0.0), out(nout);
  for (int a = 0; a < extent(rule, 0); ++a)
    for (int b = 0; b < extent(rule, 1); ++b)
      for (int c = 0; c < extent(rule, 2); ++c) {
        const Point x = node_at(rule, a, b, c);
        const MatJet g = chart.metric_jet(x);
        const double density = std::sqrt(det_jet(g, chart.dim()).v);
        std::fill(out.begin(), out.end(), 0.0);
        kernel(Node{x, g, density}, out.data());
        const double w = weight_at(rule, a, b, c) * density;
        for (size_t k = 0; k < nout; ++k) {
          if (!std::isfinite(out[k]) || !std::isfinite(w))
            throw EvaluationError("non-finite integrand (output " + std::to_string(k) +
                                  ") or volume density at node " + describe(chart, x));
          if (outputs[k] == Reduction::Sum)
            total[k] += w * out[k];
          else
            total[k] = std::max(total[k], std::abs(out[k]));
        }
      }
  return total;
}

double integrate(const ScalarField& h, const QuadratureRule& rule, Execution exec) {
  return integrate_many(
      h.chart_ref(), rule, {Reduction::Sum},
      [&h](const Node& n, double* out) { out[0] = h(n.x); }, exec)[0];
}

double integrate_reference(const ScalarField& h, const QuadratureRule& rule) {
  return integrate_many_reference(h.chart_ref(), rule, {Reduction::Sum},
                                  [&h](const Node& n, double* out) { out[0] = h(n.x); })[0];
}

void dump_integrand_csv(const Chart& chart, const QuadratureRule& rule,
                        const std::function<double(const Node&)>& integrand,
                        const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot open '" + path + "' for writing");
  for (int i = 0; i < chart.dim(); ++i) os << chart.axis(i).name << ",";
  os << "integrand,weight\n";
  os << std::setprecision(17);
  for (int a = 0; a < extent(rule, 0); ++a)
    for (int b = 0; b < extent(rule, 1); ++b)
      for (int c = 0; c < extent(rule, 2); ++c) {
        const Point x = node_at(rule, a, b, c);
        const MatJet g = chart.metric_jet(x);
        const double density = std::sqrt(det_jet(g, chart.dim()).v);
        const double v = integrand(Node{x, g, density});
        for (int i = 0; i < chart.dim(); ++i) os << x[i] << ",";
        os << v << "," << weight_at(rule, a, b, c) * density << "\n";
      }
}

}  // namespace mcurv
