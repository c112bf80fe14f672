#include "mcurv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mcurv/errors.hpp"

namespace mcurv {

namespace pointwise {

ChristoffelJet christoffel(const MatJet& g, int dim) {
  const MatJet ginv = inverse_jet(g, dim);
  // dg[a][i][j] = d_a g_ij, one order lower.
  std::array<MatJet, kMaxDim> dg{};
  for (int a = 0; a < dim; ++a)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        dg[a][i][j] = partial(g[i][j], a);
        dg[a][j][i] = dg[a][i][j];
      }
  ChristoffelJet gamma{};
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      // Christoffel symbols of the first kind, lowered index a.
      std::array<Jet, kMaxDim> first{};
      for (int a = 0; a < dim; ++a) first[a] = 0.5 * (dg[i][j][a] + dg[j][i][a] - dg[a][i][j]);
      for (int k = 0; k < dim; ++k) {
        Jet s;
        for (int a = 0; a < dim; ++a) s += ginv[k][a] * first[a];
        gamma[k][i][j] = s;
        gamma[k][j][i] = s;
      }
    }
  return gamma;
}

Jet apply(const VecJet& v, const Jet& h, int dim) {
  Jet s;
  for (int i = 0; i < dim; ++i) s += v[i] * partial(h, i);
  return s;
}

VecJet bracket(const VecJet& v, const VecJet& w, int dim) {
  VecJet r{};
  for (int k = 0; k < dim; ++k) {
    Jet s;
    for (int i = 0; i < dim; ++i) s += v[i] * partial(w[k], i) - w[i] * partial(v[k], i);
    r[k] = s;
  }
  return r;
}

VecJet covariant(const VecJet& v, const VecJet& w, const ChristoffelJet& gamma, int dim) {
  VecJet r{};
  for (int k = 0; k < dim; ++k) {
    Jet s;
    for (int i = 0; i < dim; ++i) {
      s += v[i] * partial(w[k], i);
      for (int j = 0; j < dim; ++j) s += gamma[k][i][j] * v[i] * w[j];
    }
    r[k] = s;
  }
  return r;
}

Jet inner(const MatJet& g, const VecJet& v, const VecJet& w, int dim) {
  Jet s;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += g[i][j] * v[i] * w[j];
  return s;
}

double inner_value(const MatJet& g, const VecJet& v, const VecJet& w, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += g[i][j].v * v[i].v * w[j].v;
  return s;
}

VecJet gradient(const MatJet& g_inv, const Jet& h, int dim) {
  std::array<Jet, kMaxDim> dh{};
  for (int j = 0; j < dim; ++j) dh[j] = partial(h, j);
  VecJet r{};
  for (int i = 0; i < dim; ++i) {
    Jet s;
    for (int j = 0; j < dim; ++j) s += g_inv[i][j] * dh[j];
    r[i] = s;
  }
  return r;
}

Jet divergence(const VecJet& v, const Jet& log_density, int dim) {
  Jet s;
  for (int i = 0; i < dim; ++i) s += partial(v[i], i) + v[i] * partial(log_density, i);
  return s;
}

}  // namespace pointwise

namespace {

constexpr double kMaxConditionNumber = 1e14;

void check_conditioning(const Chart& chart, const MatJet& g, const Point& x) {
  Matrix m{};
  for (int i = 0; i < chart.dim(); ++i)
    for (int j = 0; j < chart.dim(); ++j) m[i][j] = g[i][j].v;
  const MetricConditioning c = metric_conditioning(m, chart.dim());
  if (c.min_eigenvalue <= 0.0 || c.condition_number > kMaxConditionNumber) {
    std::ostringstream os;
    os << "metric of chart '" << chart.kind() << "' is singular or indefinite at (";
    for (int i = 0; i < chart.dim(); ++i) os << (i ? ", " : "") << x[i];
    os << "): eigenvalues [" << c.min_eigenvalue << ", " << c.max_eigenvalue
       << "], condition number " << c.condition_number;
    throw ConditioningError(os.str(), c.condition_number);
  }
}

}  // namespace

ChristoffelJet christoffel_jet(const Chart& chart, const Point& x) {
  const MatJet g = chart.metric_jet(x);
  check_conditioning(chart, g, x);
  return pointwise::christoffel(g, chart.dim());
}

ChristoffelValues christoffel(const Chart& chart, const Point& x) {
  const ChristoffelJet gj = christoffel_jet(chart, x);
  ChristoffelValues out{};
  for (int k = 0; k < kMaxDim; ++k)
    for (int i = 0; i < kMaxDim; ++i)
      for (int j = 0; j < kMaxDim; ++j) out[k][i][j] = gj[k][i][j].v;
  return out;
}

VectorField grad(const ScalarField& h) {
  h.require_order(1, "grad");
  const ChartPtr chart = h.chart();
  return VectorField(chart, h.order() - 1, [h, chart](const Point& x) {
    const MatJet g = chart->metric_jet(x);
    return pointwise::gradient(inverse_jet(g, chart->dim()), h.jet(x), chart->dim());
  });
}

ScalarField divergence(const VectorField& v) {
  v.require_order(1, "divergence");
  const ChartPtr chart = v.chart();
  return ScalarField(chart, std::min(v.order() - 1, 1), [v, chart](const Point& x) {
    const Jet logd = log(chart->volume_density_jet(x));
    return pointwise::divergence(v.jet(x), logd, chart->dim());
  });
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  v.require_order(1, "lie_bracket");
  w.require_order(1, "lie_bracket");
  if (v.chart() != w.chart()) throw ArgumentError("lie_bracket: fields live on different charts");
  const int dim = v.dim();
  return VectorField(v.chart(), std::min(v.order(), w.order()) - 1, [v, w, dim](const Point& x) {
    return pointwise::bracket(v.jet(x), w.jet(x), dim);
  });
}

VectorField covariant_derivative(const VectorField& v, const VectorField& w) {
  w.require_order(1, "covariant_derivative");
  if (v.chart() != w.chart())
    throw ArgumentError("covariant_derivative: fields live on different charts");
  const ChartPtr chart = v.chart();
  const int order = std::min({v.order(), w.order() - 1, 1});
  return VectorField(chart, order, [v, w, chart](const Point& x) {
    return pointwise::covariant(v.jet(x), w.jet(x), christoffel_jet(*chart, x), chart->dim());
  });
}

ScalarField directional(const VectorField& v, const ScalarField& h) {
  h.require_order(1, "directional derivative");
  const int dim = v.dim();
  return ScalarField(v.chart(), std::min(v.order(), h.order() - 1),
                     [v, h, dim](const Point& x) { return pointwise::apply(v.jet(x), h.jet(x), dim); });
}

ScalarField inner(const VectorField& v, const VectorField& w) {
  if (v.chart() != w.chart()) throw ArgumentError("inner: fields live on different charts");
  const ChartPtr chart = v.chart();
  return ScalarField(chart, std::min(v.order(), w.order()), [v, w, chart](const Point& x) {
    return pointwise::inner(chart->metric_jet(x), v.jet(x), w.jet(x), chart->dim());
  });
}

ScalarField norm_squared(const VectorField& v) { return inner(v, v); }

Matrix hessian(const ScalarField& h, const Point& x) {
  h.require_order(2, "hessian");
  const Chart& chart = h.chart_ref();
  const ChristoffelValues gamma = christoffel(chart, x);
  const Jet hj = h.jet(x);
  Matrix out{};
  for (int i = 0; i < chart.dim(); ++i)
    for (int j = 0; j < chart.dim(); ++j) {
      double s = hj.h[i][j];
      for (int k = 0; k < chart.dim(); ++k) s -= gamma[k][i][j] * hj.d[k];
      out[i][j] = s;
    }
  return out;
}

double killing_residual(const VectorField& x, const std::vector<Point>& samples) {
  if (samples.empty()) throw ArgumentError("killing_residual: empty sample set");
  x.require_order(1, "killing_residual");
  const Chart& chart = x.chart_ref();
  const int dim = chart.dim();
  double worst = 0.0;
  for (const Point& p : samples) {
    const MatJet g = chart.metric_jet(p);
    const ChristoffelJet gamma = christoffel_jet(chart, p);
    const VecJet xj = x.jet(p);
    // (nabla_i X)^k = d_i X^k + Gamma^k_il X^l
    Matrix nab{};
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) {
        double s = xj[k].d[i];
        for (int l = 0; l < dim; ++l) s += gamma[k][i][l].v * xj[l].v;
        nab[i][k] = s;
      }
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < dim; ++k) {
          a += g[k][j].v * nab[i][k];
          b += g[k][i].v * nab[j][k];
        }
        worst = std::max(worst, std::abs(a + b));
      }
  }
  return worst;
}

double max_norm(const VectorField& v, const std::vector<Point>& samples) {
  const Chart& chart = v.chart_ref();
  double worst = 0.0;
  for (const Point& p : samples) {
    const VecJet vj = v.jet(p);
    const double n2 = pointwise::inner_value(chart.metric_jet(p), vj, vj, chart.dim());
    worst = std::max(worst, std::sqrt(std::max(n2, 0.0)));
  }
  return worst;
}

double max_abs(const ScalarField& h, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const Point& p : samples) worst = std::max(worst, std::abs(h(p)));
  return worst;
}

std::vector<Point> sample_grid(const Chart& chart, const std::array<int, kMaxDim>& n,
                               double collar) {
  const int dim = chart.dim();
  std::array<std::vector<double>, kMaxDim> ticks;
  for (int i = 0; i < dim; ++i) {
    if (n[i] < 1) throw ArgumentError("sample_grid: need at least one node per axis");
    const auto [lo, hi] = chart.trimmed_bounds(i, collar);
    // Cell midpoints keep samples off periodic seams and collar edges.
    for (int k = 0; k < n[i]; ++k) ticks[i].push_back(lo + (hi - lo) * (k + 0.5) / n[i]);
  }
  std::vector<Point> out;
  const int n0 = n[0], n1 = dim > 1 ? n[1] : 1, n2 = dim > 2 ? n[2] : 1;
  out.reserve(static_cast<size_t>(n0) * n1 * n2);
  for (int a = 0; a < n0; ++a)
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n2; ++c) {
        Point p{};
        p[0] = ticks[0][a];
        if (dim > 1) p[1] = ticks[1][b];
        if (dim > 2) p[2] = ticks[2][c];
        out.push_back(p);
      }
  return out;
}

std::vector<Point> sample_grid(const Chart& chart, int n_per_axis, double collar) {
  return sample_grid(chart, {n_per_axis, n_per_axis, n_per_axis}, collar);
}

std::vector<Point> sample_random(const Chart& chart, int count, unsigned long long seed,
                                 double collar) {
  if (count < 1) throw ArgumentError("sample_random: count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (int i = 0; i < chart.dim(); ++i) {
    const auto [lo, hi] = chart.trimmed_bounds(i, collar);
    dist.emplace_back(lo, hi);
  }
  std::vector<Point> out(count);
  for (auto& p : out) {
    p = Point{};
    for (int i = 0; i < chart.dim(); ++i) p[i] = dist[i](rng);
  }
  return out;
}

}  // namespace mcurv
