#include "mcurv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mcurv/errors.hpp"
#include "mcurv/geometry.hpp"
#include "mcurv/manifolds.hpp"

namespace mcurv {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    default:
      return "skipped";
  }
}

bool VerifyReport::all_pass() const { return failures() == 0; }

int VerifyReport::failures() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                        [](const Check& c) { return c.status == CheckStatus::Fail; }));
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "mcurv.verify_report";
  j["schema_version"] = kVerifyReportSchemaVersion;
  j["chart"] = chart_kind;
  j["failures"] = failures();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e = {{"name", c.name},
                        {"residual", c.residual},
                        {"tolerance", c.tolerance},
                        {"status", to_string(c.status)}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  return j;
}

namespace {

struct Wave {
  std::array<double, kMaxDim> k{};
  double phase = 0.0;
  double amplitude = 0.0;
};

std::vector<Wave> random_waves(const Chart& chart, std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> n(-2, 2);
  std::vector<Wave> waves(count);
  for (auto& w : waves) {
    for (int i = 0; i < chart.dim(); ++i) w.k[i] = chart.axis(i).periodic ? n(rng) : 2.0 * u(rng);
    w.phase = 3.0 * u(rng);
    w.amplitude = u(rng);
  }
  return waves;
}

Jet eval_waves(const std::vector<Wave>& waves, double offset, const JetPoint& x, int dim) {
  Jet r = Jet::constant(offset);
  for (const auto& w : waves) {
    Jet arg = Jet::constant(w.phase);
    for (int i = 0; i < dim; ++i) arg += w.k[i] * x[i];
    r += w.amplitude * sin(arg);
  }
  return r;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = 0; j < kMaxDim; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

class Suite {
 public:
  Suite(VerifyReport& report, const VerifyOptions& opt) : report_(report), opt_(opt) {}

  // Runs `body`, which returns the residual. Library errors fail the check.
  void run(const std::string& name, double tolerance, const std::function<double()>& body,
           bool larger_is_better = false) {
    Check c;
    c.name = name;
    c.tolerance = tolerance;
    try {
      c.residual = body();
      const bool ok = larger_is_better ? c.residual > tolerance : c.residual <= tolerance;
      c.status = std::isfinite(c.residual) && ok ? CheckStatus::Pass : CheckStatus::Fail;
    } catch (const CapabilityError& e) {
      c.status = CheckStatus::Skipped;
      c.detail = e.what();
    } catch (const Error& e) {
      c.status = CheckStatus::Fail;
      c.residual = std::numeric_limits<double>::infinity();
      c.detail = e.what();
    }
    report_.checks.push_back(std::move(c));
  }

  void skip(const std::string& name, const std::string& why) {
    report_.checks.push_back({name, 0.0, 0.0, CheckStatus::Skipped, why});
  }

 private:
  VerifyReport& report_;
  const VerifyOptions& opt_;
};

}  // namespace

ScalarField random_scalar_field(const ChartPtr& chart, std::mt19937_64& rng) {
  auto waves = random_waves(*chart, rng, 3);
  const double offset = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  const int dim = chart->dim();
  return ScalarField::from_expression(
      chart, [waves, offset, dim](const JetPoint& x) { return eval_waves(waves, offset, x, dim); });
}

VectorField random_vector_field(const ChartPtr& chart, std::mt19937_64& rng) {
  const int dim = chart->dim();
  std::array<std::vector<Wave>, kMaxDim> waves;
  std::array<double, kMaxDim> offsets{};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < dim; ++i) {
    waves[i] = random_waves(*chart, rng, 3);
    offsets[i] = u(rng);
  }
  return VectorField::from_expression(chart, [waves, offsets, dim](const JetPoint& x) {
    VecJet v{};
    for (int i = 0; i < dim; ++i) v[i] = eval_waves(waves[i], offsets[i], x, dim);
    return v;
  });
}

double jet_fd_error(const Chart& chart, const std::function<Jet(const Point&)>& f,
                    const std::vector<Point>& samples, double step) {
  const int dim = chart.dim();
  double err = 0.0, scale = 0.0;
  for (const Point& x : samples) {
    const Jet j = f(x);
    for (int i = 0; i < dim; ++i) {
      Point xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const Jet jp = f(xp), jm = f(xm);
      const double d = (jp.v - jm.v) / (2.0 * step);
      err = std::max(err, std::abs(d - j.d[i]));
      scale = std::max(scale, std::abs(j.d[i]));
      for (int k = 0; k < dim; ++k) {
        const double dd = (jp.d[k] - jm.d[k]) / (2.0 * step);
        err = std::max(err, std::abs(dd - j.h[i][k]));
        scale = std::max(scale, std::abs(j.h[i][k]));
      }
    }
  }
  return err / std::max(scale, 1e-300);
}

VerifyReport verify_chart(const ChartPtr& chart, const VerifyOptions& opt, const ZonalFlow* flow) {
  VerifyReport report;
  report.chart_kind = chart->kind();
  Suite suite(report, opt);
  const int dim = chart->dim();
  const double tol = opt.identity_tolerance;
  const auto grid = sample_grid(*chart, opt.grid_per_axis, opt.collar);
  const auto random = sample_random(*chart, opt.random_points, opt.seed, opt.collar);
  const auto fd_points = sample_random(*chart, 50, opt.seed + 1, opt.collar + 10.0 * opt.fd_step);

  suite.run("metric symmetric", tol, [&] {
    double r = 0.0;
    for (const Point& x : grid) {
      const Matrix g = chart->metric(x);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) r = std::max(r, std::abs(g[i][j] - g[j][i]));
    }
    return r;
  });
  // Residual is the smallest eigenvalue; the check passes when it is positive.
  suite.run("metric positive definite", 0.0, [&] {
    double m = std::numeric_limits<double>::infinity();
    for (const Point& x : grid) m = std::min(m, metric_conditioning(chart->metric(x), dim).min_eigenvalue);
    return m;
  }, true);
  suite.run("volume density positive", 0.0, [&] {
    double m = std::numeric_limits<double>::infinity();
    for (const Point& x : grid) {
      const double det = det_jet(chart->metric_jet(x), dim).v;
      m = std::min(m, det > 0.0 ? std::sqrt(det) : det);
    }
    return m;
  }, true);
  suite.run("periodic endpoints agree", 1e-12, [&] {
    double r = 0.0;
    for (int ax = 0; ax < dim; ++ax) {
      if (!chart->axis(ax).periodic) continue;
      for (Point x : random) {
        x[ax] = chart->axis(ax).lo;
        const Matrix lo = chart->metric(x);
        x[ax] = chart->axis(ax).hi;
        r = std::max(r, max_abs_diff(lo, chart->metric(x)));
      }
    }
    return r;
  });
  suite.run("metric jets match finite differences", opt.fd_tolerance, [&] {
    double r = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        r = std::max(r, jet_fd_error(*chart, [&](const Point& x) { return chart->metric_jet(x)[i][j]; },
                                     fd_points, opt.fd_step));
    return r;
  });

  if (chart->has_closed_form_christoffel()) {
    suite.run("closed-form Christoffel symbols match generic formula", tol, [&] {
      double r = 0.0;
      for (const Point& x : grid) {
        const ChristoffelValues a = christoffel(*chart, x);
        const ChristoffelValues b = chart->christoffel_closed_form(x);
        for (int k = 0; k < kMaxDim; ++k) r = std::max(r, max_abs_diff(a[k], b[k]));
      }
      return r;
    });
  } else {
    suite.skip("closed-form Christoffel symbols match generic formula", "no closed form for this chart");
  }
  suite.run("Christoffel symbols symmetric in lower indices", tol, [&] {
    double r = 0.0;
    for (const Point& x : random) {
      const ChristoffelValues gamma = christoffel(*chart, x);
      for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) r = std::max(r, std::abs(gamma[k][i][j] - gamma[k][j][i]));
    }
    return r;
  });

  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::vector<Point> few(random.begin(), random.begin() + std::min<size_t>(100, random.size()));
  suite.run("field jets match finite differences", opt.fd_tolerance, [&] {
    double r = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const ScalarField h = random_scalar_field(chart, rng);
      r = std::max(r, jet_fd_error(*chart, [&](const Point& x) { return h.jet(x); }, fd_points, opt.fd_step));
      const VectorField v = random_vector_field(chart, rng);
      for (int i = 0; i < dim; ++i)
        r = std::max(r, jet_fd_error(*chart, [&](const Point& x) { return v.jet(x)[i]; }, fd_points,
                                     opt.fd_step));
    }
    return r;
  });
  suite.run("g(grad h, V) = V(h)", 1e-9, [&] {
    double r = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField h = random_scalar_field(chart, rng);
      const VectorField v = random_vector_field(chart, rng);
      const ScalarField lhs = inner(grad(h), v);
      const ScalarField rhs = directional(v, h);
      for (const Point& x : few) {
        const double a = lhs(x), b = rhs(x);
        r = std::max(r, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}));
      }
    }
    return r;
  });
  suite.run("torsion free", tol, [&] {
    double r = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const VectorField v = random_vector_field(chart, rng), w = random_vector_field(chart, rng);
      const VectorField t = covariant_derivative(v, w) - covariant_derivative(w, v) - lie_bracket(v, w);
      for (const Point& x : few)
        for (int i = 0; i < dim; ++i) r = std::max(r, std::abs(t.jet(x)[i].v));
    }
    return r;
  });
  suite.run("metric compatible", tol, [&] {
    double r = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const VectorField v = random_vector_field(chart, rng), w = random_vector_field(chart, rng),
                        u = random_vector_field(chart, rng);
      const ScalarField lhs = directional(v, inner(w, u));
      const ScalarField rhs = inner(covariant_derivative(v, w), u) + inner(w, covariant_derivative(v, u));
      for (const Point& x : few) r = std::max(r, std::abs(lhs(x) - rhs(x)));
    }
    return r;
  });
  suite.run("bracket Jacobi identity", tol, [&] {
    double r = 0.0;
    const VectorField a = random_vector_field(chart, rng), b = random_vector_field(chart, rng),
                      c = random_vector_field(chart, rng);
    const VectorField j = lie_bracket(lie_bracket(a, b), c) + lie_bracket(lie_bracket(b, c), a) +
                          lie_bracket(lie_bracket(c, a), b);
    for (const Point& x : few)
      for (int i = 0; i < dim; ++i) r = std::max(r, std::abs(j.jet(x)[i].v));
    return r;
  });

  KillingBasis basis;
  bool have_basis = true;
  try {
    basis = killing_basis(chart);
  } catch (const CapabilityError& e) {
    have_basis = false;
    for (const char* name : {"Killing residual", "2 nabla_X X + grad ||X||^2 = 0", "X(||X||^2) = 0"})
      suite.skip(name, e.what());
  }
  if (have_basis) {
    std::vector<VectorField> fields = basis.fields;
    if (chart->kind() == "ellipsoid3d") {
      std::uniform_int_distribution<int> n(-3, 3);
      for (int t = 0; t < 3; ++t) fields.push_back(killing_combination(chart, n(rng), n(rng)));
    }
    suite.run("Killing residual", tol, [&] {
      double r = 0.0;
      for (const auto& X : fields) r = std::max(r, killing_residual(X, random));
      return r;
    });
    suite.run("2 nabla_X X + grad ||X||^2 = 0", tol, [&] {
      double r = 0.0;
      for (const auto& X : fields)
        r = std::max(r, max_norm(2.0 * covariant_derivative(X, X) + grad(norm_squared(X)), random));
      return r;
    });
    suite.run("X(||X||^2) = 0", tol, [&] {
      double r = 0.0;
      for (const auto& X : fields) r = std::max(r, max_abs(directional(X, norm_squared(X)), random));
      return r;
    });
    if (!basis.complete)
      suite.skip("Killing basis complete", "round metric: the isometry algebra is larger than the listed span");
  }

  if (chart->kind() == "ellipsoid3d") {
    const double a = chart->param("a");
    suite.run("||p d_xi + q d_mu||^2 = a^2 p^2 sin^2 chi + q^2 cos^2 chi", 1e-10, [&] {
      double r = 0.0;
      std::uniform_real_distribution<double> u(-3.0, 3.0);
      for (int t = 0; t < 5; ++t) {
        const double p = u(rng), q = u(rng);
        const ScalarField h = norm_squared(killing_combination(chart, p, q));
        for (const Point& x : random) {
          const double s = std::sin(x[2]), c = std::cos(x[2]);
          r = std::max(r, std::abs(h(x) - (a * a * p * p * s * s + q * q * c * c)));
        }
      }
      return r;
    });
  }
  if (auto profile = arclength_profile(*chart)) {
    suite.run("generating curve has unit speed", tol, [&] {
      double r = 0.0;
      const auto [lo, hi] = chart->trimmed_bounds(0, opt.collar);
      for (int i = 0; i <= 400; ++i) {
        const Jet s = Jet::variable(lo + (hi - lo) * i / 400.0, 0);
        const double d1 = profile->c1(s).d[0], d2 = profile->c2(s).d[0];
        r = std::max(r, std::abs(d1 * d1 + d2 * d2 - 1.0));
      }
      return r;
    });
  }
  if (chart->kind() == "ellipsoid2d" || chart->kind() == "sphere2") {
    // Residual is the spread of ||d_theta||^2, which must be positive.
    suite.run("||d_theta||^2 non-constant", 1e-6, [&] {
      const ScalarField h = norm_squared(zonal_killing_field(chart));
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const Point& x : grid) {
        lo = std::min(lo, h(x));
        hi = std::max(hi, h(x));
      }
      return hi - lo;
    }, true);
  }

  if (flow) {
    const VectorField Z = flow->Z();
    const ScalarField f2 = flow->f * flow->f;
    suite.run("X(f) = 0", tol, [&] { return max_abs(directional(flow->X, flow->f), random); });
    suite.run("nabla_Z Z = f^2 nabla_X X", tol, [&] {
      return max_norm(covariant_derivative(Z, Z) - f2 * covariant_derivative(flow->X, flow->X), random);
    });
    suite.run("nabla_Z Z = -(f^2/2) grad ||X||^2", tol, [&] {
      return max_norm(covariant_derivative(Z, Z) + (0.5 * f2) * grad(norm_squared(flow->X)), random);
    });
    suite.run("intrinsic sign identity", 1e-7, [&] {
      double err = 0.0, scale = 0.0;
      for (const Point& x : random) {
        const IntrinsicSign s = intrinsic_sign(*flow, x);
        err = std::max(err, std::abs(s.lhs - s.rhs));
        scale = std::max({scale, std::abs(s.lhs), std::abs(s.rhs)});
      }
      return scale > 0.0 ? err / scale : err;
    });
    suite.run("profile jets match finite differences", opt.fd_tolerance, [&] {
      return jet_fd_error(*chart, [&](const Point& x) { return flow->f.jet(x); }, fd_points, opt.fd_step);
    });
  }
  return report;
}

}  // namespace mcurv
