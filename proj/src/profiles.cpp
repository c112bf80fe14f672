#include "mcurv/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcurv/errors.hpp"

namespace mcurv {

namespace {

// S = 1 / (1 + e^g) with g = 1/u - 1/(1-u). Returns S, 1 - S and S(1-S)
// without overflow or cancellation.
struct Logistic {
  double s;
  double c;
  double sc;
};

Logistic logistic_of(double g) {
  if (g > 0.0) {
    const double e = std::exp(-g);
    return {e / (1.0 + e), 1.0 / (1.0 + e), e / ((1.0 + e) * (1.0 + e))};
  }
  const double e = std::exp(g);
  return {1.0 / (1.0 + e), e / (1.0 + e), e / ((1.0 + e) * (1.0 + e))};
}

}  // namespace

Jet smooth_step(const Jet& u) {
  const double x = u.v;
  if (x <= 0.0) return Jet::constant(0.0);
  if (x >= 1.0) return Jet::constant(1.0);
  const double y = 1.0 - x;
  const double g = 1.0 / x - 1.0 / y;
  const double g1 = -1.0 / (x * x) - 1.0 / (y * y);
  const double g2 = 2.0 / (x * x * x) - 2.0 / (y * y * y);
  const Logistic l = logistic_of(g);
  const double s1 = -l.sc * g1;
  const double s2 = -(1.0 - 2.0 * l.s) * s1 * g1 - l.sc * g2;
  return chain(u, l.s, s1, s2);
}

Jet sqrt_smooth_step(const Jet& u) {
  const double x = u.v;
  if (x <= 0.0) return Jet::constant(0.0);
  if (x >= 1.0) return Jet::constant(1.0);
  const double y = 1.0 - x;
  const double g = 1.0 / x - 1.0 / y;
  const double g1 = -1.0 / (x * x) - 1.0 / (y * y);
  const double g2 = 2.0 / (x * x * x) - 2.0 / (y * y * y);
  const Logistic l = logistic_of(g);
  const double s = l.s, c = l.c;
  double t;
  if (g > 0.0) {
    const double e = std::exp(-g);
    t = std::exp(-0.5 * g) / std::sqrt(1.0 + e);
  } else {
    t = 1.0 / std::sqrt(1.0 + std::exp(g));
  }
  if (t == 0.0) return Jet::constant(0.0);
  const double tg = -0.5 * t * c;
  const double tgg = t * c * (0.25 * c - 0.5 * s);
  return chain(u, t, tg * g1, tgg * g1 * g1 + tg * g2);
}

Jet mollifier_of_square(const Jet& s) {
  if (s.v <= 0.25) return Jet::constant(1.0);
  if (s.v >= 1.0) return Jet::constant(0.0);
  return smooth_step(2.0 * (1.0 - sqrt(s)));
}

Profile bump_profile(double lo, double hi, double peak, double amplitude) {
  if (!(lo < peak && peak < hi)) throw ArgumentError("bump profile needs lo < peak < hi");
  const double wl = peak - lo, wr = hi - peak;
  Profile p;
  p.family = "bump";
  p.params = {{"lo", lo}, {"hi", hi}, {"peak", peak}, {"amplitude", amplitude}};
  p.eval = [=](const Jet& x) {
    if (x.v <= lo || x.v >= hi) return Jet::constant(0.0);
    return amplitude * sqrt_smooth_step((x - lo) / wl) * sqrt_smooth_step((hi - x) / wr);
  };
  return p;
}

Profile raised_cosine_profile(double center, double width, double amplitude) {
  if (!(width > 0.0)) throw ArgumentError("raised-cosine profile needs a positive width");
  Profile p;
  p.family = "raised_cosine";
  p.params = {{"center", center}, {"width", width}, {"amplitude", amplitude}};
  p.eval = [=](const Jet& x) {
    if (std::abs(x.v - center) >= width) return Jet::constant(0.0);
    return 0.5 * amplitude * (1.0 + cos((std::numbers::pi / width) * (x - center)));
  };
  return p;
}

Profile cos2_polynomial_profile(std::vector<double> coefficients) {
  if (coefficients.empty()) throw ArgumentError("cos^2 polynomial needs at least one coefficient");
  Profile p;
  p.family = "cos2_polynomial";
  for (size_t k = 0; k < coefficients.size(); ++k) p.params["c" + std::to_string(k)] = coefficients[k];
  p.eval = [c = std::move(coefficients)](const Jet& x) {
    const Jet w = square(cos(x));
    // Horner in w.
    Jet acc = Jet::constant(c.back());
    for (size_t k = c.size() - 1; k-- > 0;) acc = acc * w + c[k];
    return acc;
  };
  return p;
}

Profile table_profile(std::vector<double> xs, std::vector<double> fs, int degree) {
  const size_t n = xs.size();
  if (n < 2 || fs.size() != n) throw ArgumentError("table profile needs matching x and f lists of length >= 2");
  if (degree != 1 && degree != 3) throw ArgumentError("table profile degree must be 1 or 3");
  for (size_t i = 1; i < n; ++i)
    if (!(xs[i] > xs[i - 1])) throw ArgumentError("table profile x values must increase strictly");
  // Second derivatives of the natural cubic spline (zero for degree 1).
  std::vector<double> m(n, 0.0);
  if (degree == 3 && n > 2) {
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0);
    for (size_t i = 1; i + 1 < n; ++i) {
      const double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
      sub[i] = h0;
      diag[i] = 2.0 * (h0 + h1);
      rhs[i] = 6.0 * ((fs[i + 1] - fs[i]) / h1 - (fs[i] - fs[i - 1]) / h0);
    }
    // Thomas algorithm on rows 1..n-2; the super-diagonal of row i is h_i.
    for (size_t i = 2; i + 1 < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * (xs[i] - xs[i - 1]);
      rhs[i] -= w * rhs[i - 1];
    }
    for (size_t i = n - 2; i >= 1; --i) {
      const double sup = i + 2 < n ? xs[i + 1] - xs[i] : 0.0;
      m[i] = (rhs[i] - sup * m[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }
  Profile p;
  p.family = "table";
  p.params = {{"degree", degree}, {"nodes", static_cast<double>(n)}};
  p.eval = [xs = std::move(xs), fs = std::move(fs), m = std::move(m)](const Jet& x) {
    const size_t n = xs.size();
    if (x.v <= xs.front()) return Jet::constant(fs.front());
    if (x.v >= xs.back()) return Jet::constant(fs.back());
    const size_t k = std::min<size_t>(n - 2, std::upper_bound(xs.begin(), xs.end(), x.v) - xs.begin() - 1);
    const double h = xs[k + 1] - xs[k];
    const double A = (xs[k + 1] - x.v) / h, B = (x.v - xs[k]) / h;
    const double v = A * fs[k] + B * fs[k + 1] + ((A * A * A - A) * m[k] + (B * B * B - B) * m[k + 1]) * h * h / 6.0;
    const double d1 = (fs[k + 1] - fs[k]) / h - (3.0 * A * A - 1.0) / 6.0 * h * m[k] +
                      (3.0 * B * B - 1.0) / 6.0 * h * m[k + 1];
    const double d2 = A * m[k] + B * m[k + 1];
    return chain(x, v, d1, d2);
  };
  return p;
}

Profile constant_profile(double c) {
  Profile p;
  p.family = "constant";
  p.params = {{"value", c}};
  p.eval = [c](const Jet&) { return Jet::constant(c); };
  return p;
}

Profile mirrored(const Profile& f, double m) {
  Profile p = f;
  p.params["mirror_about"] = m;
  p.eval = [g = f.eval, m](const Jet& x) { return g(2.0 * m - x); };
  return p;
}

ScalarField profile_field(const ChartPtr& chart, const Profile& f, int axis) {
  if (axis < 0 || axis >= chart->dim()) throw ArgumentError("profile axis out of range");
  return ScalarField(chart, 2, [f, axis](const Point& x) { return f(Jet::variable(x[axis], axis)); });
}

}  // namespace mcurv
