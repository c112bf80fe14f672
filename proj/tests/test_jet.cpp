#include <doctest.h>

#include <mcurv/jet.hpp>

#include "support.hpp"

using namespace mcurv;
using namespace mcurv::test;

namespace {

template <class F>
Jet eval_at(F f, const Point& x) {
  return f(seed(x));
}

// Central differences of the value (first partials) and of the jet's own
// gradient (second partials).
template <class F>
void expect_matches_fd(F f, const Point& x, double step, double tol) {
  const Jet j = eval_at(f, x);
  for (int i = 0; i < kMaxDim; ++i) {
    Point xp = x, xm = x;
    xp[i] += step;
    xm[i] -= step;
    const Jet jp = eval_at(f, xp), jm = eval_at(f, xm);
    CHECK(std::abs((jp.v - jm.v) / (2 * step) - j.d[i]) <= tol * (1 + std::abs(j.d[i])));
    for (int k = 0; k < kMaxDim; ++k)
      CHECK(std::abs((jp.d[k] - jm.d[k]) / (2 * step) - j.h[i][k]) <= tol * (1 + std::abs(j.h[i][k])));
  }
}

}  // namespace

TEST_SUITE("jet") {
  TEST_CASE("composite expressions match central differences") {
    auto f = [](const JetPoint& p) {
      return exp(sin(p[0]) * p[1]) / (1.0 + square(p[2])) + sqrt(2.0 + cos(p[0] * p[1])) -
             log(3.0 + tan(0.3 * p[2])) + pow(1.5 + p[0] * p[0], 0.7);
    };
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const Point x{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
      expect_matches_fd(f, x, 1e-5, 1e-7);
    }
  }

  TEST_CASE("product and quotient rules") {
    const Point x{0.3, -0.7, 1.1};
    const JetPoint p = seed(x);
    const Jet a = p[0] * p[1], b = p[1] + p[2] * p[2];
    const Jet q = a / b;
    const double bv = b.v;
    CHECK(q.v == doctest::Approx(a.v / bv).epsilon(1e-15));
    CHECK(q.d[0] == doctest::Approx(x[1] / bv).epsilon(1e-14));
    CHECK(q.h[0][0] == doctest::Approx(0.0));
    CHECK(q.h[0][1] == q.h[1][0]);
  }

  TEST_CASE("hessians are symmetric") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      const Point x{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, 0.1, 1)};
      const JetPoint p = seed(x);
      const Jet j = sin(p[0] * p[2]) * exp(p[1]) / p[2];
      for (int i = 0; i < kMaxDim; ++i)
        for (int k = 0; k < kMaxDim; ++k) CHECK(j.h[i][k] == doctest::Approx(j.h[k][i]).epsilon(1e-14));
    }
  }

  TEST_CASE("partial drops one order and marks the unknown hessian") {
    const JetPoint p = seed({0.4, 0.2, 0.0});
    const Jet j = p[0] * p[0] * p[1];
    const Jet d = partial(j, 0);
    CHECK(d.v == doctest::Approx(2 * 0.4 * 0.2));
    CHECK(d.d[0] == doctest::Approx(2 * 0.2));
    CHECK(d.d[1] == doctest::Approx(2 * 0.4));
    CHECK(std::isnan(d.h[0][0]));
  }

  TEST_CASE("truncate replaces dropped orders with NaN") {
    const Jet j = square(Jet::variable(2.0, 1));
    const Jet t1 = truncate(j, 1);
    CHECK(t1.d[1] == 4.0);
    CHECK(std::isnan(t1.h[1][1]));
    const Jet t0 = truncate(j, 0);
    CHECK(t0.v == 4.0);
    CHECK(std::isnan(t0.d[1]));
  }
}
