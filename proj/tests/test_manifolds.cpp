#include <doctest.h>

#include <mcurv/errors.hpp>
#include <mcurv/geometry.hpp>
#include <mcurv/manifolds.hpp>

#include "support.hpp"

using namespace mcurv;
using namespace mcurv::test;

TEST_SUITE("manifolds") {
  TEST_CASE("unit sphere profile is the circle") {
    const ArclengthProfile p(1.0, 256);
    CHECK(p.half_length() == doctest::Approx(kPi / 2).epsilon(1e-13));
    CHECK(p.c1(Jet::constant(0.0)).v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(p.c2(Jet::constant(0.0)).v) < 1e-14);
    CHECK(p.c1(Jet::constant(kPi / 4)).v == doctest::Approx(std::cos(kPi / 4)).epsilon(1e-12));
    CHECK(p.c1(Jet::constant(kPi / 4)).v == doctest::Approx(0.70711).epsilon(1e-5));
  }

  TEST_CASE("equatorial radius equals a") {
    const auto chart = make_ellipsoid_2d(2.0);
    CHECK(chart->metric({0.0, 0.3, 0.0})[1][1] == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(arclength_profile(*chart)->c1(Jet::constant(0.0)).v == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("generating curve has unit speed and lies on the ellipse") {
    std::mt19937_64 rng(31);
    for (double a : {0.5, 1.0, 2.0, 3.5}) {
      const ArclengthProfile p(a, 256);
      for (int trial = 0; trial < 50; ++trial) {
        const double r = uniform(rng, -0.98, 0.98) * p.half_length();
        const Jet c1 = p.c1(Jet::variable(r, 0)), c2 = p.c2(Jet::variable(r, 0));
        CHECK(c1.d[0] * c1.d[0] + c2.d[0] * c2.d[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((c1.v / a) * (c1.v / a) + c2.v * c2.v == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.arclength(p.phi(r)) == doctest::Approx(r).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("profile jets match finite differences of the values") {
    const ArclengthProfile p(2.0, 256);
    const double h = 1e-5;
    for (double r : {-1.2, -0.3, 0.0, 0.5, 1.3}) {
      const Jet c = p.c1(Jet::variable(r, 0));
      const double d1 = (p.c1(Jet::constant(r + h)).v - p.c1(Jet::constant(r - h)).v) / (2 * h);
      const double d2 = (p.c1(Jet::variable(r + h, 0)).d[0] - p.c1(Jet::variable(r - h, 0)).d[0]) / (2 * h);
      CHECK(c.d[0] == doctest::Approx(d1).epsilon(1e-8));
      CHECK(c.h[0][0] == doctest::Approx(d2).epsilon(1e-7));
    }
  }

  TEST_CASE("Killing bases") {
    const auto surf = make_ellipsoid_2d(2.0);
    const auto b2 = killing_basis(surf);
    CHECK(b2.fields.size() == 1);
    CHECK(b2.complete);
    CHECK_FALSE(killing_basis(make_sphere2()).complete);

    const auto chart = make_ellipsoid_3d(2.0);
    const auto b3 = killing_basis(chart);
    CHECK(b3.fields.size() == 2);
    const auto samples = sample_random(*chart, 100, 5, 1e-2);
    for (const auto& X : b3.fields) CHECK(killing_residual(X, samples) <= 1e-10);

    const auto torus = make_flat_torus(2);
    const auto bt = killing_basis(torus);
    CHECK(bt.fields.size() == 2);
    const auto tsamples = sample_random(*torus, 50, 6, 0.0);
    for (const auto& X : bt.fields) CHECK(killing_residual(X, tsamples) == 0.0);
  }

  TEST_CASE("Killing norm law on the 3D ellipsoid") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = uniform(rng, 0.3, 3.0), p = uniform(rng, -2, 2), q = uniform(rng, -2, 2);
      const auto chart = make_ellipsoid_3d(a);
      const auto h = norm_squared(killing_combination(chart, p, q));
      const Point x = random_point(*chart, rng);
      const double s = std::sin(x[2]), c = std::cos(x[2]);
      CHECK(std::abs(h(x) - (a * a * p * p * s * s + q * q * c * c)) <= 1e-12);
    }
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(make_ellipsoid_2d(0.0), ArgumentError);
    CHECK_THROWS_AS(make_flat_torus(4), ArgumentError);
    CHECK_THROWS_AS(killing_combination(make_ellipsoid_2d(2.0), 1.0, 1.0), CapabilityError);
  }
}
