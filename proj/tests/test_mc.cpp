#include <doctest.h>

#include <omp.h>

#include <mcurv/errors.hpp>
#include <mcurv/geometry.hpp>
#include <mcurv/manifolds.hpp>
#include <mcurv/perturbation.hpp>
#include <mcurv/verify.hpp>

#include "support.hpp"

using namespace mcurv;
using namespace mcurv::test;

namespace {

const Profile kBump = bump_profile(0.35, 0.95, 0.85, 1.0);

ZonalFlow certified_flow() { return make_zonal_flow(make_ellipsoid_3d(2.0), kBump, {1, 0, true}); }

QuadratureRule coarse(const Chart& chart) { return QuadratureRule::for_chart(chart, {8, 8, 48}); }

}  // namespace

TEST_SUITE("mc") {
  TEST_CASE("mc(Z, Z) and mc(Z, 0) vanish") {
    const auto z = certified_flow();
    const auto rule = coarse(*z.chart);
    CHECK(std::abs(mc_direct(z.Z(), z.Z(), rule)) <= 1e-12);
    CHECK(std::abs(mc_direct(z.Z(), VectorField::zero(z.chart), rule)) <= 1e-12);
    CHECK(std::abs(mc_zonal(z, z.Z(), rule)) <= 1e-12);
  }

  TEST_CASE("mc is quadratic in Y and its first term is never positive") {
    std::mt19937_64 rng(71);
    const auto z = certified_flow();
    const auto rule = coarse(*z.chart);
    for (int trial = 0; trial < 10; ++trial) {
      const auto Y = random_vector_field(z.chart, rng);
      const double c = uniform(rng, -3, 3);
      const auto base = mc_direct_detail(z.Z(), Y, rule);
      CHECK(base.first_term <= 0.0);
      CHECK(rel_diff(mc_direct(z.Z(), c * Y, rule), c * c * base.value) < 1e-12);
    }
  }

  TEST_CASE("three formulas agree for the commuting bump") {
    const auto z = certified_flow();
    const auto pf = build_commuting_bump(z, BumpProfile{});
    const auto rule = QuadratureRule::for_chart(*z.chart, {16, 16, 64});
    const auto v = evaluate_formulas(z.Z(), pf.Y, &z, rule);
    REQUIRE(v.zonal);
    REQUIRE(v.commuting);
    CHECK(v.direct > 0.0);
    CHECK(rel_diff(v.direct, *v.zonal) < 5e-3);
    CHECK(rel_diff(v.direct, *v.commuting) < 5e-3);
    CHECK(rel_diff(v.direct, v.cross_form) < 5e-3);
    CHECK(v.max_divergence < 1e-8);
    CHECK(v.max_commutator < 1e-8);
  }

  TEST_CASE("commuting Y reduces mc to -1/2 int Y^2(f^2) ||X||^2") {
    const auto z = certified_flow();
    const auto pf = build_commuting_bump(z, BumpProfile{});
    const auto rule = QuadratureRule::for_chart(*z.chart, {16, 16, 64});
    const auto f2 = z.f * z.f;
    const auto h = norm_squared(z.X);
    const auto integrand = -0.5 * (directional(pf.Y, directional(pf.Y, f2)) * h);
    CHECK(rel_diff(integrate(integrand, rule), mc_direct(z.Z(), pf.Y, rule)) < 1e-3);
  }

  TEST_CASE("constant profile with commuting Y gives zero") {
    const auto chart = make_ellipsoid_3d(2.0);
    const auto z = make_zonal_flow(chart, constant_profile(1.0), {1, 0, true});
    const auto Y = rotational_bump(chart, {0, 1, 0}, BumpProfile{}).Y;
    const auto rule = QuadratureRule::for_chart(*chart, {16, 16, 64});
    CHECK(mc_commuting(z, Y, rule) == 0.0);
    CHECK(std::abs(mc_direct(z.Z(), Y, rule)) < 1e-3);
  }

  TEST_CASE("Y tangent to the level sets of ||X||^2 gives zero") {
    const auto z = certified_flow();
    const auto Y = VectorField::coordinate(z.chart, {0.0, 1.0, 0.0});
    CHECK(mc_commuting(z, Y, coarse(*z.chart)) == 0.0);
  }

  TEST_CASE("zero amplitude bump gives zero") {
    const auto z = certified_flow();
    BumpProfile b;
    b.amplitude = 0.0;
    const auto Y = rotational_bump(z.chart, {0, 1, 0}, b).Y;
    CHECK(mc_direct(z.Z(), Y, coarse(*z.chart)) == 0.0);
  }

  TEST_CASE("non-commuting divergence-free Y: zonal formula matches the definition") {
    const auto z = certified_flow();
    BumpProfile b;
    b.t_half_width = 1.5;
    const auto Y = rotational_bump(z.chart, {1, 1, 0}, b).Y;
    const auto rule = QuadratureRule::for_chart(*z.chart, {48, 48, 96});
    const auto v = evaluate_formulas(z.Z(), Y, &z, rule);
    CHECK(v.max_commutator > 1e-3);
    CHECK(v.max_divergence < 1e-8);
    REQUIRE(v.zonal);
    CHECK(std::abs(v.direct - *v.zonal) < 1e-6 * std::max(1.0, std::abs(v.direct)));
    CHECK_THROWS_AS(mc_commuting(z, Y, rule), PreconditionError);
  }

  TEST_CASE("scaling f by 1/c and X by c leaves mc unchanged") {
    const auto z = certified_flow();
    const auto chart = z.chart;
    const auto Y = rotational_bump(chart, {0, 1, 0}, BumpProfile{}).Y;
    const auto rule = coarse(*chart);
    const double ref = mc_commuting(z, Y, rule);
    for (double c : {0.5, 3.0}) {
      const Profile scaled = bump_profile(0.35, 0.95, 0.85, 1.0 / c);
      const auto zc = make_zonal_flow(chart, scaled, {c, 0, false});
      CHECK(rel_diff(mc_commuting(zc, Y, rule), ref) < 1e-10);
      CHECK(rel_diff(mc_direct(zc.Z(), Y, rule), mc_direct(z.Z(), Y, rule)) < 1e-10);
    }
  }

  TEST_CASE("kernel results do not depend on the thread count") {
    const auto z = certified_flow();
    const auto pf = build_commuting_bump(z, BumpProfile{});
    const auto rule = QuadratureRule::for_chart(*z.chart, {8, 8, 32});
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = evaluate_formulas(z.Z(), pf.Y, &z, rule);
    omp_set_num_threads(3);
    const auto three = evaluate_formulas(z.Z(), pf.Y, &z, rule);
    omp_set_num_threads(saved);
    const auto serial = evaluate_formulas(z.Z(), pf.Y, &z, rule, {}, Execution::Serial);
    CHECK(one.direct == three.direct);
    CHECK(one.direct == serial.direct);
    CHECK(*one.zonal == *three.zonal);
    CHECK(*one.commuting == *serial.commuting);
  }

  TEST_CASE("report flags a Y that is not divergence free") {
    const auto z = certified_flow();
    const auto Y = rotational_bump(z.chart, {0, 1, 0}, BumpProfile{}, false).Y;
    const auto r = evaluate_mc(z.Z(), Y, &z, QuadratureRule::for_chart(*z.chart, {8, 8, 32}));
    CHECK(r.base.max_divergence > 1e-6);
    CHECK_FALSE(r.mc_commuting.has_value());
    CHECK_FALSE(r.warnings.empty());
    const auto j = r.to_json();
    CHECK(j.contains("schema_version"));
    CHECK(j.contains("warnings"));
  }

  TEST_CASE("2D non-commuting bump: definition and zonal formula agree") {
    const auto chart = make_ellipsoid_2d(2.0);
    const auto z = make_zonal_flow(chart, raised_cosine_profile(0.2, 1.2, 1.0));
    BumpProfile b;
    b.chi0 = 0.3;
    b.radius = 0.5;
    b.t_half_width = 1.5;
    const auto Y = rotational_bump(chart, {0, 1, 0}, b).Y;
    const auto v = evaluate_formulas(z.Z(), Y, &z, QuadratureRule::for_chart(*chart, {384, 256}));
    REQUIRE(v.zonal);
    CHECK(rel_diff(v.direct, *v.zonal) < 1e-6);
    CHECK(rel_diff(v.direct, v.cross_form) < 1e-5);
  }
}
