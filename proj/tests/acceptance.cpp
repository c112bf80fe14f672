// Acceptance run: one PASS/FAIL line per criterion with the measured value and
// its tolerance. Exits non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <mcurv/commands.hpp>
#include <mcurv/errors.hpp>
#include <mcurv/geometry.hpp>
#include <mcurv/manifolds.hpp>
#include <mcurv/perturbation.hpp>
#include <mcurv/verify.hpp>

#include "support.hpp"

using namespace mcurv;
using namespace mcurv::test;

namespace {

struct Outcome {
  bool pass = false;
  std::string measured;
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ScenarioConfig scenario(const std::string& name) {
  return load_config(std::string(MCURV_SCENARIO_DIR) + "/" + name + ".cfg");
}

const Profile kBump = bump_profile(0.35, 0.95, 0.85, 1.0);
constexpr double kCollar = 1e-3;

double max_vec_norm(const VectorField& v, const std::vector<Point>& samples) { return max_norm(v, samples); }

// 1. Closed-form Christoffel symbols against the generic formula.
Outcome christoffel_identities() {
  double worst = 0.0;
  std::vector<ChartPtr> charts = {make_ellipsoid_2d(1.0), make_ellipsoid_2d(2.0), make_ellipsoid_3d(0.5),
                                  make_ellipsoid_3d(2.0)};
  for (const auto& chart : charts) {
    const int d = chart->dim();
    for (const Point& x : sample_grid(*chart, 20, kCollar)) {
      const auto closed = chart->christoffel_closed_form(x);
      const auto generic = christoffel(*chart, x);
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(closed[k][i][j] - generic[k][i][j]));
    }
  }
  return {worst <= 1e-8, fmt("max |closed - generic| = %.3e (tol 1e-8)", worst)};
}

// 2. Killing residuals and the identities 2 nabla_X X + grad ||X||^2 = 0, X(||X||^2) = 0.
Outcome killing_suite() {
  std::mt19937_64 rng(2);
  double killing = 0.0, lemma_a = 0.0, lemma_b = 0.0;
  auto run = [&](const VectorField& X) {
    const auto samples = sample_random(X.chart_ref(), 500, rng(), kCollar);
    const auto h = norm_squared(X);
    killing = std::max(killing, killing_residual(X, samples));
    lemma_a = std::max(lemma_a, max_vec_norm(2.0 * covariant_derivative(X, X) + grad(h), samples));
    lemma_b = std::max(lemma_b, max_abs(directional(X, h), samples));
  };
  for (double a : {0.5, 1.0, 2.0}) run(zonal_killing_field(make_ellipsoid_2d(a)));
  for (double a : {0.5, 2.0}) {
    const auto chart = make_ellipsoid_3d(a);
    run(killing_combination(chart, 1.0, 0.0));
    run(killing_combination(chart, 0.0, 1.0));
    for (int k = 0; k < 3; ++k) run(killing_combination(chart, uniform(rng, -3, 3), uniform(rng, -3, 3)));
  }
  const double worst = std::max({killing, lemma_a, lemma_b});
  return {worst <= 1e-8, fmt("killing %.2e, |2 nabla_X X + grad h| %.2e, |X(h)| %.2e (tol 1e-8)", killing,
                             lemma_a, lemma_b)};
}

// 3. ||p d_xi + q d_mu||^2 = a^2 p^2 sin^2 chi + q^2 cos^2 chi.
Outcome norm_law() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = uniform(rng, 0.25, 4.0), p = uniform(rng, -3, 3), q = uniform(rng, -3, 3);
    const auto chart = make_ellipsoid_3d(a);
    const auto h = norm_squared(killing_combination(chart, p, q));
    for (const Point& x : sample_random(*chart, 200, rng(), kCollar)) {
      const double s = std::sin(x[2]), c = std::cos(x[2]);
      worst = std::max(worst, std::abs(h(x) - (a * a * p * p * s * s + q * q * c * c)));
    }
  }
  return {worst <= 1e-10, fmt("max abs deviation over 10 (a,p,q) = %.3e (tol 1e-10)", worst)};
}

// 4. The three formulas on the certified scenario.
Outcome formula_agreement() {
  const Scenario s = build_scenario(scenario("certified_explicit"));
  const ZonalFlow& z = *s.flow;
  const VectorField Y = build_perturbation(s);
  const auto rule = QuadratureRule::for_chart(*s.chart, {32, 32, 96}, kCollar);
  const McReport rep = evaluate_mc(z.Z(), Y, &z, rule);
  if (!rep.base.zonal || !rep.base.commuting || !rep.mc_commuting)
    return {false, "a formula was not applicable"};
  const double d = rep.base.direct, zo = *rep.base.zonal, co = *rep.base.commuting;
  const double pair = std::max({rel_diff(d, zo), rel_diff(d, co), rel_diff(zo, co)});
  const double rich = rep.richardson_error / std::abs(rep.mc_direct);
  const bool ok = pair <= 1e-5 && rich <= 1e-5 && *rep.mc_commuting > 0.0;
  std::printf("    baseline: mc_direct %.10f  mc_zonal %.10f  mc_commuting %.10f (refined)\n", rep.mc_direct,
              *rep.mc_zonal, *rep.mc_commuting);
  return {ok, fmt("pairwise rel %.2e, Richardson rel %.2e (tol 1e-5), value %.7f", pair, rich,
                  *rep.mc_commuting)};
}

// 5. Certification of the positive flow and refusal of the geodesic one.
Outcome certification() {
  const RunReport run = run_command("certify", scenario("certified"), {});
  const auto& doc = run.document;
  if (!doc.contains("result")) return {false, "certify failed: " + doc.dump()};
  const auto& cond = doc.at("result").at("conditions");
  const double div = cond.at("a_divergence").get<double>();
  const double comm = cond.at("b_commutator").get<double>();
  const double margin = cond.at("c_support_margin").get<double>();
  const double yh = cond.at("d_max_y_of_norm").get<double>();
  const bool positive = doc.at("result").at("verdict") == "positive" && run.exit_code == kExitOk;
  const bool conditions = div <= 1e-8 && comm <= 1e-8 && cond.at("c_support_in_u_plus").get<bool>() &&
                          margin > 0.0 && yh > 0.0;

  const RunReport geo = run_command("certify", scenario("geodesic"), {});
  bool refused = geo.exit_code == kExitPrecondition && geo.document.at("error").at("kind") == "precondition";
  try {
    certify_positive(make_zonal_flow(make_ellipsoid_3d(2.0), kBump, {1, 2, true}));
    refused = false;
  } catch (const PreconditionError&) {
  }
  return {positive && conditions && refused,
          "verdict " + doc.at("result").at("verdict").get<std::string>() +
              fmt(", div %.1e, comm %.1e (tol 1e-8), margin %.4f", div, comm, margin) +
              ", geodesic refused: " + (refused ? "yes" : "no")};
}

// 6. Mirroring f about the bump center flips the sign of the commuting formula.
Outcome sign_structure() {
  const Scenario s = build_scenario(scenario("certified_explicit"));
  const ChartPtr& chart = s.chart;
  const VectorField Y = build_perturbation(s);
  const ZonalFlow rise = make_zonal_flow(chart, kBump, {1, 0, true});
  const ZonalFlow fall = make_zonal_flow(chart, mirrored(kBump, 0.6), {1, 0, true});
  const auto rule = QuadratureRule::for_chart(*chart, {32, 32, 96}, kCollar);
  const double up = mc_commuting(rise, Y, rule);
  const double down = mc_commuting(fall, Y, rule);
  const double rel = std::abs(up + down) / std::abs(up);
  const bool fall_negative = sgn_Z(fall, {0.0, 0.0, 0.6}) == -1;
  return {up > 0.0 && down < 0.0 && rel <= 1e-6 && fall_negative,
          fmt("rising %.10f, falling %.10f, |sum|/|rising| %.2e (tol 1e-6)", up, down, rel)};
}

// Random zonal flow on a 3D or 2D ellipsoid with a profile supported inside the chart.
ZonalFlow random_flow(std::mt19937_64& rng) {
  if (uniform_int(rng, 0, 3) == 0) {
    const auto chart = make_ellipsoid_2d(uniform(rng, 0.5, 3.0));
    const double d = chart->axis(0).hi;
    return make_zonal_flow(chart, random_raised_cosine(rng, -0.8 * d, 0.8 * d));
  }
  double a = uniform(rng, 0.5, 3.0);
  if (std::abs(a - 1.0) < 0.05) a = 1.5;
  const auto chart = make_ellipsoid_3d(a);
  const double p = uniform_int(rng, 0, 3), q = uniform_int(rng, p == 0 ? 1 : 0, 3);
  return make_zonal_flow(chart, random_bump(rng, 0.1, 1.45), {p, q, true});
}

// 7. mc(Z, Z) = mc(Z, 0) = 0 and -int |[Z,Y]|^2 <= 0.
Outcome trivial_identities() {
  std::mt19937_64 rng(7);
  double zero = 0.0, worst_first = -1e300;
  {
    const Scenario s = build_scenario(scenario("certified_explicit"));
    const auto rule = QuadratureRule::for_chart(*s.chart, {32, 32, 96}, kCollar);
    const VectorField Z = s.flow->Z();
    zero = std::max({zero, std::abs(mc_direct(Z, Z, rule)), std::abs(mc_direct(Z, VectorField::zero(s.chart), rule))});
  }
  for (int trial = 0; trial < 50; ++trial) {
    const ZonalFlow z = random_flow(rng);
    const auto res = z.chart->dim() == 3 ? std::array<int, kMaxDim>{8, 8, 32} : std::array<int, kMaxDim>{48, 24, 0};
    const auto rule = QuadratureRule::for_chart(*z.chart, res, kCollar);
    const VectorField Y = random_vector_field(z.chart, rng);
    const DirectResult r = mc_direct_detail(z.Z(), Y, rule);
    worst_first = std::max(worst_first, r.first_term);
    if (trial < 10) {
      zero = std::max(zero, std::abs(mc_direct(z.Z(), z.Z(), rule)));
      zero = std::max(zero, std::abs(mc_direct(z.Z(), VectorField::zero(z.chart), rule)));
    }
  }
  return {zero <= 1e-12 && worst_first <= 0.0,
          fmt("max |mc(Z,Z)|, |mc(Z,0)| = %.2e (tol 1e-12), max first term over 50 pairs = %.3e", zero,
              worst_first)};
}

// 8. g(grad ||Z||^2 + 2 nabla_Z Z, 2 nabla_Z Z) = -F f^2 ||X||^2 |grad ||X||^2|^2 on U0.
Outcome intrinsic_sign_identity() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  int samples_used = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const ZonalFlow z = random_flow(rng);
    const auto gh = grad(norm_squared(z.X));
    double max_diff = 0.0, scale = 0.0;
    for (const Point& x : zonal_samples(*z.chart, kCollar)) {
      const Point g = gh(x);
      if (std::hypot(g[0], g[1], g[2]) <= 1e-12) continue;
      const IntrinsicSign s = intrinsic_sign(z, x);
      max_diff = std::max(max_diff, std::abs(s.lhs - s.rhs));
      scale = std::max({scale, std::abs(s.lhs), std::abs(s.rhs)});
      ++samples_used;
    }
    if (scale > 0.0) worst = std::max(worst, max_diff / scale);
  }
  return {worst <= 1e-7 && samples_used > 0,
          fmt("max |lhs - rhs| / max(|lhs|,|rhs|) = %.3e over %.0f U0 samples (tol 1e-7)", worst,
              double(samples_used))};
}

// 9. (f, X) -> (f/c, cX) leaves mc and sgn(Z) unchanged.
Outcome scaling_invariance() {
  const Scenario s = build_scenario(scenario("certified_explicit"));
  const ChartPtr& chart = s.chart;
  const VectorField Y = build_perturbation(s);
  const auto rule = QuadratureRule::for_chart(*chart, {32, 32, 96}, kCollar);
  const ZonalFlow z = make_zonal_flow(chart, kBump, {1, 0, true});
  const FormulaValues ref = evaluate_formulas(z.Z(), Y, &z, rule);
  const auto samples = sample_random(*chart, 500, 9, kCollar);
  double worst = 0.0;
  int sign_mismatch = 0;
  for (double c : {0.5, 3.0}) {
    const ZonalFlow zc = make_zonal_flow(chart, bump_profile(0.35, 0.95, 0.85, 1.0 / c), {c, 0, false});
    const FormulaValues v = evaluate_formulas(zc.Z(), Y, &zc, rule);
    worst = std::max({worst, rel_diff(v.direct, ref.direct), rel_diff(*v.zonal, *ref.zonal),
                      rel_diff(*v.commuting, *ref.commuting)});
    for (const Point& x : samples) sign_mismatch += sgn_Z(zc, x) != sgn_Z(z, x);
  }
  return {worst <= 1e-10 && sign_mismatch == 0,
          fmt("max rel change of mc = %.2e (tol 1e-10), sgn mismatches %.0f of 1000", worst, double(sign_mismatch))};
}

// 10. Trimmed volumes converge to 2 pi^2 and 4 pi at second order in the collar.
Outcome volumes() {
  auto volume = [](const ChartPtr& chart, const std::array<int, kMaxDim>& res, double eps) {
    return integrate(ScalarField::constant(chart, 1.0), QuadratureRule::for_chart(*chart, res, eps));
  };
  const auto s3 = make_ellipsoid_3d(1.0);
  const auto s2 = make_ellipsoid_2d(1.0);
  const double v3 = 2 * kPi * kPi, v2 = 4 * kPi;
  const double e3a = std::abs(volume(s3, {4, 4, 64}, 1e-2) - v3), e3b = std::abs(volume(s3, {4, 4, 64}, 1e-3) - v3);
  const double e2a = std::abs(volume(s2, {64, 4, 0}, 1e-2) - v2), e2b = std::abs(volume(s2, {64, 4, 0}, 1e-3) - v2);
  const double order3 = std::log10(e3a / e3b), order2 = std::log10(e2a / e2b);
  // Leading constants: 2 pi^2 (1 - cos 2 eps) ~ 4 pi^2 eps^2 and 4 pi (1 - cos eps) ~ 2 pi eps^2.
  const double c3 = e3b / 1e-6 / (4 * kPi * kPi), c2 = e2b / 1e-6 / (2 * kPi);
  const bool ok = std::abs(order3 - 2.0) <= 0.05 && std::abs(order2 - 2.0) <= 0.05 && std::abs(c3 - 1.0) <= 1e-3 &&
                  std::abs(c2 - 1.0) <= 1e-3;
  return {ok, fmt("observed order S3 %.4f, S2 %.4f (expect 2); ", order3, order2) +
                  fmt("error / leading term at eps=1e-3: %.6f, %.6f", c3, c2)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Christoffel closed forms", christoffel_identities},
      {2, "Killing suite", killing_suite},
      {3, "Killing norm law", norm_law},
      {4, "three-formula agreement", formula_agreement},
      {5, "certification", certification},
      {6, "sign structure", sign_structure},
      {7, "trivial identities", trivial_identities},
      {8, "intrinsic sign identity", intrinsic_sign_identity},
      {9, "scaling invariance", scaling_invariance},
      {10, "volume convergence", volumes},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %-26s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.measured.c_str(),
                secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n", int(criteria.size()) - failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
