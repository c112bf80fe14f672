#include "mcurv/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mcurv/errors.hpp"
#include "mcurv/geometry.hpp"
#include "mcurv/version.hpp"

namespace mcurv {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

const Interval* interval_containing(const std::vector<Interval>& ivs, double x) {
  for (const auto& iv : ivs)
    if (iv.contains(x)) return &iv;
  return nullptr;
}

}  // namespace

PerturbationField rotational_bump(const ChartPtr& chart, const std::array<int, kMaxDim>& c,
                                  const BumpProfile& bump, bool weighted) {
  const int s_axis = chart->profile_axis();
  if (s_axis < 0) throw CapabilityError("rotational bump needs a chart with a bounded profile axis");
  if (c[s_axis] != 0) throw ArgumentError("transverse angle cannot involve the profile axis");
  double norm2 = 0.0;
  for (int i = 0; i < chart->dim(); ++i) norm2 += double(c[i]) * c[i];
  if (norm2 == 0.0) throw ArgumentError("transverse angle coefficients must not all vanish");
  if (!(bump.radius > 0.0)) throw ArgumentError("bump radius must be positive");
  if (!(bump.t_half_width > 0.0 && bump.t_half_width < kPi))
    throw ArgumentError("bump t_half_width must lie in (0, pi)");
  if (!std::isfinite(bump.amplitude)) throw ArgumentError("bump amplitude must be finite");

  const int dim = chart->dim();
  const double lambda = bump.lambda();
  const double r2 = bump.radius * bump.radius;
  auto eval = [chart, c, bump, weighted, s_axis, dim, lambda, r2, norm2](const Point& x) {
    const JetPoint xs = seed(x);
    Jet t;
    for (int i = 0; i < dim; ++i)
      if (c[i] != 0) t += double(c[i]) * xs[i];
    // Shift t - t0 into (-pi, pi]; the shift is constant so derivatives are unchanged.
    const double raw = t.v - bump.t0;
    const Jet dt = t - (bump.t0 + (raw - std::remainder(raw, 2.0 * kPi)));
    const Jet ds = xs[s_axis] - bump.chi0;
    const Jet q = (square(lambda * dt) + square(ds)) / r2;
    VecJet Y{};
    if (q.v >= 1.0 || bump.amplitude == 0.0) return Y;
    const Jet rho = bump.amplitude * mollifier_of_square(q);
    Jet yt = rho * ds / lambda;
    Jet ys = -lambda * (rho * dt);
    if (weighted) {
      const Jet inv_h = reciprocal(chart->volume_density_jet(x));
      yt = yt * inv_h;
      ys = ys * inv_h;
    }
    for (int i = 0; i < dim; ++i)
      if (c[i] != 0) Y[i] = (double(c[i]) / norm2) * yt;
    Y[s_axis] = ys;
    return Y;
  };
  PerturbationField pf;
  pf.Y = VectorField(chart, 2, eval);
  pf.H = ScalarField(chart, 2, [chart](const Point& x) { return chart->volume_density_jet(x); });
  pf.bump = bump;
  pf.t_coefficients = c;
  pf.profile_axis = s_axis;
  pf.weighted = weighted;
  return pf;
}

VectorField planar_rotational_bump(const ChartPtr& chart, double x0, double y0, double radius) {
  if (chart->dim() < 2) throw ArgumentError("planar bump needs at least two coordinates");
  if (!(radius > 0.0)) throw ArgumentError("bump radius must be positive");
  return VectorField(chart, 2, [x0, y0, radius](const Point& p) {
    const JetPoint xs = seed(p);
    const Jet dx = xs[0] - x0, dy = xs[1] - y0;
    const Jet q = (square(dx) + square(dy)) / (radius * radius);
    VecJet Y{};
    if (q.v >= 1.0) return Y;
    const Jet rho = mollifier_of_square(q);
    Y[0] = rho * dy;
    Y[1] = -(rho * dx);
    return Y;
  });
}

PerturbationField build_commuting_bump(const ZonalFlow& z, const BumpProfile& bump, double collar,
                                       const std::optional<std::vector<Interval>>& u_plus) {
  const ChartPtr& chart = z.chart;
  if (chart->kind() != "ellipsoid3d")
    throw CapabilityError("commuting bumps are built on the 3D ellipsoid only");
  if (chart->param("a") == 1.0) throw CapabilityError("commuting bump undefined at a=1");
  if (!z.direction.integer)
    throw CapabilityError("commuting bump needs an integer direction (p, q); q/p is irrational");
  const auto [p, q] = z.direction.reduced();

  const int s_axis = chart->profile_axis();
  const auto [lo, hi] = chart->trimmed_bounds(s_axis, collar);
  const Interval supp = bump.chi_support();
  const double chart_margin = std::min(supp.lo - lo, hi - supp.hi);
  if (!(chart_margin > 0.0))
    throw ConstructionError("bump support [" + fmt(supp.lo) + ", " + fmt(supp.hi) +
                            "] exits the trimmed chi-interval [" + fmt(lo) + ", " + fmt(hi) +
                            "]: chart margin " + fmt(chart_margin));
  const std::vector<Interval> ivs = u_plus ? *u_plus : positive_region(z, 4000, collar);
  const Interval* iv = interval_containing(ivs, bump.chi0);
  const double margin = iv ? std::min(supp.lo - iv->lo, iv->hi - supp.hi) : -1.0;
  if (!(margin > 0.0))
    throw ConstructionError("bump support [" + fmt(supp.lo) + ", " + fmt(supp.hi) +
                            "] is not inside U+: U+ margin " + fmt(margin));
  const std::array<int, kMaxDim> c = {static_cast<int>(-q), static_cast<int>(p), 0};
  return rotational_bump(chart, c, bump, true);
}

ConditionReport condition_report(const VectorField& Y, const ZonalFlow& z,
                                 const std::optional<Interval>& declared_support, double collar) {
  const ChartPtr& chart = z.chart;
  if (Y.chart() != chart) throw ArgumentError("Y and the zonal flow live on different charts");
  const int dim = chart->dim();
  const int s_axis = z.profile_axis >= 0 ? z.profile_axis : chart->profile_axis();
  std::array<int, kMaxDim> n{};
  for (int i = 0; i < dim; ++i) n[i] = chart->axis(i).periodic ? 24 : 96;

  ConditionReport rep;
  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  int support_samples = 0;
  for (const Point& x : sample_grid(*chart, n, collar)) {
    const MatJet g = chart->metric_jet(x);
    const VecJet Yj = Y.jet(x);
    const Jet logd = log(sqrt(det_jet(g, dim)));
    rep.divergence = std::max(rep.divergence, std::abs(pointwise::divergence(Yj, logd, dim).v));
    const VecJet Xj = z.X.jet(x);
    const VecJet XY = pointwise::bracket(Xj, Yj, dim);
    rep.commutator =
        std::max(rep.commutator, std::sqrt(std::max(pointwise::inner_value(g, XY, XY, dim), 0.0)));
    bool supported = false;
    for (int i = 0; i < dim; ++i) supported = supported || Yj[i].v != 0.0;
    if (!supported) continue;
    ++support_samples;
    if (s_axis >= 0) {
      smin = std::min(smin, x[s_axis]);
      smax = std::max(smax, x[s_axis]);
    }
    if (sgn_Z(z, x) != 1) ++rep.support_violations;
    const Jet h = pointwise::inner(g, Xj, Xj, dim);
    rep.max_y_h = std::max(rep.max_y_h, std::abs(pointwise::apply(Yj, h, dim).v));
  }

  const std::vector<Interval> ivs = positive_region(z, 4000, collar);
  Interval supp{smin, smax};
  if (declared_support) supp = *declared_support;
  if (support_samples == 0 && !declared_support) {
    rep.support_margin = 0.0;
  } else {
    const Interval* iv = interval_containing(ivs, 0.5 * (supp.lo + supp.hi));
    rep.support_margin = iv ? std::min(supp.lo - iv->lo, iv->hi - supp.hi) : -1.0;
  }
  rep.support_in_u_plus = rep.support_violations == 0 && rep.support_margin > 0.0;
  return rep;
}

nlohmann::json ConditionReport::to_json() const {
  return {{"a_divergence", divergence},
          {"b_commutator", commutator},
          {"c_support_in_u_plus", support_in_u_plus},
          {"c_support_margin", support_margin},
          {"c_support_violations", support_violations},
          {"d_max_y_of_norm", max_y_h}};
}

nlohmann::json bump_to_json(const BumpProfile& b) {
  return {{"t0", b.t0},
          {"chi0", b.chi0},
          {"radius", b.radius},
          {"amplitude", b.amplitude},
          {"t_half_width", b.t_half_width}};
}

BumpProfile bump_from_json(const nlohmann::json& j) {
  BumpProfile b;
  b.t0 = j.at("t0").get<double>();
  b.chi0 = j.at("chi0").get<double>();
  b.radius = j.at("radius").get<double>();
  b.amplitude = j.at("amplitude").get<double>();
  b.t_half_width = j.at("t_half_width").get<double>();
  return b;
}

nlohmann::json Certificate::to_json() const {
  nlohmann::json j;
  j["schema"] = "mcurv.certificate";
  j["schema_version"] = kCertificateSchemaVersion;
  j["tool_version"] = kVersion;
  j["verdict"] = verdict;
  j["bump"] = bump_to_json(bump);
  j["t_coefficients"] = t_coefficients;
  j["conditions"] = conditions.to_json();
  j["mc_report"] = report.to_json();
  j["search"] = {{"evaluations", trace.evaluations},
                 {"iterations", trace.iterations},
                 {"converged", trace.converged},
                 {"best_objective", trace.best_objective}};
  j["classification"] = classification.to_json();
  j["scenario"] = scenario;
  return j;
}

namespace {

ClassificationReport check_certify_preconditions(const ZonalFlow& z, double collar) {
  if (z.chart->kind() != "ellipsoid3d")
    throw CapabilityError("certification is implemented on the 3D ellipsoid only");
  ClassificationReport cls = classify(z);
  if (cls.is_zonal != Tri::Yes)
    throw PreconditionError("flow is not zonal (" + to_string(cls.is_zonal) + ")",
                            std::max(cls.xf_residual, cls.collinearity_residual));
  if (cls.is_geodesic.value_or(true))
    throw PreconditionError("flow is geodesic (||X|| constant); certification needs a non-geodesic flow",
                            cls.norm_spread);
  if (!cls.is_s1.value_or(false))
    throw PreconditionError("flow is not S1-zonal: " + cls.s1_witness);
  if (!cls.is_positive.value_or(false)) throw PreconditionError("flow is not positive: U+ is empty");
  if (!z.profile) throw PreconditionError("certification needs a one-variable profile f(chi)");
  // supp f must stay inside the trimmed chart.
  const double edge = 0.5 * kPi;
  for (int k = 0; k <= 64; ++k) {
    for (double x : {collar * k / 64.0, edge - collar * k / 64.0}) {
      if (x <= 0.0 || x >= edge) continue;
      const Jet f = (*z.profile)(Jet::variable(x, 0));
      if (f.v != 0.0 || f.d[0] != 0.0 || f.h[0][0] != 0.0)
        throw PreconditionError("supp f reaches the excluded collar at chi = " + fmt(x), std::abs(f.v));
    }
  }
  return cls;
}

Certificate certify_with(const ZonalFlow& z, const BumpProfile& bump, const SearchOptions& opt,
                         const ClassificationReport& cls) {
  const PerturbationField pf = build_commuting_bump(z, bump, opt.collar, cls.u_plus);
  const QuadratureRule rule = QuadratureRule::for_chart(*z.chart, opt.resolution, opt.collar);
  Certificate cert;
  cert.bump = bump;
  cert.t_coefficients = pf.t_coefficients;
  cert.classification = cls;
  cert.conditions = condition_report(pf.Y, z, bump.chi_support(), opt.collar);
  cert.report = evaluate_mc(z.Z(), pf.Y, &z, rule);
  cert.verdict = cert.report.verdict == McVerdict::Positive && cert.conditions.holds() ? "positive"
                                                                                       : "indeterminate";
  return cert;
}

}  // namespace

Certificate certify_bump(const ZonalFlow& z, const BumpProfile& bump, const SearchOptions& opt) {
  const ClassificationReport cls = check_certify_preconditions(z, opt.collar);
  Certificate cert = certify_with(z, bump, opt, cls);
  cert.trace.best_objective = cert.report.mc_commuting.value_or(cert.report.mc_direct);
  return cert;
}

Certificate certify_positive(const ZonalFlow& z, const SearchOptions& opt) {
  if (opt.budget < 1) throw ArgumentError("search budget must be positive");
  const ClassificationReport cls = check_certify_preconditions(z, opt.collar);
  const auto [tlo, thi] = z.chart->trimmed_bounds(z.chart->profile_axis(), opt.collar);
  const Interval* widest = nullptr;
  for (const auto& iv : cls.u_plus)
    if (!widest || iv.width() > widest->width()) widest = &iv;
  const double lo = std::max(widest->lo, tlo) + opt.min_margin;
  const double hi = std::min(widest->hi, thi) - opt.min_margin;
  if (!(hi > lo))
    throw PreconditionError("U+ interval [" + fmt(widest->lo) + ", " + fmt(widest->hi) +
                            "] is too narrow for the support margin " + fmt(opt.min_margin));
  const double span = hi - lo;

  // Parameters: chi0, radius, amplitude.
  using Params = std::array<double, 3>;
  auto project = [&](Params x) {
    x[2] = std::clamp(x[2], 1e-6, 1.0);
    x[1] = std::clamp(x[1], 1e-4 * span, 0.5 * span);
    x[0] = std::clamp(x[0], lo + x[1], hi - x[1]);
    return x;
  };
  auto to_bump = [&](const Params& x) {
    BumpProfile b;
    b.chi0 = x[0];
    b.radius = x[1];
    b.amplitude = x[2];
    b.t_half_width = opt.t_half_width;
    return b;
  };
  const QuadratureRule rule = QuadratureRule::for_chart(*z.chart, opt.resolution, opt.collar);
  SearchTrace trace;
  auto objective = [&](const Params& x) {
    ++trace.evaluations;
    const PerturbationField pf = build_commuting_bump(z, to_bump(x), opt.collar, cls.u_plus);
    return mc_commuting(z, pf.Y, rule);
  };

  Params x;
  if (opt.initial) {
    x = {opt.initial->chi0, opt.initial->radius, opt.initial->amplitude};
  } else {
    x = {0.5 * (lo + hi), 0.25 * span, 0.5};
  }
  x = project(x);
  double best = objective(x);
  Params step = {0.1 * span, 0.1 * span, 0.25};
  const Params scale = {span, span, 1.0};
  std::mt19937_64 rng(opt.seed);
  std::array<int, 6> order = {0, 1, 2, 3, 4, 5};

  while (trace.evaluations < opt.budget) {
    bool small = true;
    for (int i = 0; i < 3; ++i) small = small && step[i] < opt.step_tolerance * scale[i];
    if (small) {
      trace.converged = true;
      break;
    }
    ++trace.iterations;
    std::shuffle(order.begin(), order.end(), rng);
    bool improved = false;
    for (int k : order) {
      if (trace.evaluations >= opt.budget) break;
      Params cand = x;
      cand[k / 2] += (k % 2 == 0 ? 1.0 : -1.0) * step[k / 2];
      cand = project(cand);
      if (cand == x) continue;
      const double v = objective(cand);
      if (v > best) {
        best = v;
        x = cand;
        improved = true;
        break;
      }
    }
    if (!improved)
      for (double& s : step) s *= 0.5;
  }
  trace.best_objective = best;

  Certificate cert = certify_with(z, to_bump(x), opt, cls);
  cert.trace = trace;
  return cert;
}

}  // namespace mcurv
