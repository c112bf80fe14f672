#include "mcurv/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mcurv/errors.hpp"
#include "mcurv/geometry.hpp"
#include "mcurv/manifolds.hpp"

namespace mcurv {

namespace {

constexpr unsigned long long kSampleSeed = 0x5eed2017ULL;

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

struct PointData {
  MatJet g;
  MatJet ginv;
  VecJet X;
  Jet f;
  Jet h;
};

PointData eval_point(const ZonalFlow& z, const Point& x) {
  PointData d;
  const int dim = z.chart->dim();
  d.g = z.chart->metric_jet(x);
  d.ginv = inverse_jet(d.g, dim);
  d.X = z.X.jet(x);
  d.f = z.f.jet(x);
  d.h = pointwise::inner(d.g, d.X, d.X, dim);
  return d;
}

// g^{ij} d_i a d_j b as a jet one order below the inputs.
Jet cometric(const MatJet& ginv, const Jet& a, const Jet& b, int dim) {
  Jet s;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += ginv[i][j] * partial(a, i) * partial(b, j);
  return s;
}

}  // namespace

std::pair<long long, long long> Direction::reduced() const {
  if (!integer) throw ArgumentError("direction (p, q) is not declared integral");
  if (p != std::round(p) || q != std::round(q) || std::abs(p) > 1e15 || std::abs(q) > 1e15)
    throw ArgumentError("integer direction needs integral p and q");
  const long long ip = std::llround(p), iq = std::llround(q);
  if (ip == 0 && iq == 0) throw ArgumentError("direction (p, q) must be nonzero");
  const long long g = std::gcd(std::llabs(ip), std::llabs(iq));
  return {ip / g, iq / g};
}

ZonalFlow make_zonal_flow(const ChartPtr& chart, const Profile& profile,
                          const Direction& direction) {
  const int axis = chart->profile_axis();
  if (axis < 0) throw CapabilityError("chart '" + chart->kind() + "' has no profile axis");
  ZonalFlow z;
  z.chart = chart;
  z.X = zonal_killing_field(chart, direction.p, direction.q);
  z.f = profile_field(chart, profile, axis);
  z.profile = profile;
  z.profile_axis = axis;
  z.direction = direction;
  return z;
}

std::string to_string(Tri t) {
  switch (t) {
    case Tri::Yes:
      return "yes";
    case Tri::No:
      return "no";
    default:
      return "indeterminate";
  }
}

std::vector<Point> zonal_samples(const Chart& chart, double collar) {
  const int n = chart.dim() == 3 ? 10 : 24;
  std::vector<Point> pts = sample_grid(chart, n, collar);
  const auto extra = sample_random(chart, 200, kSampleSeed, collar);
  pts.insert(pts.end(), extra.begin(), extra.end());
  return pts;
}

Jet F_jet(const ZonalFlow& z, const Point& x, double grad_floor) {
  const int dim = z.chart->dim();
  const PointData d = eval_point(z, x);
  const Jet f2 = square(d.f);
  const Jet den = cometric(d.ginv, d.h, d.h, dim);
  if (!(std::sqrt(std::max(den.v, 0.0)) >= grad_floor))
    throw DomainError("F undefined: grad ||X||^2 vanishes at this point");
  return cometric(d.ginv, f2, d.h, dim) / den;
}

ScalarField extract_F(const ZonalFlow& z, double grad_floor) {
  bool any = false;
  for (const Point& x : zonal_samples(*z.chart)) {
    const PointData d = eval_point(z, x);
    const Jet den = cometric(d.ginv, d.h, d.h, z.chart->dim());
    if (std::sqrt(std::max(den.v, 0.0)) >= grad_floor) {
      any = true;
      break;
    }
  }
  if (!any) throw DomainError("F undefined: U0 is empty (grad ||X||^2 vanishes on all samples)");
  return ScalarField(z.chart, 1, [z, grad_floor](const Point& x) { return F_jet(z, x, grad_floor); });
}

int sgn_Z(const ZonalFlow& z, const Point& x, double grad_floor) {
  const int dim = z.chart->dim();
  const PointData d = eval_point(z, x);
  const Jet den = cometric(d.ginv, d.h, d.h, dim);
  if (!(std::sqrt(std::max(den.v, 0.0)) >= grad_floor)) return 0;
  const double F = cometric(d.ginv, square(d.f), d.h, dim).v / den.v;
  return (F > 0.0) - (F < 0.0);
}

IntrinsicSign intrinsic_sign(const ZonalFlow& z, const Point& x) {
  const int dim = z.chart->dim();
  const PointData d = eval_point(z, x);
  VecJet Zj{};
  for (int i = 0; i < dim; ++i) Zj[i] = d.f * d.X[i];
  const Jet nz2 = pointwise::inner(d.g, Zj, Zj, dim);
  const VecJet grad_nz2 = pointwise::gradient(d.ginv, nz2, dim);
  const VecJet nzz = pointwise::covariant(Zj, Zj, pointwise::christoffel(d.g, dim), dim);
  VecJet lhs_vec{}, twice{};
  for (int i = 0; i < dim; ++i) {
    twice[i] = Jet::constant(2.0 * nzz[i].v);
    lhs_vec[i] = Jet::constant(grad_nz2[i].v + 2.0 * nzz[i].v);
  }
  IntrinsicSign out;
  out.lhs = pointwise::inner_value(d.g, lhs_vec, twice, dim);
  const double grad_h2 = cometric(d.ginv, d.h, d.h, dim).v;
  const double F = grad_h2 > 0.0 ? cometric(d.ginv, square(d.f), d.h, dim).v / grad_h2 : 0.0;
  out.rhs = -F * d.f.v * d.f.v * d.h.v * grad_h2;
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.residual = scale > 1e-300 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  out.sign = (out.lhs < 0.0) - (out.lhs > 0.0);
  return out;
}

ClassificationReport check_zonal(const ScalarField& f, const VectorField& X,
                                 const ZonalThresholds& th) {
  if (f.chart() != X.chart()) throw ArgumentError("check_zonal: f and X live on different charts");
  f.require_order(2, "check_zonal");
  const ChartPtr chart = X.chart();
  const int dim = chart->dim();
  const std::vector<Point> samples = zonal_samples(*chart);

  ClassificationReport rep;
  rep.thresholds = th;
  rep.killing_residual = killing_residual(X, samples);
  if (rep.killing_residual > th.killing)
    throw PreconditionError("X is not a Killing field: residual " + sci(rep.killing_residual) +
                                " exceeds " + sci(th.killing),
                            rep.killing_residual);

  ZonalFlow z;
  z.chart = chart;
  z.X = X;
  z.f = f;
  for (const Point& x : samples) {
    const PointData d = eval_point(z, x);
    rep.xf_residual = std::max(rep.xf_residual, std::abs(pointwise::apply(d.X, d.f, dim).v));
    const Jet den = cometric(d.ginv, d.h, d.h, dim);
    if (!(std::sqrt(std::max(den.v, 0.0)) >= th.grad_floor)) continue;
    ++rep.u0_samples;
    const Jet f2 = square(d.f);
    const Jet F = cometric(d.ginv, f2, d.h, dim) / den;
    const VecJet gf2 = pointwise::gradient(d.ginv, f2, dim);
    const VecJet gh = pointwise::gradient(d.ginv, d.h, dim);
    VecJet diff{};
    for (int i = 0; i < dim; ++i) diff[i] = Jet::constant(gf2[i].v - F.v * gh[i].v);
    const double n2 = pointwise::inner_value(d.g, diff, diff, dim);
    rep.collinearity_residual = std::max(rep.collinearity_residual, std::sqrt(std::max(n2, 0.0)));
    double xF = 0.0;
    for (int i = 0; i < dim; ++i) xF += d.X[i].v * F.d[i];
    rep.xF_residual = std::max(rep.xF_residual, std::abs(xF));
  }

  const double worst = std::max({rep.xf_residual, rep.collinearity_residual, rep.xF_residual});
  if (worst <= th.accept)
    rep.is_zonal = Tri::Yes;
  else if (worst >= th.reject)
    rep.is_zonal = Tri::No;
  else
    rep.is_zonal = Tri::Indeterminate;
  if (rep.xf_residual > th.accept)
    rep.rejects.push_back("X(f) residual " + sci(rep.xf_residual) + " (divergence-free condition)");
  if (rep.collinearity_residual > th.accept)
    rep.rejects.push_back("grad f^2 not collinear with grad ||X||^2: residual " +
                          sci(rep.collinearity_residual));
  if (rep.xF_residual > th.accept) rep.rejects.push_back("X(F) residual " + sci(rep.xF_residual));
  return rep;
}

std::vector<Interval> positive_region(const ZonalFlow& z, int scan_points, double collar) {
  const int axis = z.profile_axis >= 0 ? z.profile_axis : z.chart->profile_axis();
  if (axis < 0) return {};
  if (scan_points < 2) throw ArgumentError("positive_region needs at least two scan points");
  const auto [lo, hi] = z.chart->trimmed_bounds(axis, collar);
  Point base{};
  auto at = [&](double s) {
    Point p = base;
    p[axis] = s;
    return p;
  };
  auto positive = [&](double s) { return sgn_Z(z, at(s)) > 0; };
  // Bisection between an outside point and an inside point.
  auto edge = [&](double outside, double inside) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (outside + inside);
      (positive(mid) ? inside : outside) = mid;
    }
    return inside;
  };
  std::vector<double> s(scan_points);
  std::vector<char> pos(scan_points);
  for (int k = 0; k < scan_points; ++k) {
    s[k] = lo + (hi - lo) * k / (scan_points - 1);
    pos[k] = positive(s[k]);
  }
  std::vector<Interval> out;
  for (int k = 0; k < scan_points;) {
    if (!pos[k]) {
      ++k;
      continue;
    }
    int e = k;
    while (e + 1 < scan_points && pos[e + 1]) ++e;
    Interval iv;
    iv.lo = k == 0 ? lo : edge(s[k - 1], s[k]);
    iv.hi = e == scan_points - 1 ? hi : edge(s[e + 1], s[e]);
    out.push_back(iv);
    k = e + 1;
  }
  return out;
}

GeodesicTest geodesic_test(const ZonalFlow& z, double tolerance) {
  const int dim = z.chart->dim();
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
  GeodesicTest out;
  for (const Point& x : zonal_samples(*z.chart)) {
    const MatJet g = z.chart->metric_jet(x);
    const VecJet X = z.X.jet(x);
    const double h = pointwise::inner_value(g, X, X, dim);
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
    const VecJet nxx = pointwise::covariant(X, X, pointwise::christoffel(g, dim), dim);
    out.max_nabla_xx =
        std::max(out.max_nabla_xx, std::sqrt(std::max(pointwise::inner_value(g, nxx, nxx, dim), 0.0)));
  }
  out.norm_spread = hmax - hmin;
  const double scale = std::max(1.0, std::abs(hmax));
  const bool constant_norm = out.norm_spread <= tolerance * scale;
  const bool zero_accel = out.max_nabla_xx <= tolerance * scale;
  out.geodesic = constant_norm;
  out.consistent = constant_norm == zero_accel;
  return out;
}

ClassificationReport classify(const ZonalFlow& z, const ZonalThresholds& th) {
  const std::string& kind = z.chart->kind();
  if (kind == "ellipsoid3d" && z.chart->param("a") == 1.0)
    throw CapabilityError("classification undefined at a=1: the 3-sphere has a larger isometry "
                          "algebra than span{d_xi, d_mu}");
  ClassificationReport rep = check_zonal(z.f, z.X, th);

  const GeodesicTest geo = geodesic_test(z);
  rep.is_geodesic = geo.geodesic;
  rep.norm_spread = geo.norm_spread;
  rep.max_nabla_xx = geo.max_nabla_xx;
  rep.geodesic_cross_check = geo.consistent;
  if (!geo.consistent)
    rep.rejects.push_back("geodesic test inconclusive: ||X|| spread and ||nabla_X X|| disagree");

  if (kind == "ellipsoid2d" || kind == "sphere2") {
    rep.is_s1 = true;
    rep.s1_witness = "d_theta generates the rotation circle action";
  } else if (!z.direction.integer) {
    rep.is_s1 = false;
    rep.s1_witness = "q/p declared irrational";
    rep.rejects.push_back("not S1-zonal: q/p irrational");
  } else {
    const auto [p, q] = z.direction.reduced();
    rep.is_s1 = true;
    rep.s1_witness = p == 0 ? "p = 0 (q/p = inf)"
                            : "q/p = " + std::to_string(q) + "/" + std::to_string(p);
  }

  rep.u_plus = positive_region(z);
  rep.is_positive = !rep.u_plus.empty();
  if (!rep.u_plus.empty()) {
    Point w{};
    w[z.profile_axis >= 0 ? z.profile_axis : z.chart->profile_axis()] =
        0.5 * (rep.u_plus.front().lo + rep.u_plus.front().hi);
    rep.positive_witness = w;
  } else {
    rep.rejects.push_back("not positive: U+ is empty");
  }
  if (*rep.is_geodesic) rep.rejects.push_back("geodesic: ||X|| is constant");
  return rep;
}

ClassificationReport classify_3d(const Direction& direction, double a, const Profile& profile,
                                 const ZonalThresholds& th) {
  if (!(a > 0.0)) throw ArgumentError("aspect ratio a must be positive");
  if (a == 1.0)
    throw CapabilityError("classification undefined at a=1: the 3-sphere has a larger isometry "
                          "algebra than span{d_xi, d_mu}");
  if (direction.p == 0.0 && direction.q == 0.0) throw ArgumentError("direction (p, q) must be nonzero");
  return classify(make_zonal_flow(make_ellipsoid_3d(a), profile, direction), th);
}

nlohmann::json ClassificationReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "mcurv.classification";
  j["schema_version"] = kClassificationSchemaVersion;
  j["verdicts"] = {{"zonal", to_string(is_zonal)}};
  if (is_geodesic) j["verdicts"]["geodesic"] = *is_geodesic;
  if (is_s1) j["verdicts"]["s1"] = *is_s1;
  if (is_positive) j["verdicts"]["positive"] = *is_positive;
  j["residuals"] = {{"killing", killing_residual},
                    {"x_of_f", xf_residual},
                    {"collinearity", collinearity_residual},
                    {"x_of_F", xF_residual},
                    {"norm_spread", norm_spread},
                    {"max_nabla_x_x", max_nabla_xx}};
  j["u0_samples"] = u0_samples;
  j["thresholds"] = {{"accept", thresholds.accept},
                     {"reject", thresholds.reject},
                     {"killing", thresholds.killing},
                     {"grad_floor", thresholds.grad_floor}};
  nlohmann::json w;
  w["s1"] = s1_witness;
  if (positive_witness) w["positive_point"] = *positive_witness;
  w["geodesic_cross_check"] = geodesic_cross_check;
  j["witnesses"] = w;
  nlohmann::json up = nlohmann::json::array();
  for (const auto& iv : u_plus) up.push_back({iv.lo, iv.hi});
  j["u_plus"] = up;
  j["rejects"] = rejects;
  return j;
}

}  // namespace mcurv
