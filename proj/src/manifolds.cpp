#include "mcurv/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcurv/errors.hpp"

namespace mcurv {

namespace {

constexpr double kPi = std::numbers::pi;

// 20-point Gauss-Legendre on [-1, 1], positive half.
constexpr std::array<double, 10> kGlX = {
    0.0765265211334973337546404, 0.2277858511416450780804962, 0.3737060887154195606725482,
    0.5108670019508270980043641, 0.6360536807265150254528367, 0.7463319064601507926143051,
    0.8391169718222188233945291, 0.9122344282513259058677524, 0.9639719272779137912676661,
    0.9931285991850949247861224};
constexpr std::array<double, 10> kGlW = {
    0.1527533871307258506980843, 0.1491729864726037467878287, 0.1420961093183820513292983,
    0.1316886384491766268984945, 0.1181945319615184173123774, 0.1019301198172404350367501,
    0.0832767415767047487247581, 0.0626720483341090635695065, 0.0406014298003869413310400,
    0.0176140071391521183118620};

}  // namespace

ArclengthProfile::ArclengthProfile(double a, int resolution) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("aspect ratio a must be positive");
  if (resolution < 2) throw ArgumentError("profile_resolution must be at least 2");
  phi_nodes_.resize(resolution + 1);
  r_nodes_.resize(resolution + 1);
  r_nodes_[0] = 0.0;
  for (int k = 0; k <= resolution; ++k) phi_nodes_[k] = 0.5 * kPi * k / resolution;
  for (int k = 1; k <= resolution; ++k)
    r_nodes_[k] = r_nodes_[k - 1] + panel_integral(phi_nodes_[k - 1], phi_nodes_[k]);
  d_ = r_nodes_.back();
}

double ArclengthProfile::speed(double phi) const {
  const double s = std::sin(phi), c = std::cos(phi);
  return std::sqrt(a_ * a_ * s * s + c * c);
}

double ArclengthProfile::panel_integral(double lo, double hi) const {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (size_t i = 0; i < kGlX.size(); ++i)
    s += kGlW[i] * (speed(mid - half * kGlX[i]) + speed(mid + half * kGlX[i]));
  return half * s;
}

double ArclengthProfile::arclength(double phi) const {
  const double sign = phi < 0.0 ? -1.0 : 1.0;
  const double x = std::abs(phi);
  if (x > 0.5 * kPi) throw DomainError("arclength: phi outside [-pi/2, pi/2]");
  const int n = static_cast<int>(phi_nodes_.size()) - 1;
  const int k = std::min(n - 1, static_cast<int>(x / (0.5 * kPi) * n));
  return sign * (r_nodes_[k] + panel_integral(phi_nodes_[k], x));
}

double ArclengthProfile::phi(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  const double x = std::abs(r);
  if (!(x < d_)) throw DomainError("profile: r outside (-d, d)");
  const auto it = std::upper_bound(r_nodes_.begin(), r_nodes_.end(), x);
  const int k = std::clamp(static_cast<int>(it - r_nodes_.begin()) - 1, 0,
                           static_cast<int>(r_nodes_.size()) - 2);
  // Cubic Hermite guess using dphi/dr = 1/speed at the panel ends.
  const double r0 = r_nodes_[k], r1 = r_nodes_[k + 1];
  const double p0 = phi_nodes_[k], p1 = phi_nodes_[k + 1];
  const double hr = r1 - r0, u = (x - r0) / hr;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  double ph = h00 * p0 + h10 * hr / speed(p0) + h01 * p1 + h11 * hr / speed(p1);
  for (int it2 = 0; it2 < 4; ++it2) {
    const double resid = r0 + panel_integral(p0, ph) - x;
    const double step = resid / speed(ph);
    ph -= step;
    if (std::abs(step) < 1e-16) break;
  }
  return sign * ph;
}

Jet ArclengthProfile::phi(const Jet& r) const {
  const double ph = phi(r.v);
  const double s = speed(ph);
  const double ds = (a_ * a_ - 1.0) * std::sin(ph) * std::cos(ph) / s;
  return chain(r, ph, 1.0 / s, -ds / (s * s * s));
}

Jet ArclengthProfile::c1(const Jet& r) const { return a_ * cos(phi(r)); }
Jet ArclengthProfile::c2(const Jet& r) const { return sin(phi(r)); }

namespace {

// Chart subclass that exposes its arclength profile to arclength_profile().
class ProfileChart : public Chart {
 public:
  ProfileChart(std::shared_ptr<const ArclengthProfile> profile, std::vector<Axis> axes,
               MetricExpr metric, ClosedChristoffel closed, std::map<std::string, double> params)
      : Chart("ellipsoid2d", std::move(axes), std::move(metric), std::move(closed),
              std::move(params)),
        profile_(std::move(profile)) {}
  std::shared_ptr<const ArclengthProfile> profile() const { return profile_; }

 private:
  std::shared_ptr<const ArclengthProfile> profile_;
};

ChartPtr make_surface_of_revolution(const std::string& kind, double d,
                                    std::function<Jet(const Jet&)> c1,
                                    std::shared_ptr<const ArclengthProfile> profile,
                                    std::map<std::string, double> params) {
  std::vector<Axis> axes = {{"r", -d, d, false}, {"theta", -kPi, kPi, true}};
  Chart::MetricExpr metric = [c1](const JetPoint& x) {
    MatJet g{};
    g[0][0] = Jet::constant(1.0);
    g[1][1] = square(c1(x[0]));
    return g;
  };
  Chart::ClosedChristoffel closed = [c1](const Point& x) {
    const Jet c = c1(Jet::variable(x[0], 0));
    ChristoffelValues gamma{};
    gamma[0][1][1] = -c.v * c.d[0];
    gamma[1][0][1] = gamma[1][1][0] = c.d[0] / c.v;
    return gamma;
  };
  if (profile)
    return std::make_shared<ProfileChart>(std::move(profile), std::move(axes), std::move(metric),
                                          std::move(closed), std::move(params));
  return std::make_shared<Chart>(kind, std::move(axes), std::move(metric), std::move(closed),
                                 std::move(params));
}

}  // namespace

ChartPtr make_ellipsoid_2d(double a, int profile_resolution) {
  auto profile = std::make_shared<const ArclengthProfile>(a, profile_resolution);
  const double d = profile->half_length();
  auto c1 = [profile](const Jet& r) { return profile->c1(r); };
  return make_surface_of_revolution("ellipsoid2d", d, c1, profile,
                                    {{"a", a}, {"d", d}, {"profile_resolution", profile_resolution}});
}

ChartPtr make_sphere2() {
  auto c1 = [](const Jet& r) { return cos(r); };
  return make_surface_of_revolution("sphere2", 0.5 * kPi, c1, nullptr,
                                    {{"a", 1.0}, {"d", 0.5 * kPi}});
}

std::shared_ptr<const ArclengthProfile> arclength_profile(const Chart& chart) {
  if (const auto* pc = dynamic_cast<const ProfileChart*>(&chart)) return pc->profile();
  return nullptr;
}

ChartPtr make_ellipsoid_3d(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ArgumentError("aspect ratio a must be positive");
  const double a2 = a * a;
  std::vector<Axis> axes = {
      {"xi", -kPi, kPi, true}, {"mu", -kPi, kPi, true}, {"chi", 0.0, 0.5 * kPi, false}};
  Chart::MetricExpr metric = [a2](const JetPoint& x) {
    const Jet s = sin(x[2]), c = cos(x[2]);
    MatJet g{};
    g[0][0] = a2 * s * s;
    g[1][1] = c * c;
    g[2][2] = a2 * c * c + s * s;
    return g;
  };
  Chart::ClosedChristoffel closed = [a2](const Point& x) {
    const double s = std::sin(x[2]), c = std::cos(x[2]);
    const double dd = a2 * c * c + s * s;
    ChristoffelValues gamma{};
    gamma[0][0][2] = gamma[0][2][0] = c / s;
    gamma[1][1][2] = gamma[1][2][1] = -s / c;
    gamma[2][0][0] = -a2 * s * c / dd;
    gamma[2][1][1] = s * c / dd;
    gamma[2][2][2] = (1.0 - a2) * s * c / dd;
    return gamma;
  };
  return std::make_shared<Chart>("ellipsoid3d", std::move(axes), std::move(metric),
                                 std::move(closed), std::map<std::string, double>{{"a", a}});
}

ChartPtr make_flat_torus(int dim) {
  if (dim < 1 || dim > kMaxDim) throw ArgumentError("flat torus dimension must be 1, 2 or 3");
  std::vector<Axis> axes;
  for (int i = 0; i < dim; ++i) axes.push_back({"x" + std::to_string(i + 1), -kPi, kPi, true});
  Chart::MetricExpr metric = [dim](const JetPoint&) {
    MatJet g{};
    for (int i = 0; i < dim; ++i) g[i][i] = Jet::constant(1.0);
    return g;
  };
  Chart::ClosedChristoffel closed = [](const Point&) { return ChristoffelValues{}; };
  return std::make_shared<Chart>("flat_torus", std::move(axes), std::move(metric),
                                 std::move(closed), std::map<std::string, double>{{"a", 1.0}});
}

KillingBasis killing_basis(const ChartPtr& chart) {
  const std::string& kind = chart->kind();
  KillingBasis basis;
  if (kind == "ellipsoid2d" || kind == "sphere2") {
    basis.fields.push_back(VectorField::coordinate(chart, {0.0, 1.0, 0.0}));
    basis.complete = chart->param("a") != 1.0;
  } else if (kind == "ellipsoid3d") {
    basis.fields.push_back(VectorField::coordinate(chart, {1.0, 0.0, 0.0}));
    basis.fields.push_back(VectorField::coordinate(chart, {0.0, 1.0, 0.0}));
    basis.complete = chart->param("a") != 1.0;
  } else if (kind == "flat_torus") {
    for (int i = 0; i < chart->dim(); ++i) {
      Point c{};
      c[i] = 1.0;
      basis.fields.push_back(VectorField::coordinate(chart, c));
    }
  } else {
    throw CapabilityError("no built-in Killing algebra for chart '" + kind + "'");
  }
  return basis;
}

VectorField killing_combination(const ChartPtr& chart, double p, double q) {
  if (chart->kind() != "ellipsoid3d" && !(chart->kind() == "flat_torus" && chart->dim() >= 2))
    throw CapabilityError("p d_1 + q d_2 is only a built-in Killing field on ellipsoid3d and "
                          "flat tori of dimension >= 2");
  return VectorField::coordinate(chart, {p, q, 0.0});
}

VectorField zonal_killing_field(const ChartPtr& chart, double p, double q) {
  const std::string& kind = chart->kind();
  if (kind == "ellipsoid2d" || kind == "sphere2")
    return VectorField::coordinate(chart, {0.0, 1.0, 0.0});
  if (kind == "flat_torus" && chart->dim() == 1)
    return VectorField::coordinate(chart, {1.0, 0.0, 0.0});
  return killing_combination(chart, p, q);
}

}  // namespace mcurv
