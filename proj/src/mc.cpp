#include "mcurv/mc.hpp"

#include <cmath>
#include <sstream>

#include "mcurv/errors.hpp"
#include "mcurv/geometry.hpp"

namespace mcurv {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

struct PassFlags {
  bool direct = false;
  bool zonal = false;
  bool commuting = false;
};

// Output slots of the fused kernel.
enum Slot { kFirst, kSecond, kCross, kZonal, kCommuting, kDiv, kComm, kSlots };

const std::vector<Reduction>& slot_reductions() {
  static const std::vector<Reduction> r = {Reduction::Sum, Reduction::Sum,    Reduction::Sum,
                                           Reduction::Sum, Reduction::Sum,    Reduction::MaxAbs,
                                           Reduction::MaxAbs};
  return r;
}

Jet cometric(const MatJet& ginv, const Jet& a, const Jet& b, int dim) {
  Jet s;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += ginv[i][j] * partial(a, i) * partial(b, j);
  return s;
}

VecJet add(const VecJet& a, const VecJet& b) {
  VecJet r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = Jet::constant(a[i].v + b[i].v);
  return r;
}

void fused_kernel(const VectorField& Z, const VectorField& Y, const ZonalFlow* z,
                  const PassFlags& flags, double grad_floor, const Node& n, double* out) {
  const int dim = Y.dim();
  const VecJet Yj = Y.jet(n.x);
  const Jet logd = log(sqrt(det_jet(n.g, dim)));
  out[kDiv] = pointwise::divergence(Yj, logd, dim).v;

  if (flags.direct) {
    const VecJet Zj = Z.jet(n.x);
    const VecJet B = pointwise::bracket(Zj, Yj, dim);
    const VecJet BY = pointwise::bracket(B, Yj, dim);
    out[kFirst] = -pointwise::inner_value(n.g, B, B, dim);
    out[kSecond] = -pointwise::inner_value(n.g, Zj, BY, dim);
    const ChristoffelJet gamma = pointwise::christoffel(n.g, dim);
    const VecJet cross = add(pointwise::covariant(Zj, B, gamma, dim), pointwise::covariant(B, Zj, gamma, dim));
    out[kCross] = pointwise::inner_value(n.g, cross, Yj, dim);
  }
  if (!flags.zonal && !flags.commuting) return;

  const VecJet Xj = z->X.jet(n.x);
  const Jet f2 = square(z->f.jet(n.x));
  const VecJet XY = pointwise::bracket(Xj, Yj, dim);
  out[kComm] = std::sqrt(std::max(pointwise::inner_value(n.g, XY, XY, dim), 0.0));
  if (flags.zonal) {
    const VecJet XYY = pointwise::bracket(XY, Yj, dim);
    const Jet Yf2 = pointwise::apply(Yj, f2, dim);
    const double YYf2 = pointwise::apply(Yj, Yf2, dim).v;
    const double h = pointwise::inner_value(n.g, Xj, Xj, dim);
    out[kZonal] = -f2.v * pointwise::inner_value(n.g, XY, XY, dim) -
                  f2.v * pointwise::inner_value(n.g, Xj, XYY, dim) +
                  2.0 * Yf2.v * pointwise::inner_value(n.g, Xj, XY, dim) - 0.5 * YYf2 * h;
  }
  if (flags.commuting) {
    const MatJet ginv = inverse_jet(n.g, dim);
    const Jet h = pointwise::inner(n.g, Xj, Xj, dim);
    const double den = cometric(ginv, h, h, dim).v;
    if (std::sqrt(std::max(den, 0.0)) >= grad_floor) {
      const double F = cometric(ginv, f2, h, dim).v / den;
      const double Yh = pointwise::apply(Yj, h, dim).v;
      out[kCommuting] = 0.5 * F * Yh * Yh;
    }
  }
}

std::vector<double> run_pass(const VectorField& Z, const VectorField& Y, const ZonalFlow* z,
                             const PassFlags& flags, const QuadratureRule& rule, double grad_floor,
                             Execution exec) {
  if ((flags.zonal || flags.commuting) && z == nullptr)
    throw ArgumentError("zonal formulas need a zonal flow");
  const Chart& chart = Y.chart_ref();
  if (flags.direct) {
    Z.require_order(2, "mc_direct (Z)");
    if (Z.chart() != Y.chart()) throw ArgumentError("Z and Y live on different charts");
  }
  Y.require_order(2, "mc (Y)");
  if (z) {
    z->X.require_order(2, "mc (X)");
    z->f.require_order(2, "mc (f)");
    if (z->chart != Y.chart()) throw ArgumentError("zonal flow and Y live on different charts");
  }
  return integrate_many(
      chart, rule, slot_reductions(),
      [&](const Node& n, double* out) { fused_kernel(Z, Y, z, flags, grad_floor, n, out); }, exec);
}

nlohmann::json values_json(const FormulaValues& v) {
  nlohmann::json j = {{"direct", v.direct},
                      {"first_term", v.first_term},
                      {"second_term", v.second_term},
                      {"cross_form", v.cross_form},
                      {"max_divergence", v.max_divergence},
                      {"max_commutator", v.max_commutator}};
  j["zonal"] = v.zonal ? nlohmann::json(*v.zonal) : nlohmann::json();
  j["commuting"] = v.commuting ? nlohmann::json(*v.commuting) : nlohmann::json();
  return j;
}

}  // namespace

DirectResult mc_direct_detail(const VectorField& Z, const VectorField& Y, const QuadratureRule& rule,
                              const McTolerances& tol, Execution exec) {
  const auto s = run_pass(Z, Y, nullptr, {true, false, false}, rule, tol.grad_floor, exec);
  DirectResult r;
  r.first_term = s[kFirst];
  r.second_term = s[kSecond];
  r.value = r.first_term + r.second_term;
  r.cross_form = s[kCross];
  r.max_divergence = s[kDiv];
  if (r.max_divergence > tol.divergence)
    r.warnings.push_back("Y is not divergence-free: max |div Y| = " + sci(r.max_divergence) +
                         "; the covariant cross-check is not an identity for this Y");
  const double scale = std::max(std::abs(r.value), 1e-300);
  if (r.max_divergence <= tol.divergence && std::abs(r.cross_form - r.value) > tol.relative * scale &&
      std::abs(r.cross_form - r.value) > 1e-12)
    r.warnings.push_back("covariant cross-form differs from the definition by " +
                         sci(std::abs(r.cross_form - r.value) / scale) + " relative");
  return r;
}

double mc_direct(const VectorField& Z, const VectorField& Y, const QuadratureRule& rule, Execution exec) {
  return mc_direct_detail(Z, Y, rule, {}, exec).value;
}

double mc_zonal(const ZonalFlow& z, const VectorField& Y, const QuadratureRule& rule, Execution exec) {
  return run_pass(VectorField{}, Y, &z, {false, true, false}, rule, 1e-12, exec)[kZonal];
}

double mc_commuting(const ZonalFlow& z, const VectorField& Y, const QuadratureRule& rule,
                    const McTolerances& tol, Execution exec) {
  const auto s = run_pass(VectorField{}, Y, &z, {false, false, true}, rule, tol.grad_floor, exec);
  if (s[kComm] > tol.commutator)
    throw PreconditionError("commuting formula needs [X,Y] = 0: max |[X,Y]| = " + sci(s[kComm]), s[kComm]);
  if (s[kDiv] > tol.divergence)
    throw PreconditionError("commuting formula needs div Y = 0: max |div Y| = " + sci(s[kDiv]), s[kDiv]);
  return s[kCommuting];
}

double direct_integrand(const VectorField& Z, const VectorField& Y, const Node& node) {
  double out[kSlots] = {};
  fused_kernel(Z, Y, nullptr, {true, false, false}, 1e-12, node, out);
  return out[kFirst] + out[kSecond];
}

double commuting_integrand(const ZonalFlow& z, const VectorField& Y, const Node& node, double grad_floor) {
  double out[kSlots] = {};
  fused_kernel(VectorField{}, Y, &z, {false, false, true}, grad_floor, node, out);
  return out[kCommuting];
}

FormulaValues evaluate_formulas(const VectorField& Z, const VectorField& Y, const ZonalFlow* z,
                                const QuadratureRule& rule, const McTolerances& tol, Execution exec) {
  const PassFlags flags{true, z != nullptr, z != nullptr};
  const auto s = run_pass(Z, Y, z, flags, rule, tol.grad_floor, exec);
  FormulaValues v;
  v.first_term = s[kFirst];
  v.second_term = s[kSecond];
  v.direct = v.first_term + v.second_term;
  v.cross_form = s[kCross];
  v.max_divergence = s[kDiv];
  v.max_commutator = s[kComm];
  if (z) {
    v.zonal = s[kZonal];
    if (v.max_commutator <= tol.commutator && v.max_divergence <= tol.divergence) v.commuting = s[kCommuting];
  }
  return v;
}

std::string to_string(McVerdict v) {
  switch (v) {
    case McVerdict::Positive:
      return "positive";
    case McVerdict::Nonpositive:
      return "nonpositive";
    default:
      return "indeterminate";
  }
}

McReport evaluate_mc(const VectorField& Z, const VectorField& Y, const ZonalFlow* z,
                     const QuadratureRule& rule, const McTolerances& tol, Execution exec) {
  McReport rep;
  rep.resolution = rule.resolution;
  rep.dim = rule.dim;
  rep.collar = rule.collar;
  rep.base = evaluate_formulas(Z, Y, z, rule, tol, exec);
  rep.refined = evaluate_formulas(Z, Y, z, rule.refined(), tol, exec);
  const FormulaValues& b = rep.base;
  const FormulaValues& r = rep.refined;

  rep.mc_direct = r.direct;
  rep.cross_form = r.cross_form;
  rep.richardson_error = std::abs(r.direct - b.direct);
  if (r.zonal && b.zonal) {
    rep.mc_zonal = r.zonal;
    rep.richardson_error = std::max(rep.richardson_error, std::abs(*r.zonal - *b.zonal));
  }
  if (r.commuting && b.commuting) {
    rep.mc_commuting = r.commuting;
    rep.richardson_error = std::max(rep.richardson_error, std::abs(*r.commuting - *b.commuting));
  }

  const double scale = std::abs(rep.mc_direct);
  const double allowed = std::max(tol.relative * scale, rep.richardson_error);
  bool agree = true;
  auto record = [&](const std::string& key, double a, double c, bool counts) {
    const double diff = std::abs(a - c);
    rep.discrepancies[key] = scale > 0.0 ? diff / scale : diff;
    if (counts && diff > allowed) agree = false;
  };
  const bool divergence_free = r.max_divergence <= tol.divergence;
  record("direct-cross", rep.mc_direct, rep.cross_form, divergence_free);
  if (rep.mc_zonal) record("direct-zonal", rep.mc_direct, *rep.mc_zonal, true);
  if (rep.mc_commuting) record("direct-commuting", rep.mc_direct, *rep.mc_commuting, true);
  if (rep.mc_zonal && rep.mc_commuting) record("zonal-commuting", *rep.mc_zonal, *rep.mc_commuting, true);

  if (!divergence_free)
    rep.warnings.push_back("Y is not divergence-free: max |div Y| = " + sci(r.max_divergence) +
                           " exceeds " + sci(tol.divergence));
  if (z && !rep.mc_commuting) {
    if (r.max_commutator > tol.commutator)
      rep.warnings.push_back("commuting formula skipped: max |[X,Y]| = " + sci(r.max_commutator));
    else
      rep.warnings.push_back("commuting formula skipped: Y is not divergence-free");
  }
  if (!agree) rep.warnings.push_back("formulas disagree beyond max(relative tolerance, Richardson error)");

  if (!agree)
    rep.verdict = McVerdict::Indeterminate;
  else if (rep.mc_direct - rep.richardson_error > 0.0)
    rep.verdict = McVerdict::Positive;
  else if (rep.mc_direct + rep.richardson_error <= 0.0)
    rep.verdict = McVerdict::Nonpositive;
  else
    rep.verdict = McVerdict::Indeterminate;
  return rep;
}

nlohmann::json McReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "mcurv.mc_report";
  j["schema_version"] = kMcReportSchemaVersion;
  j["resolution"] = std::vector<int>(resolution.begin(), resolution.begin() + dim);
  j["collar"] = collar;
  j["mc_direct"] = mc_direct;
  j["mc_zonal"] = mc_zonal ? nlohmann::json(*mc_zonal) : nlohmann::json();
  j["mc_commuting"] = mc_commuting ? nlohmann::json(*mc_commuting) : nlohmann::json();
  j["cross_form"] = cross_form;
  j["richardson_error"] = richardson_error;
  j["discrepancies"] = discrepancies;
  j["verdict"] = to_string(verdict);
  j["warnings"] = warnings;
  j["base"] = values_json(base);
  j["refined"] = values_json(refined);
  return j;
}

}  // namespace mcurv
