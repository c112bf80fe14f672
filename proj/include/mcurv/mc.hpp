#pragma once

// Quadrature evaluation of
//   mc(Z, Y) = -int g([Z,Y],[Z,Y]) mu - int g(Z, [[Z,Y],Y]) mu
// by three routes: the definition (with the rewritten covariant form
// <nabla_Z [Z,Y] + nabla_[Z,Y] Z, Y> as an internal cross-check), the
// four-term expansion for zonal Z = f X, and the commuting formula
// 1/2 int F Y(||X||^2)^2 mu for [X,Y] = 0. Both expansions use
// Y^2(f^2) = 2 (Y(f)^2 + f Y^2(f)), which puts 1/2 on the last zonal term.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcurv/quadrature.hpp"
#include "mcurv/zonal.hpp"

namespace mcurv {

struct McTolerances {
  double relative = 1e-6;     // formula agreement target
  double divergence = 1e-8;   // div Y
  double commutator = 1e-8;   // [X, Y]
  double grad_floor = 1e-12;  // U0 cut-off for |grad ||X||^2|
};

struct DirectResult {
  double value = 0.0;
  double first_term = 0.0;   // -int |[Z,Y]|^2, never positive
  double second_term = 0.0;  // -int g(Z, [[Z,Y],Y])
  double cross_form = 0.0;   // int g(nabla_Z [Z,Y] + nabla_[Z,Y] Z, Y)
  double max_divergence = 0.0;
  std::vector<std::string> warnings;
};

DirectResult mc_direct_detail(const VectorField& Z, const VectorField& Y, const QuadratureRule& rule,
                              const McTolerances& tol = {}, Execution exec = Execution::Parallel);
double mc_direct(const VectorField& Z, const VectorField& Y, const QuadratureRule& rule,
                 Execution exec = Execution::Parallel);

// Four-term zonal formula.
double mc_zonal(const ZonalFlow& z, const VectorField& Y, const QuadratureRule& rule,
                Execution exec = Execution::Parallel);

// Commuting formula. Throws PreconditionError when max |[X,Y]| or max |div Y|
// over the quadrature nodes exceeds its tolerance.
double mc_commuting(const ZonalFlow& z, const VectorField& Y, const QuadratureRule& rule,
                    const McTolerances& tol = {}, Execution exec = Execution::Parallel);

// Integrands per unit volume, for CSV export.
double direct_integrand(const VectorField& Z, const VectorField& Y, const Node& node);
double commuting_integrand(const ZonalFlow& z, const VectorField& Y, const Node& node,
                           double grad_floor = 1e-12);

// Every formula at one resolution, from a single pass over the nodes.
struct FormulaValues {
  double direct = 0.0;
  double first_term = 0.0;
  double second_term = 0.0;
  double cross_form = 0.0;
  std::optional<double> zonal;
  std::optional<double> commuting;
  double max_divergence = 0.0;
  double max_commutator = 0.0;
};

FormulaValues evaluate_formulas(const VectorField& Z, const VectorField& Y, const ZonalFlow* z,
                                const QuadratureRule& rule, const McTolerances& tol = {},
                                Execution exec = Execution::Parallel);

enum class McVerdict { Positive, Nonpositive, Indeterminate };
std::string to_string(McVerdict v);

struct McReport {
  std::array<int, kMaxDim> resolution{};
  int dim = 0;
  double collar = 0.0;
  FormulaValues base;     // at `resolution`
  FormulaValues refined;  // at doubled resolution

  // Headline values are the refined ones.
  double mc_direct = 0.0;
  std::optional<double> mc_zonal;
  std::optional<double> mc_commuting;
  double cross_form = 0.0;
  // max over formulas of |refined - base|.
  double richardson_error = 0.0;
  // |a - b| / |mc_direct| at the refined resolution, keyed "direct-zonal" etc.
  std::map<std::string, double> discrepancies;
  McVerdict verdict = McVerdict::Indeterminate;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

inline constexpr int kMcReportSchemaVersion = 1;

// Runs every applicable formula at the rule's resolution and at twice it.
// `z` may be null (no zonal structure known). The commuting formula is used
// only when its preconditions hold on the nodes; otherwise a warning says why.
McReport evaluate_mc(const VectorField& Z, const VectorField& Y, const ZonalFlow* z,
                     const QuadratureRule& rule, const McTolerances& tol = {},
                     Execution exec = Execution::Parallel);

}  // namespace mcurv
