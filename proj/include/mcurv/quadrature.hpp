#pragma once

// Tensor-product quadrature over a collar-trimmed chart: uniform trapezoid
// nodes on periodic axes, Gauss-Legendre nodes on bounded axes.
//
// Node loops are split into slabs along the first axis. Each slab accumulates
// its own partial sums and the slabs are combined in index order, so the
// OpenMP kernel returns bit-identical results for any thread count.
// integrate_reference() is a plain serial loop kept as the testing baseline.

#include <functional>
#include <string>
#include <vector>

#include "mcurv/field.hpp"

namespace mcurv {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct QuadratureRule {
  int dim = 0;
  std::array<int, kMaxDim> resolution{};
  double collar = 1e-3;
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
  std::array<bool, kMaxDim> periodic{};
  std::array<std::vector<double>, kMaxDim> nodes;
  std::array<std::vector<double>, kMaxDim> weights;

  static QuadratureRule for_chart(const Chart& chart, const std::array<int, kMaxDim>& resolution,
                                  double collar = 1e-3);
  // Same rule with every resolution doubled.
  QuadratureRule refined() const;
  size_t size() const;
};

// Data handed to integrand kernels at each node.
struct Node {
  Point x;
  const MatJet& g;
  double density;  // sqrt(det g)
};

enum class Reduction { Sum, MaxAbs };

// Writes one value per output into `out`. Sum outputs are integrated against
// the volume form; MaxAbs outputs report max |value| over the nodes.
using NodeKernel = std::function<void(const Node&, double* out)>;

enum class Execution { Parallel, Serial };

std::vector<double> integrate_many(const Chart& chart, const QuadratureRule& rule,
                                   const std::vector<Reduction>& outputs, const NodeKernel& kernel,
                                   Execution exec = Execution::Parallel);
// Plain triple loop with a single running accumulator per output.
std::vector<double> integrate_many_reference(const Chart& chart, const QuadratureRule& rule,
                                             const std::vector<Reduction>& outputs,
                                             const NodeKernel& kernel);

double integrate(const ScalarField& h, const QuadratureRule& rule,
                 Execution exec = Execution::Parallel);
double integrate_reference(const ScalarField& h, const QuadratureRule& rule);

// Writes one row per node: coordinates, integrand value, weight (including the
// volume density).
void dump_integrand_csv(const Chart& chart, const QuadratureRule& rule,
                        const std::function<double(const Node&)>& integrand,
                        const std::string& path);

}  // namespace mcurv
