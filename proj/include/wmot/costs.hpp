#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wmot/measures.hpp"

namespace wmot {

// Smoothing width for the VIX square-root kink at s = 0.
inline constexpr double kVixEpsSmooth = 1e-10;

// Cost functional C(x, p), convex in the kernel argument, exposing the value
// and the partial derivatives in the kernel weights on a fixed support.
// Implementations are stateless; concurrent evaluation is safe.
class CostFunctional {
 public:
  virtual ~CostFunctional() = default;

  virtual double value(double x, const DiscreteMeasure& p) const;

  // Value on an explicit (support, weights) pair; zero weights are allowed,
  // weights sum to one.
  virtual double value_on_support(double x, std::span<const double> support,
                                  std::span<const double> weights) const = 0;

  // Partial derivatives in the weights on the fixed support. Defined up to a
  // common additive constant per x (directions tangent to the simplex are
  // what solvers consume).
  virtual void weight_gradient(double x, std::span<const double> support,
                               std::span<const double> weights, std::span<double> out) const = 0;

  virtual bool strictly_convex_in_p() const = 0;
  bool convex_in_p() const { return true; }

  // Linear costs expose their table so solvers can collapse to a single LP.
  virtual bool is_linear() const { return false; }
  virtual double linear_cost(double x, double y) const;

  // Costs of the form C(x, p) = link(<stat(x), p>) advertise the statistic;
  // line searches then run in O(1) per source point after precomputation.
  virtual bool scalar_statistic(double x, std::span<const double> support,
                                std::span<double> stat_out) const;
  virtual double statistic_link(double s) const;
  virtual double statistic_link_derivative(double s) const;
};

using CostPtr = std::shared_ptr<const CostFunctional>;

// C(x,p) = \int c(x,y) p(dy).
CostPtr linear_cost(std::function<double(double, double)> c);

// Linear cost from an explicit table on fixed grids; atoms are matched by
// binary search and must coincide with the table grid.
CostPtr linear_cost_table(std::vector<double> x_atoms, std::vector<double> y_atoms,
                          std::vector<double> table);

struct VixParams {
  double delta;  // horizon length T2 - T1 (same unit as the quoted variance)
};

// C(x,p) = -sqrt((2/delta) * max(\int ln(x/y) p(dy), 0)); minimising it over
// martingale couplings prices the VIX future upper bound. Requires a strictly
// positive grid.
CostPtr vix_cost(VixParams params);

// C(x,p) = W_rho^rho(p, N(0,1)); strictly convex. rho == 2 uses the closed
// form and an analytic gradient, other rho fall back to blockwise quadrature
// and simplex-tangent finite differences.
CostPtr gauss_anchor_cost(double rho);

}  // namespace wmot
