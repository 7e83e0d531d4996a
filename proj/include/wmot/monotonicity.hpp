#pragma once

#include <optional>
#include <vector>

#include "wmot/costs.hpp"
#include "wmot/couplings.hpp"
#include "wmot/measures.hpp"
#include "wmot/wmot_solver.hpp"

namespace wmot {

inline constexpr double kMonotoneGapTol = 1e-6;

// Finite collection of (source point, kernel) pairs. Source values may
// repeat; in the martingale context every kernel barycenter must equal its
// source point.
struct SupportSet {
  std::vector<double> x_values;
  std::vector<DiscreteMeasure> kernels;
};

struct MonotonicityReport {
  bool monotone = false;
  double improvement = 0.0;   // max(0, current cost - best competitor cost)
  double current_cost = 0.0;
  double optimal_cost = 0.0;
  // competitor kernels (one per support pair) when a strict improvement exists
  std::optional<std::vector<DiscreteMeasure>> competitor;
};

// Optimality check for a support set under a (possibly nonlinear) convex
// cost: re-solves the induced problem with uniform weights 1/N, keeping
// repeated source values as distinct rows, and compares against the carried
// kernels.
MonotonicityReport check_martingale_c_monotone(const SupportSet& support,
                                               const CostFunctional& cost,
                                               double gap_tol = kMonotoneGapTol,
                                               SolveOptions opts = {});

// Same check on a coupling's support pairs weighted by its source measure.
MonotonicityReport check_coupling_c_monotone(const DiscreteCoupling& pi,
                                             const CostFunctional& cost,
                                             double gap_tol = kMonotoneGapTol,
                                             SolveOptions opts = {});

struct FiniteOptimalityReport {
  bool optimal = false;
  double improvement = 0.0;
};

// Linear-cost specialisation: a martingale coupling is optimal iff no
// competitor with the same source marginal, aggregate target and conditional
// barycenters does better. Collapses to one LP.
FiniteOptimalityReport check_finite_optimality(const DiscreteCoupling& pi,
                                               const CostFunctional& cost,
                                               double gap_tol = 1e-7);

}  // namespace wmot
