#pragma once

#include <vector>

#include "wmot/costs.hpp"
#include "wmot/couplings.hpp"
#include "wmot/measures.hpp"

namespace wmot {

enum class StepRule { kLineSearch, kClassic };  // classic = 2/(t+2)
enum class InitialPoint { kFeasibilityLp, kRandomVertex };

struct SolveOptions {
  bool martingale = true;
  long max_iterations = 5000;
  double gap_tolerance = 1e-6;  // absolute conditional-gradient duality gap
  StepRule step_rule = StepRule::kLineSearch;
  double line_search_tol = 1e-10;
  InitialPoint initial = InitialPoint::kFeasibilityLp;
  unsigned long long seed = 0;  // drives the random-vertex start
  bool record_trace = false;
};

struct TracePoint {
  long iter;
  double value;
  double gap;
};

struct SolverReport {
  explicit SolverReport(DiscreteCoupling c) : coupling(std::move(c)) {}
  DiscreteCoupling coupling;
  double value = 0.0;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

// Conditional-gradient minimisation of pi -> sum_i mu_i C(x_i, pi_{x_i}) over
// the (martingale) transport polytope, with the exact LP as the linear
// oracle. Martingale mode throws infeasible_error when the convex order
// fails. Linear costs collapse to a single LP call with zero gap.
SolverReport solve_wmot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostFunctional& cost, const SolveOptions& opts = {});

// sum_i mu_i C(x_i, kernel_i), compensated.
double evaluate(const DiscreteCoupling& pi, const CostFunctional& cost);

// Raw-grid variant used by the optimality checks: source values may repeat,
// each index keeps its own row and barycenter constraint.
struct GridProblem {
  std::vector<double> x_values, mu_weights;
  std::vector<double> y_values, nu_weights;
  bool martingale = true;
};

struct GridSolveResult {
  std::vector<double> joint;  // n*m row-major
  double value = 0.0;
  double gap = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

GridSolveResult solve_wmot_grid(const GridProblem& problem, const CostFunctional& cost,
                                const SolveOptions& opts = {});

}  // namespace wmot
