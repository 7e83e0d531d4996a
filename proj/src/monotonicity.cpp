#include "wmot/monotonicity.hpp"

#include <cmath>
#include <stdexcept>

#include "wmot/numeric.hpp"

namespace wmot {

namespace {

MonotonicityReport run_check(const std::vector<double>& x_values,
                             const std::vector<double>& weights,
                             const std::vector<DiscreteMeasure>& kernels,
                             const CostFunctional& cost, double gap_tol, SolveOptions opts) {
  const std::size_t n = x_values.size();
  if (n == 0 || kernels.size() != n)
    throw std::invalid_argument("monotonicity check: empty or mismatched support");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(kernels[i].mean() - x_values[i]) > kMartingaleTolerance)
      throw std::invalid_argument("monotonicity check: kernel barycenter != source point");

  // aggregate target measure
  std::vector<double> atoms, mass;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kernels[i].size(); ++j) {
      atoms.push_back(kernels[i].atoms()[j]);
      mass.push_back(weights[i] * kernels[i].weights()[j]);
    }
  }
  DiscreteMeasure target(std::move(atoms), std::move(mass));

  GridProblem pb{x_values, weights, target.atoms(), target.weights(), /*martingale=*/true};
  opts.martingale = true;
  GridSolveResult best = solve_wmot_grid(pb, cost, opts);

  KahanSum cur;
  for (std::size_t i = 0; i < n; ++i)
    cur.add(weights[i] * cost.value(x_values[i], kernels[i]));

  MonotonicityReport rep;
  rep.current_cost = cur.value();
  rep.optimal_cost = best.value;
  rep.improvement = std::max(0.0, rep.current_cost - rep.optimal_cost);
  rep.monotone = rep.current_cost <= rep.optimal_cost + gap_tol;
  if (rep.improvement > gap_tol) {
    std::vector<DiscreteMeasure> competitor;
    competitor.reserve(n);
    const std::size_t m = target.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> ka, kw;
      for (std::size_t j = 0; j < m; ++j) {
        double v = best.joint[i * m + j];
        if (v > 0.0) {
          ka.push_back(target.atoms()[j]);
          kw.push_back(v / weights[i]);
        }
      }
      competitor.emplace_back(std::move(ka), std::move(kw));
    }
    rep.competitor = std::move(competitor);
  }
  return rep;
}

}  // namespace

MonotonicityReport check_martingale_c_monotone(const SupportSet& support,
                                               const CostFunctional& cost, double gap_tol,
                                               SolveOptions opts) {
  std::vector<double> weights(support.x_values.size(),
                              1.0 / static_cast<double>(support.x_values.size()));
  return run_check(support.x_values, weights, support.kernels, cost, gap_tol, opts);
}

MonotonicityReport check_coupling_c_monotone(const DiscreteCoupling& pi,
                                             const CostFunctional& cost, double gap_tol,
                                             SolveOptions opts) {
  return run_check(pi.source().atoms(), pi.source().weights(), pi.kernels(), cost, gap_tol,
                   opts);
}

FiniteOptimalityReport check_finite_optimality(const DiscreteCoupling& pi,
                                               const CostFunctional& cost, double gap_tol) {
  if (!cost.is_linear())
    throw std::invalid_argument("check_finite_optimality: cost must be linear");
  MonotonicityReport rep = check_coupling_c_monotone(pi, cost, gap_tol);
  return FiniteOptimalityReport{rep.improvement <= gap_tol, rep.improvement};
}

}  // namespace wmot
