#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wmot/couplings.hpp"
#include "wmot/measures.hpp"

namespace wmot {

enum class LPStatus { kOptimal, kInfeasible };

struct LPResult {
  LPStatus status = LPStatus::kInfeasible;
  double value = 0.0;
  std::vector<double> joint;  // n*m row-major, empty when infeasible
  // Multipliers of the row-sum, column-sum and (unscaled) barycenter rows.
  std::vector<double> row_duals, col_duals, bary_duals;
  double dual_value = 0.0;
  double primal_residual = 0.0;      // max |Ax - b|
  double compl_slackness = 0.0;      // max |x_ij * reduced_cost_ij|
  long iterations = 0;
};

// Revised simplex over the (martingale) transport polytope
//   { pi >= 0 : row sums mu, column sums nu, sum_j y_j pi_ij = x_i mu_i }.
// Dense explicit basis inverse with BLAS rank-1 updates and periodic LAPACK
// refactorization; Dantzig pricing with Bland's rule as anti-cycling
// fallback. Instances are warm-startable: repeated minimize() calls with new
// costs reuse the current basis, which is what the conditional-gradient
// solver relies on.
//
// x_values need not be distinct or sorted; each index keeps its own row and
// barycenter constraint.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> x_values, std::vector<double> mu_weights,
                   std::vector<double> y_values, std::vector<double> nu_weights,
                   bool martingale);
  ~TransportSimplex();
  TransportSimplex(TransportSimplex&&) noexcept;
  TransportSimplex& operator=(TransportSimplex&&) noexcept;

  std::size_t rows() const;
  std::size_t num_x() const;
  std::size_t num_y() const;

  // Phase-1; decides whether the polytope is nonempty. Idempotent.
  bool feasible();

  // Exact minimum of <cost, pi>; cost is n*m row-major. Throws
  // infeasible_error when the polytope is empty. Warm-starts.
  double minimize(std::span<const double> cost);

  // Basic solution of the last minimize() (or of phase-1), densified.
  std::vector<double> extract_joint() const;

  // Structural basic entries of the current solution as (i, j, value).
  void current_vertex(std::vector<std::pair<std::size_t, double>>& cells) const;

  long iterations() const;

  // minimize() plus refreshed factorization and dual certificates.
  LPResult solve_with_certificates(std::span<const double> cost);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot exact OT / martingale-OT solves. cost is n*m row-major on
// (mu atoms) x (nu atoms).
LPResult solve_linear_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         std::span<const double> cost);
LPResult solve_linear_mot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          std::span<const double> cost);

// Any element of the martingale polytope via phase-1 (Strassen feasibility);
// nullopt when the convex order fails.
std::optional<DiscreteCoupling> feasible_martingale_coupling(const DiscreteMeasure& mu,
                                                             const DiscreteMeasure& nu);

}  // namespace wmot
