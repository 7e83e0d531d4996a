#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wmot/costs.hpp"
#include "wmot/couplings.hpp"

namespace wmot::par {

// Worker cap from WMOT_THREADS: -1 = runtime default, 0 = serial, k = k
// threads. Read once per process.
int thread_budget();

// Index-parallel loop honoring thread_budget(); bodies must write only to
// their own slots so results are identical for any schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Outer cost of the adapted distance: cell (i,k) = |x_i - x'_k|^r +
// W_r^r(kernel_i, kernel'_k). Serial reference kept for tests and benchmarks.
void aw_cost_matrix_serial(const DiscreteCoupling& a, const DiscreteCoupling& b, double r,
                           std::span<double> out);
void aw_cost_matrix(const DiscreteCoupling& a, const DiscreteCoupling& b, double r,
                    std::span<double> out);

// Solver gradient: row i of out gets the weight gradient of cost at
// (x_i, joint row i normalized by mu_i) on the full y grid.
void gradient_matrix_serial(const CostFunctional& cost, std::span<const double> x,
                            std::span<const double> y, std::span<const double> mu_w,
                            std::span<const double> joint, std::span<double> out);
void gradient_matrix(const CostFunctional& cost, std::span<const double> x,
                     std::span<const double> y, std::span<const double> mu_w,
                     std::span<const double> joint, std::span<double> out);

// Per-row cost values C(x_i, kernel_i) of a joint matrix; callers sum the
// slots serially (compensated) so totals stay deterministic.
void row_costs_serial(const CostFunctional& cost, std::span<const double> x,
                      std::span<const double> y, std::span<const double> mu_w,
                      std::span<const double> joint, std::span<double> out_rows);
void row_costs(const CostFunctional& cost, std::span<const double> x,
               std::span<const double> y, std::span<const double> mu_w,
               std::span<const double> joint, std::span<double> out_rows);

}  // namespace wmot::par
