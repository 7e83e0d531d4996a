#pragma once

#include <cstdint>
#include <vector>

#include "wmot/couplings.hpp"
#include "wmot/measures.hpp"
#include "wmot/wmot_solver.hpp"

namespace wmot {

struct VixResult {
  SolverReport report;  // report.coupling is the maximising martingale coupling
  double d_super = 0.0; // robust upper bound for the VIX future, >= 0
};

// Superreplication bound for a VIX future over the horizon delta = T2 - T1:
// maximises E[sqrt((2/delta) E[ln(S1/S2) | S1])] over martingale couplings of
// (mu, nu). Requires strictly positive atoms and convex order.
VixResult vix_superreplication(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               double delta, SolveOptions opts = {});

struct SbmModel {
  SolverReport report;   // optimizer of the squared-Wasserstein anchor problem
  double value = 0.0;    // V = sum_i mu_i W_2^2(kernel_i, N(0,1))
  double mt_value = 0.0; // 0.5 (1 + second moment of nu - V)
  // Per source atom: Gaussian preimages of the kernel's cumulative weights;
  // strictly increasing, last entry +infinity.
  std::vector<std::vector<double>> z_grids;
};

// One-step stretched Brownian motion between mu and nu: the unique optimal
// coupling for the Gaussian-anchor cost plus the data needed to simulate the
// interpolating martingale in closed form.
SbmModel sbm_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, SolveOptions opts = {});

struct PathEnsemble {
  std::vector<double> times;              // grid in [0,1] containing 0 and 1
  std::vector<std::size_t> source_index;  // per path: index of the source atom
  std::vector<double> brownian;           // n_paths x grid, row-major
  std::vector<double> values;             // n_paths x grid, row-major: M_t

  std::size_t n_paths() const { return source_index.size(); }
  double value(std::size_t path, std::size_t k) const { return values[path * times.size() + k]; }
};

// Seeded closed-form simulation: X ~ mu from a dedicated substream, one
// Brownian substream per path, and M_t evaluated as the conditional
// expectation of the kernel quantile transform.
PathEnsemble sbm_simulate(const SbmModel& model, std::vector<double> times, std::size_t n_paths,
                          std::uint64_t seed);

struct ProcessBound {
  double endpoint_aw = 0.0;  // AW_r between the two endpoint couplings
  double bound = 0.0;        // (r/(r-1))^r * endpoint_aw^r
};

// Certified upper bound on AW_r^r between the path laws of two stretched
// Brownian motions, from the endpoint couplings alone. Requires r >= 2.
ProcessBound sbm_process_bound(const SbmModel& a, const SbmModel& b, double r);

}  // namespace wmot
