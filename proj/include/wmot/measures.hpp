#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace wmot {

// Atoms closer than this are merged at construction.
inline constexpr double kAtomMergeGap = 1e-12;
// Default absolute tolerance for mass and convex-order checks.
inline constexpr double kMassTolerance = 1e-9;
inline constexpr double kOrderTolerance = 1e-9;

// Discrete probability measure on the real line: strictly increasing atoms,
// strictly positive weights summing to one. Immutable after construction.
class DiscreteMeasure {
 public:
  // Sorts, merges near-duplicate atoms (summing weights), validates mass.
  // Throws std::invalid_argument on empty input, non-finite or non-positive
  // data, or total mass farther than mass_tol from one.
  DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights,
                  double mass_tol = kMassTolerance);

  static DiscreteMeasure point_mass(double x);
  static DiscreteMeasure two_point(double x0, double w0, double x1);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  // Cumulative weights; back() is exactly 1.
  const std::vector<double>& cumulative() const { return cum_; }

  double mean() const { return mean_; }
  double second_moment() const;

  // Left-continuous generalized inverse of the CDF, u in (0,1].
  double quantile(double u) const;

  bool operator==(const DiscreteMeasure& other) const = default;

 private:
  std::vector<double> atoms_, weights_, cum_;
  double mean_ = 0.0;
};

// r-Wasserstein distance (r >= 1), exact comonotone evaluation over the
// merged cumulative grid. Returns the rooted distance.
double wasserstein_1d(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double r);

struct ConvexOrderResult {
  bool ordered = false;
  double mean_gap = 0.0;        // mean(nu) - mean(mu)
  double worst_violation = 0.0; // largest potential-function deficit found
  std::optional<double> witness; // kink where the deficit occurs
  explicit operator bool() const { return ordered; }
};

// mu <=_c nu test via potential functions evaluated at the atoms of both
// measures (exact for discrete laws).
ConvexOrderResult check_convex_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     double tol = kOrderTolerance);

// W_rho^rho(p, N(0,1)). Closed form for rho == 2, blockwise adaptive
// quadrature otherwise.
double w2_to_gaussian(const DiscreteMeasure& p, double rho = 2.0);

}  // namespace wmot
