#pragma once

#include <span>
#include <vector>

#include "wmot/measures.hpp"

namespace wmot {

// Default tolerance for the barycenter (martingale) property; one order
// looser than the LP feasibility tolerance so solver outputs validate.
inline constexpr double kMartingaleTolerance = 1e-8;

// Coupling pi(dx,dy) = mu(dx) pi_x(dy) stored in disintegrated form: the
// source measure plus one conditional kernel per source atom.
class DiscreteCoupling {
 public:
  DiscreteCoupling(DiscreteMeasure source, std::vector<DiscreteMeasure> kernels);

  static DiscreteCoupling identity(const DiscreteMeasure& m);

  const DiscreteMeasure& source() const { return source_; }
  const std::vector<DiscreteMeasure>& kernels() const { return kernels_; }
  const DiscreteMeasure& kernel(std::size_t i) const { return kernels_[i]; }
  std::size_t size() const { return kernels_.size(); }

 private:
  DiscreteMeasure source_;
  std::vector<DiscreteMeasure> kernels_;
};

// Disintegrates a joint matrix (row-major, n x m) with respect to its first
// marginal. Rows with zero mass are dropped, kernels are row-normalized and
// zero entries removed. Throws std::invalid_argument on negative entries or
// total mass away from one.
DiscreteCoupling from_matrix(std::span<const double> x_atoms, std::span<const double> y_atoms,
                             std::span<const double> joint);

DiscreteMeasure second_marginal(const DiscreteCoupling& pi);

struct MartingaleCheck {
  bool martingale = false;
  double max_violation = 0.0;
  explicit operator bool() const { return martingale; }
};
MartingaleCheck is_martingale(const DiscreteCoupling& pi, double tol = kMartingaleTolerance);

// Adapted Wasserstein distance AW_r between couplings: exact LP on the outer
// problem with cell cost |x-x'|^r + W_r^r(kernels), returned rooted.
double adapted_wasserstein(const DiscreteCoupling& a, const DiscreteCoupling& b, double r);

}  // namespace wmot
