#include "wmot/couplings.hpp"

#include <cmath>
#include <stdexcept>

#include "wmot/numeric.hpp"
#include "wmot/parallel.hpp"
#include "wmot/transport_lp.hpp"

namespace wmot {

DiscreteCoupling::DiscreteCoupling(DiscreteMeasure source, std::vector<DiscreteMeasure> kernels)
    : source_(std::move(source)), kernels_(std::move(kernels)) {
  if (kernels_.size() != source_.size())
    throw std::invalid_argument("DiscreteCoupling: kernel count != source atom count");
}

DiscreteCoupling DiscreteCoupling::identity(const DiscreteMeasure& m) {
  std::vector<DiscreteMeasure> kernels;
  kernels.reserve(m.size());
  for (double a : m.atoms()) kernels.push_back(DiscreteMeasure::point_mass(a));
  return DiscreteCoupling(m, std::move(kernels));
}

DiscreteCoupling from_matrix(std::span<const double> x_atoms, std::span<const double> y_atoms,
                             std::span<const double> joint) {
  const std::size_t n = x_atoms.size(), m = y_atoms.size();
  if (joint.size() != n * m) throw std::invalid_argument("from_matrix: joint size mismatch");

  KahanSum total;
  for (double v : joint) {
    if (!std::isfinite(v) || v < -kAtomMergeGap)
      throw std::invalid_argument("from_matrix: negative or non-finite entry");
    total.add(std::max(v, 0.0));
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance)
    throw std::invalid_argument("from_matrix: total mass not one");

  std::vector<double> src_atoms, src_weights;
  std::vector<DiscreteMeasure> kernels;
  for (std::size_t i = 0; i < n; ++i) {
    KahanSum row;
    for (std::size_t j = 0; j < m; ++j) row.add(std::max(joint[i * m + j], 0.0));
    double mass = row.value();
    if (mass <= 0.0) continue;  // zero-mass rows dropped
    std::vector<double> ka, kw;
    for (std::size_t j = 0; j < m; ++j) {
      double v = joint[i * m + j];
      if (v > 0.0) {
        ka.push_back(y_atoms[j]);
        kw.push_back(v / mass);
      }
    }
    src_atoms.push_back(x_atoms[i]);
    src_weights.push_back(mass);
    kernels.emplace_back(std::move(ka), std::move(kw));
  }
  DiscreteMeasure source(std::move(src_atoms), std::move(src_weights));
  if (source.size() != kernels.size())
    throw std::invalid_argument("from_matrix: duplicate source atoms in the grid");
  return DiscreteCoupling(std::move(source), std::move(kernels));
}

DiscreteMeasure second_marginal(const DiscreteCoupling& pi) {
  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    double wi = pi.source().weights()[i];
    const DiscreteMeasure& k = pi.kernel(i);
    for (std::size_t j = 0; j < k.size(); ++j) {
      atoms.push_back(k.atoms()[j]);
      weights.push_back(wi * k.weights()[j]);
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

MartingaleCheck is_martingale(const DiscreteCoupling& pi, double tol) {
  MartingaleCheck res;
  for (std::size_t i = 0; i < pi.size(); ++i)
    res.max_violation =
        std::max(res.max_violation, std::abs(pi.kernel(i).mean() - pi.source().atoms()[i]));
  res.martingale = res.max_violation <= tol;
  return res;
}

double adapted_wasserstein(const DiscreteCoupling& a, const DiscreteCoupling& b, double r) {
  if (r < 1.0) throw std::domain_error("adapted_wasserstein: r < 1");
  std::vector<double> cost(a.size() * b.size());
  par::aw_cost_matrix(a, b, r, cost);
  TransportSimplex lp(a.source().atoms(), a.source().weights(), b.source().atoms(),
                      b.source().weights(), false);
  double pow_value = lp.minimize(cost);
  if (pow_value <= 0.0) return 0.0;
  return r == 1.0 ? pow_value : std::pow(pow_value, 1.0 / r);
}

}  // namespace wmot
