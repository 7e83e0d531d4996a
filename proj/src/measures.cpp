#include "wmot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wmot/normal.hpp"
#include "wmot/numeric.hpp"

namespace wmot {

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights,
                                 double mass_tol) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("DiscreteMeasure: atom/weight size mismatch or empty");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i]) || !std::isfinite(weights[i]))
      throw std::invalid_argument("DiscreteMeasure: non-finite entry");
    if (weights[i] < 0.0) throw std::invalid_argument("DiscreteMeasure: negative weight");
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  atoms_.reserve(atoms.size());
  weights_.reserve(atoms.size());
  for (std::size_t k : order) {
    if (weights[k] == 0.0) continue;
    if (!atoms_.empty() && atoms[k] - atoms_.back() < kAtomMergeGap) {
      weights_.back() += weights[k];
    } else {
      atoms_.push_back(atoms[k]);
      weights_.push_back(weights[k]);
    }
  }
  if (atoms_.empty()) throw std::invalid_argument("DiscreteMeasure: no mass");

  double total = compensated_sum(weights_);
  if (std::abs(total - 1.0) > mass_tol)
    throw std::invalid_argument("DiscreteMeasure: weights sum to " + std::to_string(total));
  for (double& w : weights_) w /= total;

  cum_.resize(weights_.size());
  KahanSum c;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    c.add(weights_[j]);
    cum_[j] = c.value();
  }
  cum_.back() = 1.0;

  KahanSum m;
  for (std::size_t j = 0; j < weights_.size(); ++j) m.add(weights_[j] * atoms_[j]);
  mean_ = m.value();
}

DiscreteMeasure DiscreteMeasure::point_mass(double x) { return DiscreteMeasure({x}, {1.0}); }

DiscreteMeasure DiscreteMeasure::two_point(double x0, double w0, double x1) {
  return DiscreteMeasure({x0, x1}, {w0, 1.0 - w0});
}

double DiscreteMeasure::second_moment() const {
  KahanSum s;
  for (std::size_t j = 0; j < size(); ++j) s.add(weights_[j] * atoms_[j] * atoms_[j]);
  return s.value();
}

double DiscreteMeasure::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("quantile: u outside (0,1]");
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  return atoms_[static_cast<std::size_t>(it - cum_.begin())];
}

double wasserstein_1d(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double r) {
  if (r < 1.0) throw std::domain_error("wasserstein_1d: r < 1");
  const auto& c1 = m1.cumulative();
  const auto& c2 = m2.cumulative();
  KahanSum acc;
  std::size_t i = 0, j = 0;
  double prev = 0.0;
  while (i < m1.size() && j < m2.size()) {
    double next = std::min(c1[i], c2[j]);
    double du = next - prev;
    if (du > 0.0) {
      double gap = std::abs(m1.atoms()[i] - m2.atoms()[j]);
      if (gap > 0.0) acc.add(du * (r == 1.0 ? gap : (r == 2.0 ? gap * gap : std::pow(gap, r))));
    }
    prev = next;
    if (c1[i] <= next) ++i;
    if (j < m2.size() && c2[j] <= next) ++j;
  }
  double pow_sum = acc.value();
  if (pow_sum <= 0.0) return 0.0;
  return r == 1.0 ? pow_sum : std::pow(pow_sum, 1.0 / r);
}

namespace {
// Potential function U_eta(k) = \int |y-k| d(eta) from prefix sums.
struct Potential {
  const DiscreteMeasure& m;
  std::vector<double> prefix_atom_sum;
  double total_atom_sum;

  explicit Potential(const DiscreteMeasure& meas) : m(meas) {
    prefix_atom_sum.resize(m.size());
    KahanSum s;
    for (std::size_t j = 0; j < m.size(); ++j) {
      s.add(m.weights()[j] * m.atoms()[j]);
      prefix_atom_sum[j] = s.value();
    }
    total_atom_sum = prefix_atom_sum.back();
  }

  double operator()(double k) const {
    auto it = std::upper_bound(m.atoms().begin(), m.atoms().end(), k);
    double mass_le = 0.0, sum_le = 0.0;
    if (it != m.atoms().begin()) {
      std::size_t idx = static_cast<std::size_t>(it - m.atoms().begin()) - 1;
      mass_le = m.cumulative()[idx];
      sum_le = prefix_atom_sum[idx];
    }
    return k * (2.0 * mass_le - 1.0) + total_atom_sum - 2.0 * sum_le;
  }
};
}  // namespace

ConvexOrderResult check_convex_order(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     double tol) {
  ConvexOrderResult res;
  res.mean_gap = nu.mean() - mu.mean();
  if (std::abs(res.mean_gap) > tol) {
    res.ordered = false;
    return res;
  }
  Potential u_mu(mu), u_nu(nu);
  auto scan = [&](const std::vector<double>& ks) {
    for (double k : ks) {
      double deficit = u_mu(k) - u_nu(k);
      if (deficit > res.worst_violation) {
        res.worst_violation = deficit;
        res.witness = k;
      }
    }
  };
  scan(mu.atoms());
  scan(nu.atoms());
  res.ordered = res.worst_violation <= tol;
  if (res.ordered) res.witness.reset();
  return res;
}

double w2_to_gaussian(const DiscreteMeasure& p, double rho) {
  if (rho < 1.0) throw std::domain_error("w2_to_gaussian: rho < 1");
  const auto& a = p.atoms();
  const auto& c = p.cumulative();
  const std::size_t n = p.size();

  if (rho == 2.0) {
    // m2(p) + 1 - 2 * sum_j a_j (phi(z_{j-1}) - phi(z_j)), z_j = Phi^{-1}(c_j).
    KahanSum cross;
    double phi_prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double phi_cur = j + 1 == n ? 0.0 : normal_pdf(normal_quantile(c[j]));
      cross.add(a[j] * (phi_prev - phi_cur));
      phi_prev = phi_cur;
    }
    return p.second_moment() + 1.0 - 2.0 * cross.value();
  }

  constexpr double z_clip = 13.0;
  double block_tol = std::max(1e-10 / static_cast<double>(n), 1e-13);
  KahanSum acc;
  double z_prev = -z_clip;
  for (std::size_t j = 0; j < n; ++j) {
    double z_cur = j + 1 == n ? z_clip : std::clamp(normal_quantile(c[j]), -z_clip, z_clip);
    auto integrand = [&](double z) { return std::pow(std::abs(a[j] - z), rho) * normal_pdf(z); };
    if (z_prev < a[j] && a[j] < z_cur) {
      // split at the kink
      acc.add(adaptive_simpson(integrand, z_prev, a[j], 0.5 * block_tol));
      acc.add(adaptive_simpson(integrand, a[j], z_cur, 0.5 * block_tol));
    } else {
      acc.add(adaptive_simpson(integrand, z_prev, z_cur, block_tol));
    }
    z_prev = z_cur;
  }
  return acc.value();
}

}  // namespace wmot
