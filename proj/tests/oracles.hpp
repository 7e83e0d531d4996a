// Test-only oracles, independent of the solver paths they verify:
// exhaustive vertex enumeration for small transport polytopes, direct
// quadrature, simplex-tangent finite differences and random-instance
// generators.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "wmot/measures.hpp"
#include "wmot/numeric.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// exhaustive vertex enumeration over { z >= 0 : A z = b }

struct EnumResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<double> argmin;
};

namespace detail {

inline int matrix_rank(std::vector<std::vector<double>> a, double tol = 1e-10) {
  const std::size_t rows = a.size();
  if (rows == 0) return 0;
  const std::size_t cols = a[0].size();
  int rank = 0;
  std::size_t lead = 0;
  for (std::size_t r = 0; r < rows && lead < cols; ++lead) {
    std::size_t piv = r;
    for (std::size_t k = r + 1; k < rows; ++k)
      if (std::abs(a[k][lead]) > std::abs(a[piv][lead])) piv = k;
    if (std::abs(a[piv][lead]) <= tol) continue;
    std::swap(a[piv], a[r]);
    for (std::size_t k = 0; k < rows; ++k) {
      if (k == r) continue;
      double f = a[k][lead] / a[r][lead];
      if (f != 0.0)
        for (std::size_t c = lead; c < cols; ++c) a[k][c] -= f * a[r][c];
    }
    ++r;
    ++rank;
  }
  return rank;
}

// solve A_S z = b for the chosen columns; nullopt when the columns are
// dependent or the system is inconsistent
inline std::optional<std::vector<double>> solve_subset(
    const std::vector<std::vector<double>>& a, const std::vector<double>& b,
    const std::vector<int>& subset) {
  const std::size_t rows = a.size();
  const std::size_t k = subset.size();
  std::vector<std::vector<double>> aug(rows, std::vector<double>(k + 1, 0.0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < k; ++c) aug[r][c] = a[r][static_cast<std::size_t>(subset[c])];
    aug[r][k] = b[r];
  }
  std::vector<int> pivot_row(k, -1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < k && r < rows; ++c) {
    std::size_t piv = r;
    for (std::size_t rr = r + 1; rr < rows; ++rr)
      if (std::abs(aug[rr][c]) > std::abs(aug[piv][c])) piv = rr;
    if (std::abs(aug[piv][c]) <= 1e-11) return std::nullopt;  // dependent columns
    std::swap(aug[piv], aug[r]);
    for (std::size_t rr = 0; rr < rows; ++rr) {
      if (rr == r) continue;
      double f = aug[rr][c] / aug[r][c];
      if (f != 0.0)
        for (std::size_t cc = c; cc <= k; ++cc) aug[rr][cc] -= f * aug[r][cc];
    }
    pivot_row[c] = static_cast<int>(r);
    ++r;
  }
  // consistency of the remaining rows
  for (std::size_t rr = r; rr < rows; ++rr)
    if (std::abs(aug[rr][k]) > 1e-9) return std::nullopt;
  std::vector<double> z(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) z[c] = aug[static_cast<std::size_t>(pivot_row[c])][k] /
                                             aug[static_cast<std::size_t>(pivot_row[c])][c];
  return z;
}

}  // namespace detail

// Exact minimum of <cost, z> over the (martingale) transport polytope by
// enumerating all candidate bases. Exponential; keep n*m small.
inline EnumResult enumerate_transport_min(std::span<const double> x, std::span<const double> muw,
                                          std::span<const double> y, std::span<const double> nuw,
                                          std::span<const double> cost, bool martingale) {
  const std::size_t n = x.size(), m = y.size(), nm = n * m;
  const std::size_t rows = n + m + (martingale ? n : 0);
  std::vector<std::vector<double>> a(rows, std::vector<double>(nm, 0.0));
  std::vector<double> b(rows, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i][i * m + j] = 1.0;
      a[n + j][i * m + j] = 1.0;
      if (martingale) a[n + m + i][i * m + j] = y[j] - x[i];
    }
    b[i] = muw[i];
  }
  for (std::size_t j = 0; j < m; ++j) b[n + j] = nuw[j];

  const int rank = detail::matrix_rank(a);
  EnumResult best;

  std::vector<int> subset(static_cast<std::size_t>(rank));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == rank) {
      auto z = detail::solve_subset(a, b, subset);
      if (!z) return;
      double lo = *std::min_element(z->begin(), z->end());
      if (lo < -1e-9) return;
      wmot::KahanSum value;
      for (std::size_t c = 0; c < subset.size(); ++c)
        value.add(cost[static_cast<std::size_t>(subset[c])] * std::max((*z)[c], 0.0));
      double v = value.value();
      if (!best.feasible || v < best.value) {
        best.feasible = true;
        best.value = v;
        best.argmin.assign(nm, 0.0);
        for (std::size_t c = 0; c < subset.size(); ++c)
          best.argmin[static_cast<std::size_t>(subset[c])] = std::max((*z)[c], 0.0);
      }
      return;
    }
    for (int c = start; c <= static_cast<int>(nm) - (rank - depth); ++c) {
      subset[static_cast<std::size_t>(depth)] = c;
      rec(c + 1, depth + 1);
    }
  };
  if (rank > 0 && static_cast<std::size_t>(rank) <= nm) rec(0, 0);
  return best;
}

// ---------------------------------------------------------------------------
// quadrature oracle for the Gaussian-anchor cost: direct integration in u

inline double gaussian_anchor_by_quadrature(const wmot::DiscreteMeasure& p, double rho) {
  auto integrand = [&](double u) {
    double z = 0.0;
    // left-continuous inverse of the CDF of p
    const auto& cum = p.cumulative();
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    double q = p.atoms()[static_cast<std::size_t>(it - cum.begin())];
    z = q - wmot::normal_quantile(u);
    return std::pow(std::abs(z), rho);
  };
  // clip the endpoint singularities; the tails contribute O(1e-12 log)
  return wmot::adaptive_simpson(integrand, 1e-13, 1.0 - 1e-13, 1e-11, 70);
}

// ---------------------------------------------------------------------------
// simplex-tangent central finite differences (renormalized perturbations)

template <typename ValueFn>
std::vector<double> tangent_fd_gradient(const ValueFn& value, std::span<const double> weights,
                                        double h = 1e-6) {
  const std::size_t n = weights.size();
  std::vector<double> g(n, 0.0);
  std::vector<double> w(weights.begin(), weights.end());
  for (std::size_t j = 0; j < n; ++j) {
    auto eval = [&](double wj) {
      double keep = w[j];
      w[j] = wj;
      double total = 1.0 + (wj - keep);
      std::vector<double> scaled(w);
      for (double& v : scaled) v /= total;
      double out = value(scaled);
      w[j] = keep;
      return out;
    };
    g[j] = (eval(w[j] + h) - eval(w[j] - h)) / (2.0 * h);
  }
  return g;
}

// center a gradient so it is comparable across tangent conventions
inline std::vector<double> center_gradient(std::span<const double> g,
                                           std::span<const double> weights) {
  double mean = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) mean += g[j] * weights[j];
  std::vector<double> out(g.begin(), g.end());
  for (double& v : out) v -= mean;
  return out;
}

// ---------------------------------------------------------------------------
// random instances

inline wmot::DiscreteMeasure random_measure(std::mt19937_64& rng, int max_atoms = 6,
                                            double span = 4.0) {
  std::uniform_int_distribution<int> size_dist(1, max_atoms);
  std::uniform_real_distribution<double> atom_dist(-span, span);
  std::uniform_real_distribution<double> weight_dist(0.1, 1.0);
  int k = size_dist(rng);
  std::vector<double> atoms, weights;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    atoms.push_back(atom_dist(rng));
    weights.push_back(weight_dist(rng));
    total += weights.back();
  }
  for (double& w : weights) w /= total;
  return wmot::DiscreteMeasure(std::move(atoms), std::move(weights));
}

// mean-preserving spread of mu: guarantees mu <=_c nu
inline wmot::DiscreteMeasure dilation_of(const wmot::DiscreteMeasure& mu, std::mt19937_64& rng,
                                         double max_spread = 1.5) {
  std::uniform_real_distribution<double> spread(0.0, max_spread);
  std::uniform_real_distribution<double> split(0.2, 0.8);
  std::vector<double> atoms, weights;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double x = mu.atoms()[i], w = mu.weights()[i];
    double width = spread(rng);
    if (width < 1e-9) {
      atoms.push_back(x);
      weights.push_back(w);
      continue;
    }
    // barycenter-preserving two-point kernel around x
    double q = split(rng);
    atoms.push_back(x - width * (1.0 - q));
    weights.push_back(w * q);
    atoms.push_back(x + width * q);
    weights.push_back(w * (1.0 - q));
  }
  return wmot::DiscreteMeasure(std::move(atoms), std::move(weights));
}

}  // namespace oracle
