#include "wmot/costs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wmot/normal.hpp"
#include "wmot/numeric.hpp"

namespace wmot {

double CostFunctional::value(double x, const DiscreteMeasure& p) const {
  return value_on_support(x, p.atoms(), p.weights());
}

double CostFunctional::linear_cost(double, double) const {
  throw std::logic_error("cost is not linear");
}

bool CostFunctional::scalar_statistic(double, std::span<const double>, std::span<double>) const {
  return false;
}

double CostFunctional::statistic_link(double s) const { return s; }

double CostFunctional::statistic_link_derivative(double) const { return 1.0; }

namespace {

class FunctionLinearCost final : public CostFunctional {
 public:
  explicit FunctionLinearCost(std::function<double(double, double)> c) : c_(std::move(c)) {}

  double value_on_support(double x, std::span<const double> support,
                          std::span<const double> weights) const override {
    KahanSum s;
    for (std::size_t j = 0; j < support.size(); ++j)
      if (weights[j] != 0.0) s.add(weights[j] * c_(x, support[j]));
    return s.value();
  }

  void weight_gradient(double x, std::span<const double> support, std::span<const double>,
                       std::span<double> out) const override {
    for (std::size_t j = 0; j < support.size(); ++j) out[j] = c_(x, support[j]);
  }

  bool strictly_convex_in_p() const override { return false; }
  bool is_linear() const override { return true; }
  double linear_cost(double x, double y) const override { return c_(x, y); }

  bool scalar_statistic(double x, std::span<const double> support,
                        std::span<double> stat_out) const override {
    for (std::size_t j = 0; j < support.size(); ++j) stat_out[j] = c_(x, support[j]);
    return true;
  }

 private:
  std::function<double(double, double)> c_;
};

class VixCost final : public CostFunctional {
 public:
  explicit VixCost(VixParams params) : delta_(params.delta) {
    if (!(delta_ > 0.0)) throw std::invalid_argument("vix cost: delta <= 0");
  }

  double value_on_support(double x, std::span<const double> support,
                          std::span<const double> weights) const override {
    return statistic_link(stat(x, support, weights));
  }

  void weight_gradient(double x, std::span<const double> support,
                       std::span<const double> weights, std::span<double> out) const override {
    double s = stat(x, support, weights);
    if (s <= 0.0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    double arg = (2.0 / delta_) * s;
    if (s <= kVixEpsSmooth) arg += kVixEpsSmooth;
    double factor = -1.0 / (delta_ * std::sqrt(arg));
    double lx = std::log(x);
    for (std::size_t j = 0; j < support.size(); ++j) out[j] = factor * (lx - std::log(support[j]));
  }

  bool strictly_convex_in_p() const override { return false; }

  bool scalar_statistic(double x, std::span<const double> support,
                        std::span<double> stat_out) const override {
    check_positive(x, support);
    double lx = std::log(x);
    for (std::size_t j = 0; j < support.size(); ++j) stat_out[j] = lx - std::log(support[j]);
    return true;
  }

  double statistic_link(double s) const override {
    return s <= 0.0 ? 0.0 : -std::sqrt((2.0 / delta_) * s);
  }

  double statistic_link_derivative(double s) const override {
    if (s <= 0.0) return 0.0;
    double arg = (2.0 / delta_) * s;
    if (s <= kVixEpsSmooth) arg += kVixEpsSmooth;
    return -1.0 / (delta_ * std::sqrt(arg));
  }

 private:
  static void check_positive(double x, std::span<const double> support) {
    if (!(x > 0.0)) throw std::domain_error("vix cost: nonpositive source point");
    for (double ya : support)
      if (!(ya > 0.0)) throw std::domain_error("vix cost: nonpositive support atom");
  }

  double stat(double x, std::span<const double> support, std::span<const double> weights) const {
    check_positive(x, support);
    double lx = std::log(x);
    KahanSum s;
    for (std::size_t j = 0; j < support.size(); ++j)
      if (weights[j] != 0.0) s.add(weights[j] * (lx - std::log(support[j])));
    return s.value();
  }

  double delta_;
};

// Clamp a cumulative weight away from {0,1} before inverting the normal CDF;
// one-sided derivatives diverge logarithmically at the simplex boundary.
inline double safe_quantile(double c) {
  return normal_quantile(std::clamp(c, 1e-16, 1.0 - 1e-16));
}

class GaussAnchorCost final : public CostFunctional {
 public:
  explicit GaussAnchorCost(double rho) : rho_(rho) {
    if (!(rho >= 1.0)) throw std::invalid_argument("gauss anchor cost: rho < 1");
  }

  double value(double, const DiscreteMeasure& p) const override {
    return w2_to_gaussian(p, rho_);
  }

  double value_on_support(double, std::span<const double> support,
                          std::span<const double> weights) const override {
    if (rho_ == 2.0) return value2(support, weights);
    return value_quadrature(support, weights);
  }

  void weight_gradient(double, std::span<const double> support,
                       std::span<const double> weights, std::span<double> out) const override {
    if (rho_ == 2.0) {
      gradient2(support, weights, out);
      return;
    }
    gradient_fd(support, weights, out);
  }

  bool strictly_convex_in_p() const override { return true; }

 private:
  // W_2^2(p, N(0,1)) = m2(p) + 1 - 2 sum_j a_j (phi(z_{j-1}) - phi(z_j))
  static double value2(std::span<const double> a, std::span<const double> w) {
    const std::size_t n = a.size();
    KahanSum acc;
    double cum = 0.0, phi_prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cum += w[j];
      double phi_cur = j + 1 == n ? 0.0 : normal_pdf(safe_quantile(cum));
      acc.add(w[j] * a[j] * a[j] + 2.0 * a[j] * (phi_cur - phi_prev));
      phi_prev = phi_cur;
    }
    return acc.value() + 1.0;
  }

  // Tangent gradient: g_j = a_j^2 + 2 sum_{k>=j} (a_{k+1}-a_k) z_k over the
  // interior cumulative boundaries.
  static void gradient2(std::span<const double> a, std::span<const double> w,
                        std::span<double> out) {
    const std::size_t n = a.size();
    std::vector<double> z(n, 0.0);
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      cum += w[k];
      z[k] = safe_quantile(cum);
    }
    double tail = 0.0;
    for (std::size_t j = n; j-- > 0;) {
      out[j] = a[j] * a[j] + 2.0 * tail;
      if (j > 0) tail += (a[j] - a[j - 1]) * z[j - 1];
    }
  }

  double value_quadrature(std::span<const double> a, std::span<const double> w) const {
    constexpr double z_clip = 13.0;
    const std::size_t n = a.size();
    double block_tol = std::max(1e-10 / static_cast<double>(n), 1e-13);
    KahanSum acc;
    double cum = 0.0, z_prev = -z_clip;
    for (std::size_t j = 0; j < n; ++j) {
      cum += w[j];
      if (w[j] == 0.0) continue;
      double z_cur = j + 1 == n ? z_clip : std::clamp(safe_quantile(cum), -z_clip, z_clip);
      auto f = [&](double zz) { return std::pow(std::abs(a[j] - zz), rho_) * normal_pdf(zz); };
      if (z_prev < a[j] && a[j] < z_cur) {
        acc.add(adaptive_simpson(f, z_prev, a[j], 0.5 * block_tol));
        acc.add(adaptive_simpson(f, a[j], z_cur, 0.5 * block_tol));
      } else {
        acc.add(adaptive_simpson(f, z_prev, z_cur, block_tol));
      }
      z_prev = z_cur;
    }
    return acc.value();
  }

  // Central differences along renormalized simplex directions.
  void gradient_fd(std::span<const double> a, std::span<const double> w,
                   std::span<double> out) const {
    const std::size_t n = a.size();
    std::vector<double> pert(w.begin(), w.end());
    for (std::size_t j = 0; j < n; ++j) {
      double h = 1e-6;
      double lo = w[j] - h, hi = w[j] + h;
      if (lo < 0.0) {  // one-sided near the boundary
        lo = w[j];
        h = 0.5 * h;
        hi = w[j] + 2.0 * h;
      }
      auto eval = [&](double wj) {
        pert[j] = wj;
        double total = 1.0 + (wj - w[j]);
        double inv = 1.0 / total;
        std::vector<double> scaled(pert);
        for (double& v : scaled) v *= inv;
        double val = value_quadrature(a, scaled);
        pert[j] = w[j];
        return val;
      };
      out[j] = (eval(hi) - eval(lo)) / (hi - lo);
    }
  }

  double rho_;
};

}  // namespace

CostPtr linear_cost(std::function<double(double, double)> c) {
  return std::make_shared<FunctionLinearCost>(std::move(c));
}

CostPtr linear_cost_table(std::vector<double> x_atoms, std::vector<double> y_atoms,
                          std::vector<double> table) {
  if (table.size() != x_atoms.size() * y_atoms.size())
    throw std::invalid_argument("linear_cost_table: size mismatch");
  auto lookup = [xs = std::move(x_atoms), ys = std::move(y_atoms),
                 tb = std::move(table)](double x, double y) {
    auto find = [](const std::vector<double>& grid, double v) {
      auto it = std::lower_bound(grid.begin(), grid.end(), v - 1e-12);
      if (it == grid.end() || std::abs(*it - v) > 1e-9)
        throw std::invalid_argument("linear_cost_table: point off the table grid");
      return static_cast<std::size_t>(it - grid.begin());
    };
    return tb[find(xs, x) * ys.size() + find(ys, y)];
  };
  return linear_cost(lookup);
}

CostPtr vix_cost(VixParams params) { return std::make_shared<VixCost>(params); }

CostPtr gauss_anchor_cost(double rho) { return std::make_shared<GaussAnchorCost>(rho); }

}  // namespace wmot
