#include "wmot/parallel.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>

namespace wmot::par {

int thread_budget() {
  static const int budget = [] {
    const char* env = std::getenv("WMOT_THREADS");
    if (!env || !*env) return -1;
    return std::atoi(env);
  }();
  return budget;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  int budget = thread_budget();
  if (budget == 0 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  int threads = budget > 0 ? budget : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < static_cast<long long>(count); ++i)
    body(static_cast<std::size_t>(i));
}

namespace {
void aw_row(const DiscreteCoupling& a, const DiscreteCoupling& b, double r, std::size_t i,
            double* out_row) {
  const double xi = a.source().atoms()[i];
  const std::size_t nb = b.size();
  for (std::size_t k = 0; k < nb; ++k) {
    double dx = std::abs(xi - b.source().atoms()[k]);
    double w = wasserstein_1d(a.kernel(i), b.kernel(k), r);
    double dxr = r == 1.0 ? dx : std::pow(dx, r);
    double wr = r == 1.0 ? w : std::pow(w, r);
    out_row[k] = dxr + wr;
  }
}

void grad_row(const CostFunctional& cost, std::span<const double> x, std::span<const double> y,
              std::span<const double> mu_w, std::span<const double> joint, std::size_t i,
              std::vector<double>& weights, double* out_row) {
  const std::size_t m = y.size();
  const double inv = 1.0 / mu_w[i];
  for (std::size_t j = 0; j < m; ++j) weights[j] = joint[i * m + j] * inv;
  cost.weight_gradient(x[i], y, weights, {out_row, m});
}
}  // namespace

void aw_cost_matrix_serial(const DiscreteCoupling& a, const DiscreteCoupling& b, double r,
                           std::span<double> out) {
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) aw_row(a, b, r, i, out.data() + i * nb);
}

void aw_cost_matrix(const DiscreteCoupling& a, const DiscreteCoupling& b, double r,
                    std::span<double> out) {
  const std::size_t nb = b.size();
  double* base = out.data();
  parallel_for(a.size(), [&](std::size_t i) { aw_row(a, b, r, i, base + i * nb); });
}

void gradient_matrix_serial(const CostFunctional& cost, std::span<const double> x,
                            std::span<const double> y, std::span<const double> mu_w,
                            std::span<const double> joint, std::span<double> out) {
  std::vector<double> weights(y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    grad_row(cost, x, y, mu_w, joint, i, weights, out.data() + i * y.size());
}

void gradient_matrix(const CostFunctional& cost, std::span<const double> x,
                     std::span<const double> y, std::span<const double> mu_w,
                     std::span<const double> joint, std::span<double> out) {
  const std::size_t m = y.size();
  double* base = out.data();
  int budget = thread_budget();
  if (budget == 0 || x.size() < 2) {
    gradient_matrix_serial(cost, x, y, mu_w, joint, out);
    return;
  }
  int threads = budget > 0 ? budget : omp_get_max_threads();
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> weights(m);
#pragma omp for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(x.size()); ++i)
      grad_row(cost, x, y, mu_w, joint, static_cast<std::size_t>(i), weights,
               base + static_cast<std::size_t>(i) * m);
  }
}

void row_costs_serial(const CostFunctional& cost, std::span<const double> x,
                      std::span<const double> y, std::span<const double> mu_w,
                      std::span<const double> joint, std::span<double> out_rows) {
  const std::size_t m = y.size();
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double inv = 1.0 / mu_w[i];
    for (std::size_t j = 0; j < m; ++j) weights[j] = joint[i * m + j] * inv;
    out_rows[i] = cost.value_on_support(x[i], y, weights);
  }
}

void row_costs(const CostFunctional& cost, std::span<const double> x, std::span<const double> y,
               std::span<const double> mu_w, std::span<const double> joint,
               std::span<double> out_rows) {
  const std::size_t m = y.size();
  int budget = thread_budget();
  if (budget == 0 || x.size() < 2) {
    row_costs_serial(cost, x, y, mu_w, joint, out_rows);
    return;
  }
  int threads = budget > 0 ? budget : omp_get_max_threads();
  double* out = out_rows.data();
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> weights(m);
#pragma omp for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(x.size()); ++i) {
      const std::size_t ii = static_cast<std::size_t>(i);
      const double inv = 1.0 / mu_w[ii];
      for (std::size_t j = 0; j < m; ++j) weights[j] = joint[ii * m + j] * inv;
      out[ii] = cost.value_on_support(x[ii], y, weights);
    }
  }
}

}  // namespace wmot::par
