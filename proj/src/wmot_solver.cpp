#include "wmot/wmot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "wmot/errors.hpp"
#include "wmot/numeric.hpp"
#include "wmot/parallel.hpp"
#include "wmot/transport_lp.hpp"

namespace wmot {

namespace {

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

void validate(const GridProblem& pb, const SolveOptions& opts) {
  if (pb.x_values.empty() || pb.y_values.empty() ||
      pb.x_values.size() != pb.mu_weights.size() || pb.y_values.size() != pb.nu_weights.size())
    throw std::invalid_argument("solve_wmot: inconsistent grid");
  if (opts.max_iterations < 1) throw std::invalid_argument("solve_wmot: max_iterations < 1");
  if (!(opts.gap_tolerance > 0.0) || !(opts.line_search_tol > 0.0))
    throw std::invalid_argument("solve_wmot: nonpositive tolerance");
}

// Objective machinery shared between value, gradient and line-search
// evaluations. Costs advertising a scalar statistic get O(n) line searches.
class Objective {
 public:
  Objective(const GridProblem& pb, const CostFunctional& cost)
      : pb_(pb), cost_(cost), n_(pb.x_values.size()), m_(pb.y_values.size()) {
    stat_.assign(n_ * m_, 0.0);
    has_stat_ = cost.scalar_statistic(pb.x_values[0], pb.y_values, {stat_.data(), m_});
    if (has_stat_) {
      for (std::size_t i = 1; i < n_; ++i)
        cost.scalar_statistic(pb.x_values[i], pb.y_values, {stat_.data() + i * m_, m_});
    } else {
      stat_.clear();
      stat_.shrink_to_fit();
    }
    rows_.assign(n_, 0.0);
  }

  bool has_stat() const { return has_stat_; }

  // s_i = <stat row i, joint row i> / mu_i
  void row_stats(std::span<const double> joint, std::span<double> out) const {
    for (std::size_t i = 0; i < n_; ++i) {
      KahanSum s;
      const double* trow = stat_.data() + i * m_;
      const double* jrow = joint.data() + i * m_;
      for (std::size_t j = 0; j < m_; ++j)
        if (jrow[j] != 0.0) s.add(trow[j] * jrow[j]);
      out[i] = s.value() / pb_.mu_weights[i];
    }
  }

  double value(std::span<const double> joint) {
    if (has_stat_) {
      std::vector<double> s(n_);
      row_stats(joint, s);
      KahanSum acc;
      for (std::size_t i = 0; i < n_; ++i)
        acc.add(pb_.mu_weights[i] * cost_.statistic_link(s[i]));
      return acc.value();
    }
    par::row_costs(cost_, pb_.x_values, pb_.y_values, pb_.mu_weights, joint, rows_);
    KahanSum acc;
    for (std::size_t i = 0; i < n_; ++i) acc.add(pb_.mu_weights[i] * rows_[i]);
    return acc.value();
  }

  void gradient(std::span<const double> joint, std::span<double> out) {
    if (has_stat_) {
      std::vector<double> s(n_);
      row_stats(joint, s);
      for (std::size_t i = 0; i < n_; ++i) {
        double f = cost_.statistic_link_derivative(s[i]);
        const double* trow = stat_.data() + i * m_;
        double* grow = out.data() + i * m_;
        for (std::size_t j = 0; j < m_; ++j) grow[j] = f * trow[j];
      }
      return;
    }
    par::gradient_matrix(cost_, pb_.x_values, pb_.y_values, pb_.mu_weights, joint, out);
  }

  // exact line search for min_gamma F((1-gamma) a + gamma b) on [0,1]
  double line_search(std::span<const double> a, std::span<const double> b, double tol) {
    double gamma;
    if (has_stat_) {
      std::vector<double> sa(n_), sb(n_);
      row_stats(a, sa);
      row_stats(b, sb);
      auto h = [&](double g) {
        KahanSum acc;
        for (std::size_t i = 0; i < n_; ++i)
          acc.add(pb_.mu_weights[i] * cost_.statistic_link((1.0 - g) * sa[i] + g * sb[i]));
        return acc.value();
      };
      gamma = golden_section_min(h, 0.0, 1.0, tol);
    } else {
      std::vector<double> blend(n_ * m_);
      auto h = [&](double g) {
        for (std::size_t k = 0; k < blend.size(); ++k)
          blend[k] = (1.0 - g) * a[k] + g * b[k];
        par::row_costs(cost_, pb_.x_values, pb_.y_values, pb_.mu_weights, blend, rows_);
        KahanSum acc;
        for (std::size_t i = 0; i < n_; ++i) acc.add(pb_.mu_weights[i] * rows_[i]);
        return acc.value();
      };
      gamma = golden_section_min(h, 0.0, 1.0, tol);
    }
    if (1.0 - gamma < 2.0 * tol) gamma = 1.0;  // snap onto the vertex
    return gamma;
  }

 private:
  const GridProblem& pb_;
  const CostFunctional& cost_;
  std::size_t n_, m_;
  bool has_stat_ = false;
  std::vector<double> stat_;
  std::vector<double> rows_;
};

}  // namespace

GridSolveResult solve_wmot_grid(const GridProblem& pb, const CostFunctional& cost,
                                const SolveOptions& opts) {
  validate(pb, opts);
  const std::size_t n = pb.x_values.size(), m = pb.y_values.size();

  TransportSimplex lp(pb.x_values, pb.mu_weights, pb.y_values, pb.nu_weights, pb.martingale);
  if (!lp.feasible())
    throw infeasible_error(pb.martingale ? "martingale polytope empty: convex order fails"
                                         : "transport polytope empty");

  GridSolveResult out;

  if (cost.is_linear()) {
    std::vector<double> table(n * m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        table[i * m + j] = cost.linear_cost(pb.x_values[i], pb.y_values[j]);
    out.value = lp.minimize(table);
    out.joint = lp.extract_joint();
    out.gap = 0.0;
    out.iterations = 1;
    out.converged = true;
    if (opts.record_trace) out.trace.push_back({0, out.value, 0.0});
    return out;
  }

  std::vector<double> joint;
  if (opts.initial == InitialPoint::kRandomVertex) {
    SplitMix64 rng{opts.seed ^ 0xd1b54a32d192ed03ULL};
    std::vector<double> random_cost(n * m);
    for (double& c : random_cost) c = rng.uniform();
    lp.minimize(random_cost);
    joint = lp.extract_joint();
  } else {
    joint = lp.extract_joint();  // phase-1 feasible point
  }

  Objective objective(pb, cost);
  double value = objective.value(joint);
  std::vector<double> grad(n * m);
  double gap = std::numeric_limits<double>::infinity();
  long lmo_calls = 0;
  out.converged = false;

  for (long t = 0; t < opts.max_iterations; ++t) {
    objective.gradient(joint, grad);
    double lmo_value = lp.minimize(grad);
    ++lmo_calls;
    std::vector<double> vertex = lp.extract_joint();
    gap = compensated_dot(grad, joint) - lmo_value;
    if (opts.record_trace) out.trace.push_back({t, value, gap});
    if (gap <= opts.gap_tolerance) {
      out.converged = true;
      break;
    }
    double gamma = opts.step_rule == StepRule::kClassic
                       ? 2.0 / static_cast<double>(t + 2)
                       : objective.line_search(joint, vertex, opts.line_search_tol);
    if (gamma >= 1.0) {
      joint = std::move(vertex);
    } else {
      for (std::size_t k = 0; k < joint.size(); ++k)
        joint[k] = (1.0 - gamma) * joint[k] + gamma * vertex[k];
    }
    value = objective.value(joint);
  }

  if (!out.converged) {
    // certify the final iterate
    objective.gradient(joint, grad);
    double lmo_value = lp.minimize(grad);
    ++lmo_calls;
    gap = compensated_dot(grad, joint) - lmo_value;
    out.converged = gap <= opts.gap_tolerance;
    if (opts.record_trace) out.trace.push_back({opts.max_iterations, value, gap});
  }

  out.joint = std::move(joint);
  out.value = value;
  out.gap = gap;
  out.iterations = lmo_calls;
  return out;
}

double evaluate(const DiscreteCoupling& pi, const CostFunctional& cost) {
  KahanSum acc;
  for (std::size_t i = 0; i < pi.size(); ++i)
    acc.add(pi.source().weights()[i] * cost.value(pi.source().atoms()[i], pi.kernel(i)));
  return acc.value();
}

SolverReport solve_wmot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostFunctional& cost, const SolveOptions& opts) {
  GridProblem pb{mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), opts.martingale};
  GridSolveResult g = solve_wmot_grid(pb, cost, opts);

  SolverReport report(from_matrix(mu.atoms(), nu.atoms(), g.joint));
  // feasibility of the returned coupling
  DiscreteMeasure marginal = second_marginal(report.coupling);
  if (marginal.size() != nu.size()) throw numeric_error("solve_wmot: marginal support mismatch");
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (std::abs(marginal.atoms()[j] - nu.atoms()[j]) > kAtomMergeGap ||
        std::abs(marginal.weights()[j] - nu.weights()[j]) > kMartingaleTolerance)
      throw numeric_error("solve_wmot: second marginal out of tolerance");
  }
  if (opts.martingale && !is_martingale(report.coupling, kMartingaleTolerance))
    throw numeric_error("solve_wmot: martingale violation above tolerance");

  report.value = evaluate(report.coupling, cost);
  report.gap = g.gap;
  report.iterations = g.iterations;
  report.converged = g.converged;
  report.trace = std::move(g.trace);
  return report;
}

}  // namespace wmot
