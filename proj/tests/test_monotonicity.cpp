#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wmot/monotonicity.hpp"
#include "wmot/transport_lp.hpp"
#include "wmot/wmot_solver.hpp"

using namespace wmot;

TEST_SUITE_BEGIN("monotonicity");

TEST_CASE("singleton support is always monotone") {
  SupportSet s;
  s.x_values = {0.0};
  s.kernels = {DiscreteMeasure::two_point(-1.0, 0.5, 1.0)};
  CostPtr c = gauss_anchor_cost(2.0);
  MonotonicityReport rep = check_martingale_c_monotone(s, *c);
  CHECK(rep.monotone);
  CHECK(rep.improvement == 0.0);
}

TEST_CASE("support of the unique 2x2 coupling is monotone for any cost") {
  SupportSet s;
  s.x_values = {-1.0, 1.0};
  s.kernels = {DiscreteMeasure({-2.0, 2.0}, {0.75, 0.25}),
               DiscreteMeasure({-2.0, 2.0}, {0.25, 0.75})};
  CostPtr costs[] = {gauss_anchor_cost(2.0),
                     linear_cost([](double x, double y) { return std::abs(x - y); })};
  for (const CostPtr& c : costs) {
    MonotonicityReport rep = check_martingale_c_monotone(s, *c);
    CHECK(rep.monotone);
    CHECK(rep.improvement <= 1e-10);
  }
}

TEST_CASE("barycenter mismatch is rejected") {
  SupportSet s;
  s.x_values = {0.5};
  s.kernels = {DiscreteMeasure::two_point(-1.0, 0.5, 1.0)};  // barycenter 0
  CostPtr c = gauss_anchor_cost(2.0);
  CHECK_THROWS_AS(check_martingale_c_monotone(s, *c), std::invalid_argument);
}

TEST_CASE("solver optimizers pass, feasible perturbations fail") {
  std::mt19937_64 rng(109);
  CostPtr c = gauss_anchor_cost(2.0);
  DiscreteMeasure mu({-1.0, 0.0, 1.0}, {0.3, 0.4, 0.3});
  DiscreteMeasure nu = oracle::dilation_of(mu, rng, 1.2);
  SolverReport rep = solve_wmot(mu, nu, *c);
  CHECK(rep.converged);

  MonotonicityReport pass = check_coupling_c_monotone(rep.coupling, *c, 2e-6);
  CHECK(pass.monotone);
  CHECK(pass.improvement <= 2e-6);

  // move mass along a feasible martingale direction: mix the optimizer with
  // another vertex of the same polytope
  TransportSimplex lp(mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), true);
  REQUIRE(lp.feasible());
  std::vector<double> rc(mu.size() * nu.size());
  std::mt19937_64 r2(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> base = [&] {
    // densify the optimizer onto the full grid
    std::vector<double> joint(mu.size() * nu.size(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto& k = rep.coupling.kernel(i);
      for (std::size_t j = 0; j < k.size(); ++j) {
        auto it = std::lower_bound(nu.atoms().begin(), nu.atoms().end(), k.atoms()[j] - 1e-12);
        joint[i * nu.size() + static_cast<std::size_t>(it - nu.atoms().begin())] =
            rep.coupling.source().weights()[i] * k.weights()[j];
      }
    }
    return joint;
  }();
  for (int attempt = 0; attempt < 20; ++attempt) {
    for (double& v : rc) v = u(r2);
    lp.minimize(rc);
    std::vector<double> other = lp.extract_joint();
    double l1 = 0.0;
    for (std::size_t k = 0; k < other.size(); ++k) l1 += std::abs(other[k] - base[k]);
    if (l1 < 0.2) continue;  // same vertex, try another direction
    double eps = 0.05 / (0.5 * l1);  // move mass 0.05
    if (eps > 1.0) eps = 1.0;
    std::vector<double> perturbed(base.size());
    for (std::size_t k = 0; k < base.size(); ++k)
      perturbed[k] = (1.0 - eps) * base[k] + eps * other[k];
    DiscreteCoupling pi = from_matrix(mu.atoms(), nu.atoms(), perturbed);
    MonotonicityReport fail = check_coupling_c_monotone(pi, *c, 1e-6);
    CHECK_FALSE(fail.monotone);
    CHECK(fail.improvement > 1e-4);
    REQUIRE(fail.competitor.has_value());
    CHECK(fail.competitor->size() == mu.size());
    return;
  }
  FAIL("no distinct vertex found for the perturbation");
}

TEST_CASE("duplicate source values stay distinct rows") {
  // two pairs share x = 0 but carry different kernels; merging rows would
  // change the feasible set of the check
  SupportSet s;
  s.x_values = {0.0, 0.0};
  s.kernels = {DiscreteMeasure::two_point(-1.0, 0.5, 1.0),
               DiscreteMeasure::two_point(-2.0, 0.5, 2.0)};
  CostPtr c = gauss_anchor_cost(2.0);
  MonotonicityReport rep = check_martingale_c_monotone(s, *c);
  // the aggregated problem may rebalance across the two rows
  CHECK(rep.current_cost >= rep.optimal_cost - 1e-12);
}

TEST_CASE("finite optimality agrees with the LP on random instances") {
  std::mt19937_64 rng(113);
  CostPtr c = linear_cost([](double x, double y) { return std::abs(x - y); });
  for (int t = 0; t < 30; ++t) {
    DiscreteMeasure mu = oracle::random_measure(rng, 3);
    DiscreteMeasure nu = oracle::dilation_of(mu, rng);
    std::vector<double> table(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j)
        table[i * nu.size() + j] = std::abs(mu.atoms()[i] - nu.atoms()[j]);
    LPResult lp = solve_linear_mot(mu, nu, table);
    REQUIRE(lp.status == LPStatus::kOptimal);
    DiscreteCoupling opt = from_matrix(mu.atoms(), nu.atoms(), lp.joint);
    FiniteOptimalityReport rep = check_finite_optimality(opt, *c);
    CHECK(rep.optimal);
    CHECK(rep.improvement <= 1e-7);
  }
}

TEST_CASE("finite optimality rejects a suboptimal feasible coupling") {
  DiscreteMeasure mu({-1.0, 0.0, 1.0}, {0.25, 0.5, 0.25});
  DiscreteMeasure nu({-2.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
  // convex cost in y-x: the LP optimum differs from this feasible coupling
  CostPtr c = linear_cost([](double x, double y) {
    double d = y - x;
    return d * d * d * d;
  });
  // feasible but antitone-leaning: middle row spreads while outer rows hedge
  std::vector<double> joint{
      0.375, 0.0,  0.125,  // barycenter -1: (-2)*.375/.5... checked below
      0.0,   0.5,  0.0,    //
      0.125, 0.0,  0.375};
  // fix masses: rows must sum to mu and barycenters must match
  // row 0: weights (a, 0, b) with a+b = 0.25, (-2a + 2b)/0.25 = -1 -> a = 0.1875, b = 0.0625
  joint = {0.1875, 0.0, 0.0625, 0.0, 0.5, 0.0, 0.0625, 0.0, 0.1875};
  DiscreteCoupling pi = from_matrix(mu.atoms(), nu.atoms(), joint);
  REQUIRE(is_martingale(pi, 1e-9).martingale);
  FiniteOptimalityReport rep = check_finite_optimality(pi, *c);
  std::vector<double> table(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) {
      double d = nu.atoms()[j] - mu.atoms()[i];
      table[i * nu.size() + j] = d * d * d * d;
    }
  LPResult lp = solve_linear_mot(mu, nu, table);
  double current = evaluate(pi, *c);
  CHECK(rep.improvement == doctest::Approx(current - lp.value).epsilon(1e-7));
  if (current - lp.value > 1e-7) CHECK_FALSE(rep.optimal);
}

TEST_SUITE_END();
