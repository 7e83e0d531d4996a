#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wmot/errors.hpp"
#include "wmot/measures.hpp"
#include "wmot/transport_lp.hpp"

using namespace wmot;

namespace {
std::vector<double> cost_table(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               const std::function<double(double, double)>& c) {
  std::vector<double> t(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      t[i * nu.size() + j] = c(mu.atoms()[i], nu.atoms()[j]);
  return t;
}
}  // namespace

TEST_SUITE_BEGIN("transport_lp");

TEST_CASE("single-cell problem") {
  DiscreteMeasure d0 = DiscreteMeasure::point_mass(0.0);
  LPResult res = solve_linear_ot(d0, d0, std::vector<double>{3.5});
  REQUIRE(res.status == LPStatus::kOptimal);
  CHECK(res.value == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(res.joint[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity optimal for matching marginals under |x-y|") {
  DiscreteMeasure m = DiscreteMeasure::two_point(0.0, 0.5, 1.0);
  auto cost = cost_table(m, m, [](double x, double y) { return std::abs(x - y); });
  LPResult res = solve_linear_ot(m, m, cost);
  REQUIRE(res.status == LPStatus::kOptimal);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(res.joint[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.joint[3] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("monotone plan for shifted marginals") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(0.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::two_point(2.0, 0.5, 3.0);
  auto cost = cost_table(mu, nu, [](double x, double y) { return std::abs(x - y); });
  LPResult res = solve_linear_ot(mu, nu, cost);
  REQUIRE(res.status == LPStatus::kOptimal);
  CHECK(res.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("martingale LP: equal marginals force the identity") {
  DiscreteMeasure m({-1.0, 0.5, 2.0}, {0.25, 0.5, 0.25});
  auto cost = cost_table(m, m, [](double x, double y) { return (y - x) * (y - x); });
  LPResult res = solve_linear_mot(m, m, cost);
  REQUIRE(res.status == LPStatus::kOptimal);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < m.size(); ++i)
    CHECK(res.joint[i * m.size() + i] == doctest::Approx(m.weights()[i]).epsilon(1e-10));
}

TEST_CASE("martingale LP: unique 2x2 coupling") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::two_point(-2.0, 0.5, 2.0);
  auto cost = cost_table(mu, nu, [](double x, double y) { return std::abs(x - y); });
  LPResult res = solve_linear_mot(mu, nu, cost);
  REQUIRE(res.status == LPStatus::kOptimal);
  // the barycenter equations pin the plan to [[3/8,1/8],[1/8,3/8]]
  CHECK(res.joint[0] == doctest::Approx(0.375).epsilon(1e-10));
  CHECK(res.joint[1] == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(res.joint[2] == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(res.joint[3] == doctest::Approx(0.375).epsilon(1e-10));
}

TEST_CASE("martingale LP infeasible when convex order fails") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::point_mass(0.0);
  auto cost = cost_table(mu, nu, [](double, double) { return 1.0; });
  LPResult res = solve_linear_mot(mu, nu, cost);
  CHECK(res.status == LPStatus::kInfeasible);
}

TEST_CASE("feasible_martingale_coupling") {
  DiscreteMeasure mu = DiscreteMeasure::point_mass(0.0);
  DiscreteMeasure nu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  auto pi = feasible_martingale_coupling(mu, nu);
  REQUIRE(pi.has_value());
  CHECK(pi->kernel(0).size() == 2);
  CHECK(is_martingale(*pi, 1e-9).martingale);

  DiscreteMeasure m({-1.0, 1.0}, {0.5, 0.5});
  auto ident = feasible_martingale_coupling(m, m);
  REQUIRE(ident.has_value());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(ident->kernel(i).size() == 1);
    CHECK(ident->kernel(i).atoms()[0] == m.atoms()[i]);
  }

  CHECK_FALSE(feasible_martingale_coupling(nu, mu).has_value());
}

TEST_CASE("duality and complementary slackness certificates") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 25; ++t) {
    DiscreteMeasure mu = oracle::random_measure(rng, 5);
    DiscreteMeasure nu = oracle::dilation_of(mu, rng);
    auto cost = cost_table(mu, nu, [](double x, double y) { return (y - x) * (y - x); });
    LPResult res = solve_linear_mot(mu, nu, cost);
    REQUIRE(res.status == LPStatus::kOptimal);
    CHECK(res.primal_residual <= 1e-9);
    CHECK(res.compl_slackness <= 1e-7);
    CHECK(std::abs(res.value - res.dual_value) <= 1e-7);
    // basic solutions are sparse
    std::size_t nnz = 0;
    for (double v : res.joint) nnz += v > 1e-12;
    CHECK(nnz <= mu.size() + nu.size() + mu.size() - 1);
  }
}

TEST_CASE("solver matches exhaustive vertex enumeration on small grids") {
  std::mt19937_64 rng(211);
  int done = 0;
  while (done < 40) {
    DiscreteMeasure mu = oracle::random_measure(rng, 3);
    DiscreteMeasure nu = oracle::dilation_of(mu, rng);
    if (mu.size() + nu.size() > 8) continue;
    auto cost = cost_table(mu, nu, [](double x, double y) { return std::abs(y - x); });
    oracle::EnumResult ref = oracle::enumerate_transport_min(
        mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), cost, true);
    LPResult res = solve_linear_mot(mu, nu, cost);
    REQUIRE(ref.feasible);
    REQUIRE(res.status == LPStatus::kOptimal);
    CHECK(res.value == doctest::Approx(ref.value).epsilon(1e-9));
    ++done;
  }
}

TEST_CASE("feasibility matches the convex order test on random pairs") {
  std::mt19937_64 rng(307);
  int agree = 0, total = 0;
  while (total < 300) {
    DiscreteMeasure mu = oracle::random_measure(rng, 4);
    DiscreteMeasure nu = (total % 2 == 0) ? oracle::dilation_of(mu, rng)
                                          : oracle::random_measure(rng, 4);
    // keep clear of the tolerance knife edge
    auto order = check_convex_order(mu, nu, 1e-9);
    double margin = std::abs(order.mean_gap);
    if (!order.ordered && margin < 1e-7 && order.worst_violation < 1e-7) continue;
    TransportSimplex lp(mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), true);
    bool lp_feasible = lp.feasible();
    ++total;
    agree += lp_feasible == order.ordered;
  }
  CHECK(agree == total);
}

TEST_CASE("warm restarts reuse the basis across cost changes") {
  std::mt19937_64 rng(401);
  DiscreteMeasure mu = oracle::random_measure(rng, 6);
  DiscreteMeasure nu = oracle::dilation_of(mu, rng);
  TransportSimplex lp(mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), true);
  for (int t = 0; t < 5; ++t) {
    double p = 1.0 + t;
    auto cost = cost_table(mu, nu, [p](double x, double y) { return std::pow(std::abs(y - x), p); });
    double warm = lp.minimize(cost);
    LPResult cold = solve_linear_mot(mu, nu, cost);
    CHECK(warm == doctest::Approx(cold.value).epsilon(1e-9));
  }
}

TEST_SUITE_END();
