#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wmot/couplings.hpp"
#include "wmot/errors.hpp"
#include "wmot/transport_lp.hpp"
#include "wmot/wmot_solver.hpp"

using namespace wmot;

TEST_SUITE_BEGIN("solver");

TEST_CASE("linear costs collapse to one LP call") {
  std::mt19937_64 rng(67);
  CostPtr c = linear_cost([](double x, double y) { return std::abs(x - y); });
  for (int t = 0; t < 15; ++t) {
    DiscreteMeasure mu = oracle::random_measure(rng, 4);
    DiscreteMeasure nu = oracle::dilation_of(mu, rng);
    SolverReport rep = solve_wmot(mu, nu, *c);
    std::vector<double> table(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < nu.size(); ++j)
        table[i * nu.size() + j] = std::abs(mu.atoms()[i] - nu.atoms()[j]);
    LPResult lp = solve_linear_mot(mu, nu, table);
    CHECK(rep.gap == 0.0);
    CHECK(rep.iterations == 1);
    CHECK(rep.value == doctest::Approx(lp.value).epsilon(1e-8));
  }
}

TEST_CASE("equal marginals: identity is the only coupling") {
  DiscreteMeasure m({-1.0, 0.0, 2.0}, {0.25, 0.5, 0.25});
  CostPtr c = gauss_anchor_cost(2.0);
  SolverReport rep = solve_wmot(m, m, *c);
  CHECK(rep.converged);
  double expect = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    expect += m.weights()[i] * (1.0 + m.atoms()[i] * m.atoms()[i]);
  CHECK(rep.value == doctest::Approx(expect).epsilon(1e-10));
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(rep.coupling.kernel(i).size() == 1);
    CHECK(rep.coupling.kernel(i).atoms()[0] == m.atoms()[i]);
  }
}

TEST_CASE("unique 2x2 polytope: value matches the hand computation") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::two_point(-2.0, 0.5, 2.0);
  CostPtr costs[] = {linear_cost([](double x, double y) { return (y - x) * (y - x); }),
                     gauss_anchor_cost(2.0)};
  for (const CostPtr& c : costs) {
    SolverReport rep = solve_wmot(mu, nu, *c);
    std::vector<double> k0{0.75, 0.25}, k1{0.25, 0.75};
    std::vector<double> ys{-2.0, 2.0};
    double expect = 0.5 * c->value_on_support(-1.0, ys, k0) +
                    0.5 * c->value_on_support(1.0, ys, k1);
    CHECK(rep.value == doctest::Approx(expect).epsilon(1e-9));
    CHECK(rep.coupling.kernel(0).weights()[0] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(rep.coupling.kernel(1).weights()[1] == doctest::Approx(0.75).epsilon(1e-9));
  }
}

TEST_CASE("martingale mode requires the convex order") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::point_mass(0.0);
  CostPtr c = gauss_anchor_cost(2.0);
  CHECK_THROWS_AS(solve_wmot(mu, nu, *c), infeasible_error);
}

TEST_CASE("wot mode relaxes the martingale constraint") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::point_mass(0.0);
  SolveOptions opts;
  opts.martingale = false;
  CostPtr c = gauss_anchor_cost(2.0);
  SolverReport rep = solve_wmot(mu, nu, *c, opts);
  CHECK(rep.converged);
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-8));  // kernels are delta_0
}

TEST_CASE("frank-wolfe reaches the gap tolerance and the gap bounds suboptimality") {
  std::mt19937_64 rng(71);
  CostPtr c = gauss_anchor_cost(2.0);
  for (int t = 0; t < 6; ++t) {
    DiscreteMeasure mu = oracle::random_measure(rng, 4);
    DiscreteMeasure nu = oracle::dilation_of(mu, rng);
    SolveOptions opts;
    opts.gap_tolerance = 1e-7;
    opts.record_trace = true;
    SolverReport rep = solve_wmot(mu, nu, *c, opts);
    CHECK(rep.converged);
    CHECK(rep.gap <= 1e-7);
    CHECK(rep.gap >= -1e-10);
    // objective trace nonincreasing under exact line search
    for (std::size_t k = 1; k < rep.trace.size(); ++k)
      CHECK(rep.trace[k].value <= rep.trace[k - 1].value + 1e-12);
  }
}

TEST_CASE("gap bounds the distance to the optimum on a singleton polytope") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-1.0, 0.5, 1.0);
  DiscreteMeasure nu = DiscreteMeasure::two_point(-2.0, 0.5, 2.0);
  CostPtr c = gauss_anchor_cost(2.0);
  SolverReport rep = solve_wmot(mu, nu, *c);
  std::vector<double> ys{-2.0, 2.0};
  double vstar = 0.5 * c->value_on_support(-1.0, ys, std::vector<double>{0.75, 0.25}) +
                 0.5 * c->value_on_support(1.0, ys, std::vector<double>{0.25, 0.75});
  CHECK(rep.value - vstar <= rep.gap + 1e-12);
}

TEST_CASE("strictly convex costs: random restarts land on the same optimizer") {
  std::mt19937_64 rng(73);
  CostPtr c = gauss_anchor_cost(2.0);
  for (int t = 0; t < 4; ++t) {
    DiscreteMeasure mu = oracle::random_measure(rng, 4);
    DiscreteMeasure nu = oracle::dilation_of(mu, rng);
    SolveOptions a;
    a.initial = InitialPoint::kRandomVertex;
    a.seed = 1000 + static_cast<unsigned>(t);
    SolveOptions b = a;
    b.seed = 9000 + static_cast<unsigned>(t);
    SolverReport ra = solve_wmot(mu, nu, *c, a);
    SolverReport rb = solve_wmot(mu, nu, *c, b);
    CHECK(std::abs(ra.value - rb.value) <= 2e-6);
    CHECK(adapted_wasserstein(ra.coupling, rb.coupling, 1.0) <= 1e-4);
  }
}

TEST_CASE("classic step rule also converges") {
  DiscreteMeasure mu = DiscreteMeasure::two_point(-0.5, 0.5, 0.5);
  DiscreteMeasure nu({-1.5, 0.0, 1.5}, {0.25, 0.5, 0.25});
  CostPtr c = gauss_anchor_cost(2.0);
  SolveOptions opts;
  opts.step_rule = StepRule::kClassic;
  opts.max_iterations = 20000;
  opts.gap_tolerance = 1e-5;
  SolverReport rep = solve_wmot(mu, nu, *c, opts);
  CHECK(rep.converged);
  SolverReport ls = solve_wmot(mu, nu, *c);
  CHECK(rep.value == doctest::Approx(ls.value).epsilon(1e-4));
}

TEST_CASE("objective is convex in the joint matrix") {
  std::mt19937_64 rng(79);
  DiscreteMeasure mu = oracle::random_measure(rng, 3);
  DiscreteMeasure nu = oracle::dilation_of(mu, rng);
  CostPtr c = gauss_anchor_cost(2.0);
  GridProblem pb{mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), true};
  TransportSimplex lp(mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), true);
  REQUIRE(lp.feasible());
  // two random vertices of the polytope
  auto vertex = [&](unsigned seed) {
    std::mt19937_64 r2(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> rc(mu.size() * nu.size());
    for (double& v : rc) v = u(r2);
    lp.minimize(rc);
    return lp.extract_joint();
  };
  auto value_of = [&](const std::vector<double>& joint) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      std::vector<double> w(nu.size());
      for (std::size_t j = 0; j < nu.size(); ++j) w[j] = joint[i * nu.size() + j] / mu.weights()[i];
      acc += mu.weights()[i] * c->value_on_support(mu.atoms()[i], nu.atoms(), w);
    }
    return acc;
  };
  for (int t = 0; t < 20; ++t) {
    auto a = vertex(100 + static_cast<unsigned>(t));
    auto b = vertex(7000 + static_cast<unsigned>(t));
    std::vector<double> mid(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) mid[k] = 0.5 * (a[k] + b[k]);
    CHECK(value_of(mid) <= 0.5 * value_of(a) + 0.5 * value_of(b) + 1e-10);
  }
}

TEST_CASE("evaluate sums kernel costs") {
  DiscreteMeasure m = DiscreteMeasure::point_mass(0.0);
  CostPtr g2 = gauss_anchor_cost(2.0);
  CHECK(evaluate(DiscreteCoupling::identity(m), *g2) == doctest::Approx(1.0).epsilon(1e-14));

  DiscreteCoupling fan = from_matrix(std::vector<double>{0.0}, std::vector<double>{-1.0, 1.0},
                                     std::vector<double>{0.5, 0.5});
  CostPtr lin = linear_cost([](double x, double y) { return std::abs(x - y); });
  CHECK(evaluate(fan, *lin) == doctest::Approx(1.0).epsilon(1e-14));

  DiscreteCoupling two = from_matrix(std::vector<double>{-1.0, 1.0},
                                     std::vector<double>{-2.0, 2.0},
                                     std::vector<double>{0.375, 0.125, 0.125, 0.375});
  CostPtr sq = linear_cost([](double x, double y) { return (y - x) * (y - x); });
  CHECK(evaluate(two, *sq) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_SUITE_END();
