// Serial reference vs OpenMP kernels on representative sizes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wmot/costs.hpp"
#include "wmot/couplings.hpp"
#include "wmot/laws.hpp"
#include "wmot/parallel.hpp"
#include "wmot/transport_lp.hpp"

using namespace wmot;

namespace {

DiscreteCoupling make_coupling(int n) {
  DiscreteMeasure mu = quantize(ParametricLaw::normal(0.0, 1.0), n);
  DiscreteMeasure nu = quantize(ParametricLaw::normal(0.0, 1.5), n);
  auto pi = feasible_martingale_coupling(mu, nu);
  return *pi;
}

std::vector<double> dense_joint(const DiscreteCoupling& pi, const DiscreteMeasure& nu) {
  std::vector<double> joint(pi.size() * nu.size(), 0.0);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const auto& k = pi.kernel(i);
    for (std::size_t j = 0; j < k.size(); ++j) {
      auto it = std::lower_bound(nu.atoms().begin(), nu.atoms().end(), k.atoms()[j] - 1e-12);
      joint[i * nu.size() + static_cast<std::size_t>(it - nu.atoms().begin())] =
          pi.source().weights()[i] * k.weights()[j];
    }
  }
  return joint;
}

void BM_aw_cost_serial(benchmark::State& state) {
  DiscreteCoupling a = make_coupling(static_cast<int>(state.range(0)));
  DiscreteCoupling b = make_coupling(static_cast<int>(state.range(0)) + 1);
  std::vector<double> out(a.size() * b.size());
  for (auto _ : state) {
    par::aw_cost_matrix_serial(a, b, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_aw_cost_omp(benchmark::State& state) {
  DiscreteCoupling a = make_coupling(static_cast<int>(state.range(0)));
  DiscreteCoupling b = make_coupling(static_cast<int>(state.range(0)) + 1);
  std::vector<double> out(a.size() * b.size());
  for (auto _ : state) {
    par::aw_cost_matrix(a, b, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_gradient_serial(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  DiscreteMeasure mu = quantize(ParametricLaw::normal(0.0, 1.0), n);
  DiscreteMeasure nu = quantize(ParametricLaw::normal(0.0, 1.5), n);
  DiscreteCoupling pi = *feasible_martingale_coupling(mu, nu);
  std::vector<double> joint = dense_joint(pi, nu);
  CostPtr cost = gauss_anchor_cost(2.0);
  std::vector<double> grad(joint.size());
  for (auto _ : state) {
    par::gradient_matrix_serial(*cost, mu.atoms(), nu.atoms(), mu.weights(), joint, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

void BM_gradient_omp(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  DiscreteMeasure mu = quantize(ParametricLaw::normal(0.0, 1.0), n);
  DiscreteMeasure nu = quantize(ParametricLaw::normal(0.0, 1.5), n);
  DiscreteCoupling pi = *feasible_martingale_coupling(mu, nu);
  std::vector<double> joint = dense_joint(pi, nu);
  CostPtr cost = gauss_anchor_cost(2.0);
  std::vector<double> grad(joint.size());
  for (auto _ : state) {
    par::gradient_matrix(*cost, mu.atoms(), nu.atoms(), mu.weights(), joint, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

}  // namespace

BENCHMARK(BM_aw_cost_serial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_aw_cost_omp)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_serial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gradient_omp)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
