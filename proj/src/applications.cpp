#include "wmot/applications.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wmot/costs.hpp"
#include "wmot/errors.hpp"
#include "wmot/normal.hpp"
#include "wmot/numeric.hpp"
#include "wmot/parallel.hpp"

namespace wmot {

namespace {
void require_positive(const DiscreteMeasure& m, const char* name) {
  if (m.atoms().front() <= 0.0)
    throw std::domain_error(std::string(name) + ": atoms must be strictly positive");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Stream {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform on (0,1): never returns 0 so quantile transforms stay in-domain
  double uniform_open() {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }
  double gaussian() { return normal_quantile(uniform_open()); }
};
}  // namespace

VixResult vix_superreplication(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                               double delta, SolveOptions opts) {
  require_positive(mu, "vix_superreplication mu");
  require_positive(nu, "vix_superreplication nu");
  if (!(delta > 0.0)) throw std::domain_error("vix_superreplication: delta <= 0");
  opts.martingale = true;
  CostPtr cost = vix_cost({delta});
  VixResult res{solve_wmot(mu, nu, *cost, opts)};
  res.d_super = 0.0 - res.report.value;
  return res;
}

SbmModel sbm_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, SolveOptions opts) {
  opts.martingale = true;
  CostPtr cost = gauss_anchor_cost(2.0);
  SbmModel model{solve_wmot(mu, nu, *cost, opts)};
  model.value = model.report.value;
  model.mt_value = 0.5 * (1.0 + nu.second_moment() - model.value);
  model.z_grids.reserve(model.report.coupling.size());
  for (const DiscreteMeasure& kernel : model.report.coupling.kernels()) {
    std::vector<double> z(kernel.size());
    for (std::size_t j = 0; j + 1 < kernel.size(); ++j)
      z[j] = normal_quantile(kernel.cumulative()[j]);
    z.back() = std::numeric_limits<double>::infinity();
    model.z_grids.push_back(std::move(z));
  }
  return model;
}

PathEnsemble sbm_simulate(const SbmModel& model, std::vector<double> times,
                          std::size_t n_paths, std::uint64_t seed) {
  if (times.size() < 2 || times.front() != 0.0 || times.back() != 1.0 ||
      !std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("sbm_simulate: grid must be sorted, start at 0 and end at 1");
  const DiscreteCoupling& pi = model.report.coupling;
  const std::size_t grid = times.size();

  PathEnsemble ens;
  ens.times = std::move(times);
  ens.source_index.resize(n_paths);
  ens.brownian.assign(n_paths * grid, 0.0);
  ens.values.assign(n_paths * grid, 0.0);

  // dedicated substream for the initial positions: path counts per source
  // atom do not depend on the grid
  {
    Stream xs{mix_seed(seed, 0xA11CE5)};
    const auto& cum = pi.source().cumulative();
    for (std::size_t p = 0; p < n_paths; ++p) {
      double u = xs.uniform_open();
      auto it = std::lower_bound(cum.begin(), cum.end(), u);
      ens.source_index[p] = static_cast<std::size_t>(it - cum.begin());
    }
  }

  const double* t = ens.times.data();
  par::parallel_for(n_paths, [&](std::size_t p) {
    Stream bs{mix_seed(seed, p + 1)};
    const std::size_t i = ens.source_index[p];
    const DiscreteMeasure& kernel = pi.kernel(i);
    const std::vector<double>& z = model.z_grids[i];
    double* bout = ens.brownian.data() + p * grid;
    double* mout = ens.values.data() + p * grid;

    double b = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
      if (k > 0) b += std::sqrt(t[k] - t[k - 1]) * bs.gaussian();
      bout[k] = b;
      if (1.0 - t[k] < 1e-12) {
        double u = std::max(normal_cdf(b), 1e-300);
        mout[k] = kernel.quantile(u);
        continue;
      }
      double inv_sd = 1.0 / std::sqrt(1.0 - t[k]);
      KahanSum m;
      double cdf_prev = 0.0;
      for (std::size_t j = 0; j < kernel.size(); ++j) {
        double cdf_cur = j + 1 == kernel.size() ? 1.0 : normal_cdf((z[j] - b) * inv_sd);
        m.add(kernel.atoms()[j] * (cdf_cur - cdf_prev));
        cdf_prev = cdf_cur;
      }
      mout[k] = m.value();
    }
  });
  return ens;
}

ProcessBound sbm_process_bound(const SbmModel& a, const SbmModel& b, double r) {
  if (r < 2.0) throw std::domain_error("sbm_process_bound: r < 2");
  ProcessBound res;
  res.endpoint_aw = adapted_wasserstein(a.report.coupling, b.report.coupling, r);
  res.bound = std::pow(r / (r - 1.0), r) * std::pow(res.endpoint_aw, r);
  return res;
}

}  // namespace wmot
