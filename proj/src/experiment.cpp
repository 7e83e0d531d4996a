#include "wmot/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wmot/couplings.hpp"
#include "wmot/errors.hpp"
#include "wmot/io.hpp"
#include "wmot/parallel.hpp"
#include "wmot/wmot_solver.hpp"

namespace wmot {

namespace {
constexpr const char* kVersion = "wmot 0.1.0";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int pool_workers(std::size_t jobs) {
  int budget = par::thread_budget();
  int workers;
  if (budget == 0)
    workers = 1;
  else if (budget > 0)
    workers = budget;
  else
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  return std::min<int>(workers, static_cast<int>(jobs));
}

// fan jobs out to a small worker pool; each job writes only its own slot
void pool_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  int workers = pool_workers(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}
}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  auto kv = io::load_key_value(path);
  ExperimentConfig cfg;
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = take("preset")) {
    if (*v == "lognormal")
      cfg.preset = Preset::kLognormal;
    else if (*v == "normal")
      cfg.preset = Preset::kNormal;
    else if (*v == "csv")
      cfg.preset = Preset::kCsv;
    else
      throw std::invalid_argument("config: unknown preset '" + *v + "'");
  }
  if (auto v = take("mean")) cfg.mean = std::stod(*v);
  if (auto v = take("sigma_mu")) cfg.sigma_mu = std::stod(*v);
  if (auto v = take("sigma_nu")) cfg.sigma_nu = std::stod(*v);
  if (auto v = take("mu_csv")) cfg.mu_csv = *v;
  if (auto v = take("nu_csv")) cfg.nu_csv = *v;
  if (auto v = take("scheme")) {
    if (*v == "block-mean")
      cfg.scheme = QuantizeScheme::kBlockMean;
    else if (*v == "quantile")
      cfg.scheme = QuantizeScheme::kQuantile;
    else
      throw std::invalid_argument("config: unknown scheme '" + *v + "'");
  }
  if (auto v = take("levels")) {
    cfg.levels.clear();
    std::istringstream ss(*v);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.levels.push_back(std::stoi(tok));
  }
  if (auto v = take("cost")) cfg.cost_spec = *v;
  if (auto v = take("seed")) cfg.seed = std::stoull(*v);
  if (auto v = take("max_iterations")) cfg.max_iterations = std::stol(*v);
  if (auto v = take("gap_tolerance")) cfg.gap_tolerance = std::stod(*v);
  if (auto v = take("timings")) cfg.timings = *v == "true" || *v == "1";
  if (auto v = take("out_csv")) cfg.out_csv = *v;
  if (auto v = take("out_json")) cfg.out_json = *v;

  if (cfg.levels.empty()) throw std::invalid_argument("config: empty level list");
  for (std::size_t i = 1; i < cfg.levels.size(); ++i)
    if (cfg.levels[i] <= cfg.levels[i - 1])
      throw std::invalid_argument("config: levels must be strictly increasing");
  if (cfg.preset != Preset::kCsv && !(cfg.sigma_mu < cfg.sigma_nu))
    throw std::invalid_argument("config: preset pair needs sigma_mu < sigma_nu");
  if (cfg.preset == Preset::kCsv && (cfg.mu_csv.empty() || cfg.nu_csv.empty()))
    throw std::invalid_argument("config: csv preset needs mu_csv and nu_csv");
  return cfg;
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  out << "preset="
      << (preset == Preset::kLognormal ? "lognormal"
                                       : (preset == Preset::kNormal ? "normal" : "csv"))
      << "\nmean=" << format_double(mean) << "\nsigma_mu=" << format_double(sigma_mu)
      << "\nsigma_nu=" << format_double(sigma_nu) << "\nmu_csv=" << mu_csv
      << "\nnu_csv=" << nu_csv
      << "\nscheme=" << (scheme == QuantizeScheme::kBlockMean ? "block-mean" : "quantile")
      << "\nlevels=";
  for (std::size_t i = 0; i < levels.size(); ++i) out << (i ? "," : "") << levels[i];
  out << "\ncost=" << cost_spec << "\nseed=" << seed << "\nmax_iterations=" << max_iterations
      << "\ngap_tolerance=" << format_double(gap_tolerance) << "\n";
  return out.str();
}

std::pair<DiscreteMeasure, DiscreteMeasure> quantized_pair(const ExperimentConfig& config,
                                                           int level) {
  switch (config.preset) {
    case ExperimentConfig::Preset::kLognormal: {
      ParametricLaw mu = ParametricLaw::lognormal_with_mean(config.mean, config.sigma_mu);
      ParametricLaw nu = ParametricLaw::lognormal_with_mean(config.mean, config.sigma_nu);
      return {quantize(mu, level, config.scheme), quantize(nu, level, config.scheme)};
    }
    case ExperimentConfig::Preset::kNormal: {
      ParametricLaw mu = ParametricLaw::normal(config.mean, config.sigma_mu);
      ParametricLaw nu = ParametricLaw::normal(config.mean, config.sigma_nu);
      return {quantize(mu, level, config.scheme), quantize(nu, level, config.scheme)};
    }
    case ExperimentConfig::Preset::kCsv: {
      DiscreteMeasure mu = io::load_measure_csv(config.mu_csv);
      DiscreteMeasure nu = io::load_measure_csv(config.nu_csv);
      return {block_mean_quantize(mu, level), block_mean_quantize(nu, level)};
    }
  }
  throw std::logic_error("unreachable");
}

ExperimentTable run_stability(const ExperimentConfig& config) {
  CostPtr cost = io::parse_cost(config.cost_spec);
  const std::size_t n_levels = config.levels.size();

  struct LevelOutcome {
    std::optional<SolverReport> report;
    double wall_ms = 0.0;
  };
  std::vector<LevelOutcome> outcomes(n_levels);

  pool_for(n_levels, [&](std::size_t idx) {
    int level = config.levels[idx];
    auto [mu_n, nu_n] = quantized_pair(config, level);
    ConvexOrderResult order = check_convex_order(mu_n, nu_n, 1e-10);
    if (!order)
      throw numeric_error("stability: quantized pair not in convex order at level " +
                          std::to_string(level) + " (violation " +
                          std::to_string(order.worst_violation) + ")");
    SolveOptions opts;
    opts.martingale = true;
    opts.max_iterations = config.max_iterations;
    opts.gap_tolerance = config.gap_tolerance;
    opts.seed = config.seed;
    auto t0 = std::chrono::steady_clock::now();
    SolverReport report = solve_wmot(mu_n, nu_n, *cost, opts);
    auto t1 = std::chrono::steady_clock::now();
    outcomes[idx].wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    outcomes[idx].report = std::move(report);
  });

  const SolverReport& ref = *outcomes.back().report;
  const bool aw_column = cost->strictly_convex_in_p();

  std::vector<std::optional<double>> aw(n_levels);
  if (aw_column) {
    pool_for(n_levels, [&](std::size_t idx) {
      aw[idx] = adapted_wasserstein(outcomes[idx].report->coupling, ref.coupling, 1.0);
    });
  }

  ExperimentTable table;
  table.version = kVersion;
  table.config_hash = fnv1a(config.canonical_text());
  table.rows.reserve(n_levels);
  for (std::size_t idx = 0; idx < n_levels; ++idx) {
    ExperimentRow row;
    row.level = config.levels[idx];
    row.value = outcomes[idx].report->value;
    row.abs_diff_to_ref = std::abs(row.value - ref.value);
    row.aw1_to_ref = aw[idx];
    row.wall_ms = outcomes[idx].wall_ms;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ExperimentTable::to_csv(bool timings) const {
  std::ostringstream out;
  out << "n,value,abs_diff_to_ref,aw1_to_ref";
  if (timings) out << ",wall_ms";
  out << '\n';
  for (const ExperimentRow& r : rows) {
    out << r.level << ',' << format_double(r.value) << ',' << format_double(r.abs_diff_to_ref)
        << ',' << (r.aw1_to_ref ? format_double(*r.aw1_to_ref) : "");
    if (timings) out << ',' << format_double(r.wall_ms);
    out << '\n';
  }
  return out.str();
}

std::string ExperimentTable::to_json(bool timings) const {
  nlohmann::json j;
  j["version"] = version;
  j["config_hash"] = config_hash;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ExperimentRow& r : rows) {
    nlohmann::json row;
    row["n"] = r.level;
    row["value"] = r.value;
    row["abs_diff_to_ref"] = r.abs_diff_to_ref;
    if (r.aw1_to_ref) row["aw1_to_ref"] = *r.aw1_to_ref;
    if (timings) row["wall_ms"] = r.wall_ms;
    rows_json.push_back(std::move(row));
  }
  j["rows"] = std::move(rows_json);
  return j.dump(2);
}

}  // namespace wmot
