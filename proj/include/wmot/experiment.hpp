#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wmot/laws.hpp"
#include "wmot/measures.hpp"

namespace wmot {

// Stability experiment: solve the same problem on a refining discretisation
// ladder and track value convergence and optimizer drift against the finest
// level.
struct ExperimentConfig {
  enum class Preset { kLognormal, kNormal, kCsv };
  Preset preset = Preset::kLognormal;
  double mean = 1.0;
  double sigma_mu = 0.15;  // dispersion of the first marginal
  double sigma_nu = 0.25;  // must exceed sigma_mu so the pair is ordered
  std::string mu_csv, nu_csv;
  QuantizeScheme scheme = QuantizeScheme::kBlockMean;
  std::vector<int> levels = {16, 64, 256, 1024};
  std::string cost_spec = "gauss:rho=2";
  std::uint64_t seed = 0;
  long max_iterations = 5000;
  double gap_tolerance = 1e-6;
  // wall-clock columns are volatile; excluded from outputs unless requested
  bool timings = false;
  std::string out_csv, out_json;

  static ExperimentConfig from_file(const std::string& path);
  std::string canonical_text() const;
};

struct ExperimentRow {
  int level = 0;
  double value = 0.0;
  double abs_diff_to_ref = 0.0;
  std::optional<double> aw1_to_ref;  // emitted for strictly convex costs only
  double wall_ms = 0.0;
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;
  std::uint64_t config_hash = 0;
  std::string version;

  std::string to_csv(bool timings) const;
  std::string to_json(bool timings) const;
};

ExperimentTable run_stability(const ExperimentConfig& config);

// The quantized pair at one level of the config's marginal family.
std::pair<DiscreteMeasure, DiscreteMeasure> quantized_pair(const ExperimentConfig& config,
                                                           int level);

}  // namespace wmot
