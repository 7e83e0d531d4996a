#pragma once

#include <map>
#include <string>

#include "wmot/costs.hpp"
#include "wmot/couplings.hpp"
#include "wmot/measures.hpp"
#include "wmot/wmot_solver.hpp"

namespace wmot::io {

// Measure CSV: header line "atom,weight", one row per atom, '.' decimal
// separator. The loader validates invariants and merges duplicates.
DiscreteMeasure load_measure_csv(const std::string& path);
void save_measure_csv(const DiscreteMeasure& m, const std::string& path);

// Coupling JSON: {"x_atoms": [...], "mu_weights": [...], "kernels":
// [{"atoms": [...], "weights": [...]}, ...]}; round-trips bit-exactly.
DiscreteCoupling load_coupling_json(const std::string& path);
std::string coupling_to_json(const DiscreteCoupling& pi);
void save_coupling_json(const DiscreteCoupling& pi, const std::string& path);

std::string report_to_json(const SolverReport& report);
void save_report_json(const SolverReport& report, const std::string& path);
void save_trace_csv(const SolverReport& report, const std::string& path);

// Cost selector strings: "linear:absdiff", "linear:sqdiff", "linear:forward",
// "linear:abspow=<p>", "linear:csv=<path>" (rows "x,y,cost"),
// "vix:delta=<float>", "gauss:rho=<float>".
CostPtr parse_cost(const std::string& spec);

// Plain "key = value" config files; '#' starts a comment.
std::map<std::string, std::string> load_key_value(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace wmot::io
