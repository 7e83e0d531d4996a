// Command-line front end: weak (martingale) optimal transport solves,
// convex-order checks, adapted distances, VIX bounds, stretched Brownian
// motion simulation, optimality checks and the stability experiment.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "wmot/applications.hpp"
#include "wmot/couplings.hpp"
#include "wmot/errors.hpp"
#include "wmot/experiment.hpp"
#include "wmot/io.hpp"
#include "wmot/laws.hpp"
#include "wmot/measures.hpp"
#include "wmot/monotonicity.hpp"
#include "wmot/transport_lp.hpp"
#include "wmot/wmot_solver.hpp"

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

wmot::ParametricLaw parse_family(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::istringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  }
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw std::invalid_argument("family '" + kind + "' needs " + std::to_string(n) +
                                  " parameters");
  };
  if (kind == "normal") {
    need(2);
    return wmot::ParametricLaw::normal(args[0], args[1]);
  }
  if (kind == "lognormal") {
    need(2);
    return wmot::ParametricLaw::lognormal(args[0], args[1]);
  }
  if (kind == "lognormal-mean") {
    need(2);
    return wmot::ParametricLaw::lognormal_with_mean(args[0], args[1]);
  }
  if (kind == "uniform") {
    need(2);
    return wmot::ParametricLaw::uniform(args[0], args[1]);
  }
  if (kind == "two-point") {
    need(3);
    return wmot::ParametricLaw::two_point(args[0], args[1], args[2]);
  }
  throw std::invalid_argument("unknown family: " + kind);
}

int run(int argc, char** argv) {
  CLI::App app{"discrete weak martingale optimal transport toolkit"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "solve a WMOT/WOT problem");
  std::string mu_path, nu_path, cost_spec = "gauss:rho=2", out_path, trace_path;
  bool wot_mode = false;
  long max_iter = 5000;
  double gap_tol = 1e-6;
  std::string step_rule = "linesearch";
  unsigned long long seed = 0;
  solve->add_option("--mu", mu_path, "first marginal CSV")->required();
  solve->add_option("--nu", nu_path, "second marginal CSV")->required();
  solve->add_option("--cost", cost_spec, "cost spec (linear:…|vix:…|gauss:…)");
  solve->add_flag("--wot", wot_mode, "drop the martingale constraint");
  solve->add_option("--max-iter", max_iter);
  solve->add_option("--gap-tol", gap_tol);
  solve->add_option("--step", step_rule, "linesearch|classic");
  solve->add_option("--seed", seed);
  solve->add_option("--out", out_path, "report JSON path");
  solve->add_option("--trace", trace_path, "per-iteration CSV path");

  // ---- check-order ----
  auto* order = app.add_subcommand("check-order", "test mu <=_c nu");
  std::string o_mu, o_nu;
  double o_tol = wmot::kOrderTolerance;
  order->add_option("--mu", o_mu)->required();
  order->add_option("--nu", o_nu)->required();
  order->add_option("--tol", o_tol);

  // ---- aw-dist ----
  auto* awd = app.add_subcommand("aw-dist", "adapted Wasserstein distance of two couplings");
  std::string a_path, b_path;
  double aw_r = 1.0;
  awd->add_option("--a", a_path)->required();
  awd->add_option("--b", b_path)->required();
  awd->add_option("--r", aw_r);

  // ---- vix ----
  auto* vix = app.add_subcommand("vix", "VIX future superreplication bound");
  std::string v_mu, v_nu, v_out;
  double v_delta = 30.0 / 365.0;
  vix->add_option("--mu", v_mu)->required();
  vix->add_option("--nu", v_nu)->required();
  vix->add_option("--delta", v_delta, "horizon T2-T1 (bound scales as delta^-1/2)");
  vix->add_option("--out", v_out, "report JSON path");

  // ---- sbm ----
  auto* sbm = app.add_subcommand("sbm", "stretched Brownian motion simulation");
  std::string s_mu, s_nu, s_out;
  std::size_t s_paths = 1000;
  int s_grid = 21;
  unsigned long long s_seed = 0;
  sbm->add_option("--mu", s_mu)->required();
  sbm->add_option("--nu", s_nu)->required();
  sbm->add_option("--paths", s_paths);
  sbm->add_option("--grid", s_grid, "number of grid points on [0,1]");
  sbm->add_option("--seed", s_seed);
  sbm->add_option("--out", s_out, "path CSV (path_id,t,value)");

  // ---- monotone-check ----
  auto* mono = app.add_subcommand("monotone-check", "optimality check for a coupling");
  std::string m_coupling, m_cost = "gauss:rho=2", m_out;
  double m_gap_tol = wmot::kMonotoneGapTol;
  mono->add_option("--coupling", m_coupling)->required();
  mono->add_option("--cost", m_cost);
  mono->add_option("--gap-tol", m_gap_tol);
  mono->add_option("--out", m_out);

  // ---- stability ----
  auto* stab = app.add_subcommand("stability", "discretisation stability experiment");
  std::string cfg_path, stab_csv, stab_json;
  bool stab_timings = false;
  stab->add_option("--config", cfg_path, "key = value config file")->required();
  stab->add_option("--out-csv", stab_csv, "override config out_csv");
  stab->add_option("--out-json", stab_json, "override config out_json");
  stab->add_flag("--timings", stab_timings, "emit wall-clock column (non-deterministic)");

  // ---- quantize ----
  auto* quant = app.add_subcommand("quantize", "discretise a parametric law");
  std::string q_family, q_scheme = "block-mean", q_out;
  int q_n = 16;
  double q_u = 0.5;
  unsigned long long q_seed = 0;
  bool q_random_u = false;
  quant->add_option("--family", q_family, "normal:m,s | lognormal:m,s | lognormal-mean:mean,s | uniform:a,b | two-point:x0,w0,x1")
      ->required();
  quant->add_option("--n", q_n)->required();
  quant->add_option("--scheme", q_scheme, "block-mean|quantile");
  quant->add_option("--u", q_u, "quantile-scheme offset in (0,1)");
  quant->add_flag("--random-u", q_random_u, "draw the offset from --seed");
  quant->add_option("--seed", q_seed);
  quant->add_option("--out", q_out, "measure CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    wmot::DiscreteMeasure mu = wmot::io::load_measure_csv(mu_path);
    wmot::DiscreteMeasure nu = wmot::io::load_measure_csv(nu_path);
    wmot::CostPtr cost = wmot::io::parse_cost(cost_spec);
    wmot::SolveOptions opts;
    opts.martingale = !wot_mode;
    opts.max_iterations = max_iter;
    opts.gap_tolerance = gap_tol;
    opts.seed = seed;
    opts.record_trace = !trace_path.empty();
    if (step_rule == "classic")
      opts.step_rule = wmot::StepRule::kClassic;
    else if (step_rule != "linesearch")
      throw std::invalid_argument("--step must be linesearch or classic");
    wmot::SolverReport report = wmot::solve_wmot(mu, nu, *cost, opts);
    if (!out_path.empty()) wmot::io::save_report_json(report, out_path);
    if (!trace_path.empty()) wmot::io::save_trace_csv(report, trace_path);
    std::cout << "value " << fmt(report.value) << " gap " << fmt(report.gap) << " iterations "
              << report.iterations << (report.converged ? "" : " (not converged)") << "\n";
    return 0;
  }

  if (order->parsed()) {
    wmot::DiscreteMeasure mu = wmot::io::load_measure_csv(o_mu);
    wmot::DiscreteMeasure nu = wmot::io::load_measure_csv(o_nu);
    wmot::ConvexOrderResult res = wmot::check_convex_order(mu, nu, o_tol);
    std::cout << (res.ordered ? "true" : "false");
    if (!res.ordered) {
      if (res.witness)
        std::cout << " witness " << fmt(*res.witness) << " violation "
                  << fmt(res.worst_violation);
      else
        std::cout << " mean_gap " << fmt(res.mean_gap);
    }
    std::cout << "\n";
    return 0;
  }

  if (awd->parsed()) {
    wmot::DiscreteCoupling a = wmot::io::load_coupling_json(a_path);
    wmot::DiscreteCoupling b = wmot::io::load_coupling_json(b_path);
    std::cout << fmt(wmot::adapted_wasserstein(a, b, aw_r)) << "\n";
    return 0;
  }

  if (vix->parsed()) {
    wmot::DiscreteMeasure mu = wmot::io::load_measure_csv(v_mu);
    wmot::DiscreteMeasure nu = wmot::io::load_measure_csv(v_nu);
    wmot::VixResult res = wmot::vix_superreplication(mu, nu, v_delta);
    if (!v_out.empty()) wmot::io::save_report_json(res.report, v_out);
    std::cout << "d_super " << fmt(res.d_super) << "\n";
    return 0;
  }

  if (sbm->parsed()) {
    wmot::DiscreteMeasure mu = wmot::io::load_measure_csv(s_mu);
    wmot::DiscreteMeasure nu = wmot::io::load_measure_csv(s_nu);
    if (s_grid < 2) throw std::invalid_argument("--grid needs at least 2 points");
    wmot::SbmModel model = wmot::sbm_solve(mu, nu);
    std::vector<double> times(static_cast<std::size_t>(s_grid));
    for (int k = 0; k < s_grid; ++k)
      times[static_cast<std::size_t>(k)] = static_cast<double>(k) / (s_grid - 1);
    times.back() = 1.0;
    wmot::PathEnsemble ens = wmot::sbm_simulate(model, times, s_paths, s_seed);
    std::ostringstream out;
    out << "path_id,t,value\n";
    for (std::size_t p = 0; p < ens.n_paths(); ++p)
      for (std::size_t k = 0; k < ens.times.size(); ++k)
        out << p << ',' << fmt(ens.times[k]) << ',' << fmt(ens.value(p, k)) << '\n';
    if (!s_out.empty())
      wmot::io::write_text_file(s_out, out.str());
    else
      std::cout << out.str();
    std::cout << "mt_value " << fmt(model.mt_value) << " wmot_value " << fmt(model.value)
              << "\n";
    return 0;
  }

  if (mono->parsed()) {
    wmot::DiscreteCoupling pi = wmot::io::load_coupling_json(m_coupling);
    wmot::CostPtr cost = wmot::io::parse_cost(m_cost);
    wmot::MonotonicityReport rep = wmot::check_coupling_c_monotone(pi, *cost, m_gap_tol);
    std::ostringstream out;
    out << "{\n  \"monotone\": " << (rep.monotone ? "true" : "false")
        << ",\n  \"improvement\": " << fmt(rep.improvement)
        << ",\n  \"current_cost\": " << fmt(rep.current_cost)
        << ",\n  \"optimal_cost\": " << fmt(rep.optimal_cost) << "\n}\n";
    if (!m_out.empty())
      wmot::io::write_text_file(m_out, out.str());
    std::cout << (rep.monotone ? "monotone" : "not monotone") << " improvement "
              << fmt(rep.improvement) << "\n";
    return 0;
  }

  if (stab->parsed()) {
    wmot::ExperimentConfig cfg = wmot::ExperimentConfig::from_file(cfg_path);
    if (!stab_csv.empty()) cfg.out_csv = stab_csv;
    if (!stab_json.empty()) cfg.out_json = stab_json;
    if (stab_timings) cfg.timings = true;
    wmot::ExperimentTable table = wmot::run_stability(cfg);
    std::string csv = table.to_csv(cfg.timings);
    if (!cfg.out_csv.empty()) wmot::io::write_text_file(cfg.out_csv, csv);
    if (!cfg.out_json.empty())
      wmot::io::write_text_file(cfg.out_json, table.to_json(cfg.timings) + "\n");
    std::cout << csv;
    return 0;
  }

  if (quant->parsed()) {
    wmot::ParametricLaw law = parse_family(q_family);
    wmot::QuantizeScheme scheme;
    if (q_scheme == "block-mean")
      scheme = wmot::QuantizeScheme::kBlockMean;
    else if (q_scheme == "quantile")
      scheme = wmot::QuantizeScheme::kQuantile;
    else
      throw std::invalid_argument("--scheme must be block-mean or quantile");
    double u = q_u;
    if (q_random_u) {
      // deterministic uniform draw from the seed
      unsigned long long z = q_seed + 0x9e3779b97f4a7c15ULL;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      z ^= z >> 31;
      u = static_cast<double>(z >> 11) * 0x1.0p-53;
      if (u <= 0.0) u = 0.5;
    }
    wmot::DiscreteMeasure m = wmot::quantize(law, q_n, scheme, u);
    wmot::io::save_measure_csv(m, q_out);
    std::cout << "wrote " << q_out << " (" << m.size() << " atoms)\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const wmot::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const wmot::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  }
}
