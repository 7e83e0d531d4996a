#include "wmot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace wmot::io {

namespace {
std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": cannot parse number '" + s + "'");
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return in;
}
}  // namespace

DiscreteMeasure load_measure_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "atom,weight")
    throw std::invalid_argument(path + ": expected header 'atom,weight'");
  std::vector<double> atoms, weights;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument(path + ": malformed row '" + line + "'");
    atoms.push_back(parse_double(trim(line.substr(0, comma)), "atom"));
    weights.push_back(parse_double(trim(line.substr(comma + 1)), "weight"));
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

void save_measure_csv(const DiscreteMeasure& m, const std::string& path) {
  std::ostringstream out;
  out << "atom,weight\n";
  for (std::size_t j = 0; j < m.size(); ++j)
    out << format_double(m.atoms()[j]) << ',' << format_double(m.weights()[j]) << '\n';
  write_text_file(path, out.str());
}

namespace {
nlohmann::json coupling_json(const DiscreteCoupling& pi) {
  nlohmann::json j;
  j["x_atoms"] = pi.source().atoms();
  j["mu_weights"] = pi.source().weights();
  nlohmann::json kernels = nlohmann::json::array();
  for (const DiscreteMeasure& k : pi.kernels())
    kernels.push_back({{"atoms", k.atoms()}, {"weights", k.weights()}});
  j["kernels"] = std::move(kernels);
  return j;
}
}  // namespace

DiscreteCoupling load_coupling_json(const std::string& path) {
  std::ifstream in = open_in(path);
  nlohmann::json j = nlohmann::json::parse(in);
  DiscreteMeasure source(j.at("x_atoms").get<std::vector<double>>(),
                         j.at("mu_weights").get<std::vector<double>>());
  std::vector<DiscreteMeasure> kernels;
  for (const auto& k : j.at("kernels"))
    kernels.emplace_back(k.at("atoms").get<std::vector<double>>(),
                         k.at("weights").get<std::vector<double>>());
  return DiscreteCoupling(std::move(source), std::move(kernels));
}

std::string coupling_to_json(const DiscreteCoupling& pi) { return coupling_json(pi).dump(2); }

void save_coupling_json(const DiscreteCoupling& pi, const std::string& path) {
  write_text_file(path, coupling_to_json(pi) + "\n");
}

std::string report_to_json(const SolverReport& report) {
  nlohmann::json j;
  j["value"] = report.value;
  j["gap"] = report.gap;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["coupling"] = coupling_json(report.coupling);
  return j.dump(2);
}

void save_report_json(const SolverReport& report, const std::string& path) {
  write_text_file(path, report_to_json(report) + "\n");
}

void save_trace_csv(const SolverReport& report, const std::string& path) {
  std::ostringstream out;
  out << "iter,value,gap\n";
  for (const TracePoint& t : report.trace)
    out << t.iter << ',' << format_double(t.value) << ',' << format_double(t.gap) << '\n';
  write_text_file(path, out.str());
}

CostPtr parse_cost(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (kind == "linear") {
    if (arg == "absdiff") return linear_cost([](double x, double y) { return std::abs(x - y); });
    if (arg == "sqdiff")
      return linear_cost([](double x, double y) { return (y - x) * (y - x); });
    if (arg == "forward") return linear_cost([](double, double y) { return y; });
    if (arg.rfind("abspow=", 0) == 0) {
      double p = parse_double(arg.substr(7), "linear:abspow");
      return linear_cost([p](double x, double y) { return std::pow(std::abs(x - y), p); });
    }
    if (arg.rfind("csv=", 0) == 0) {
      std::ifstream in = open_in(arg.substr(4));
      std::string line;
      if (!std::getline(in, line) || trim(line) != "x,y,cost")
        throw std::invalid_argument("linear:csv expects header 'x,y,cost'");
      std::vector<double> xs, ys, cs;
      while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(row, tok, ',')) vals.push_back(parse_double(trim(tok), "cost csv"));
        if (vals.size() != 3) throw std::invalid_argument("linear:csv row needs x,y,cost");
        xs.push_back(vals[0]);
        ys.push_back(vals[1]);
        cs.push_back(vals[2]);
      }
      // triplets -> table on the distinct sorted grids
      auto distinct = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
      };
      std::vector<double> gx = distinct(xs), gy = distinct(ys);
      std::vector<double> table(gx.size() * gy.size(),
                                std::numeric_limits<double>::quiet_NaN());
      auto index = [](const std::vector<double>& g, double v) {
        return static_cast<std::size_t>(
            std::lower_bound(g.begin(), g.end(), v) - g.begin());
      };
      for (std::size_t k = 0; k < cs.size(); ++k)
        table[index(gx, xs[k]) * gy.size() + index(gy, ys[k])] = cs[k];
      for (double v : table)
        if (std::isnan(v)) throw std::invalid_argument("linear:csv table has missing cells");
      return linear_cost_table(std::move(gx), std::move(gy), std::move(table));
    }
    throw std::invalid_argument("unknown linear cost spec: " + arg);
  }
  if (kind == "vix") {
    if (arg.rfind("delta=", 0) != 0)
      throw std::invalid_argument("vix cost spec needs delta=<float>");
    return vix_cost({parse_double(arg.substr(6), "vix:delta")});
  }
  if (kind == "gauss") {
    if (arg.rfind("rho=", 0) != 0)
      throw std::invalid_argument("gauss cost spec needs rho=<float>");
    return gauss_anchor_cost(parse_double(arg.substr(4), "gauss:rho"));
  }
  throw std::invalid_argument("unknown cost spec: " + spec);
}

std::map<std::string, std::string> load_key_value(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ": expected 'key = value', got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace wmot::io
