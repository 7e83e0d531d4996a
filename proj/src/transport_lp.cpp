#include "wmot/transport_lp.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "wmot/errors.hpp"
#include "wmot/numeric.hpp"

namespace wmot {

namespace {
constexpr double kFeasTol = 1e-9;    // phase-1 acceptance / feasibility
constexpr double kPivotTol = 1e-11;  // smallest admissible pivot element
constexpr double kDjTol = 1e-9;      // entering reduced-cost threshold
constexpr double kDegenEps = 1e-12;  // step sizes below this count as degenerate
constexpr int kBlandTrigger = 64;    // consecutive degenerate pivots before Bland
constexpr int kRefactorPeriod = 768;
constexpr int kResidualCheckPeriod = 64;
constexpr double kResidualTrigger = 1e-10;
}  // namespace

struct TransportSimplex::Impl {
  int n = 0, m = 0, nm = 0, R = 0;
  bool mart = false;
  std::vector<double> x, muw, y, nuw, scale;
  std::vector<double> b;

  std::vector<int> basic;       // slot -> column id
  std::vector<int> pos;         // column id -> slot, -1 if nonbasic
  std::vector<double> binv;     // R x R, column-major
  std::vector<double> xb;       // basic values
  std::vector<double> art_sign; // artificial column signs (by row)

  std::vector<double> cB, lambda, w, wtil, rowt;
  std::vector<lapack_int> ipiv;
  std::vector<double> bwork;

  long total_iters = 0;
  int pivots_since_refactor = 0;
  bool phase1_done = false;
  bool is_feasible = false;

  int col_rows[3];
  double col_vals[3];

  // ---- structure -------------------------------------------------------

  int column(int col, int* rows, double* vals) const {
    if (col < nm) {
      int i = col / m, j = col % m;
      rows[0] = i;
      vals[0] = 1.0;
      rows[1] = n + j;
      vals[1] = 1.0;
      if (mart) {
        rows[2] = n + m + i;
        vals[2] = (y[j] - x[i]) / scale[i];
        return 3;
      }
      return 2;
    }
    int k = col - nm;
    rows[0] = k;
    vals[0] = art_sign[k];
    return 1;
  }

  double struct_coef_bar(int i, int j) const { return (y[j] - x[i]) / scale[i]; }

  // ---- factorization ---------------------------------------------------

  void refactor() {
    std::vector<double> B(static_cast<std::size_t>(R) * R, 0.0);
    int rows[3];
    double vals[3];
    for (int s = 0; s < R; ++s) {
      int cnt = column(basic[s], rows, vals);
      for (int k = 0; k < cnt; ++k) B[static_cast<std::size_t>(s) * R + rows[k]] = vals[k];
    }
    lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, R, R, B.data(), R, ipiv.data());
    if (info != 0) throw numeric_error("transport simplex: singular basis");
    info = LAPACKE_dgetri(LAPACK_COL_MAJOR, R, B.data(), R, ipiv.data());
    if (info != 0) throw numeric_error("transport simplex: basis inversion failed");
    binv = std::move(B);
    // xb = binv * b
    cblas_dgemv(CblasColMajor, CblasNoTrans, R, R, 1.0, binv.data(), R, b.data(), 1, 0.0,
                xb.data(), 1);
    pivots_since_refactor = 0;
  }

  double basic_residual() const {
    // max |B xb - b| using the sparse basis columns
    std::vector<double> acc(b.size(), 0.0);
    int rows[3];
    double vals[3];
    for (int s = 0; s < R; ++s) {
      int cnt = const_cast<Impl*>(this)->column(basic[s], rows, vals);
      for (int k = 0; k < cnt; ++k) acc[static_cast<std::size_t>(rows[k])] += vals[k] * xb[s];
    }
    double res = 0.0;
    for (int r = 0; r < R; ++r) res = std::max(res, std::abs(acc[r] - b[r]));
    return res;
  }

  // ---- initial basis ---------------------------------------------------

  void init_basis() {
    basic.assign(static_cast<std::size_t>(R), -1);
    pos.assign(static_cast<std::size_t>(nm + R), -1);
    art_sign.assign(static_cast<std::size_t>(R), 1.0);

    // northwest-corner cells: a spanning set of the marginal rows
    std::vector<std::pair<int, double>> cells;  // (col id, value)
    cells.reserve(static_cast<std::size_t>(n + m - 1));
    {
      int i = 0, j = 0;
      double a = muw[0], c = nuw[0];
      while (true) {
        double v = std::min(a, c);
        cells.emplace_back(i * m + j, v);
        a -= v;
        c -= v;
        if (i == n - 1 && j == m - 1) break;
        if (a <= c && i < n - 1) {
          ++i;
          a = muw[static_cast<std::size_t>(i)];
        } else {
          ++j;
          c = nuw[static_cast<std::size_t>(j)];
        }
      }
    }

    int slot = 0;
    for (auto& [col, val] : cells) {
      basic[slot] = col;
      pos[col] = slot;
      ++slot;
    }
    // artificial on the last column-sum row covers the marginal redundancy
    {
      int r = n + m - 1;
      basic[slot] = nm + r;
      pos[nm + r] = slot;
      ++slot;
    }
    if (mart) {
      // artificial per barycenter row, signed by the residual of the NW plan
      std::vector<double> resid(static_cast<std::size_t>(n), 0.0);
      for (auto& [col, val] : cells) {
        int i = col / m, j = col % m;
        resid[static_cast<std::size_t>(i)] -= struct_coef_bar(i, j) * val;
      }
      for (int i = 0; i < n; ++i) {
        int r = n + m + i;
        art_sign[r] = resid[static_cast<std::size_t>(i)] >= 0.0 ? 1.0 : -1.0;
        basic[slot] = nm + r;
        pos[nm + r] = slot;
        ++slot;
      }
    }
    refactor();
  }

  // ---- pricing ---------------------------------------------------------

  void compute_duals(const double* struct_cost, double art_cost) {
    for (int s = 0; s < R; ++s) {
      int col = basic[s];
      cB[s] = col < nm ? (struct_cost ? struct_cost[col] : 0.0) : art_cost;
    }
    cblas_dgemv(CblasColMajor, CblasTrans, R, R, 1.0, binv.data(), R, cB.data(), 1, 0.0,
                lambda.data(), 1);
  }

  // Most negative reduced cost (or first eligible in Bland mode).
  int price(const double* struct_cost, bool bland, const std::vector<int>& banned) {
    int best_col = -1;
    double best_r = -kDjTol;
    for (int i = 0; i < n; ++i) {
      double lam_row = lambda[i];
      double lam_bar = mart ? lambda[n + m + i] : 0.0;
      double off = lam_row - lam_bar * x[i] / (mart ? scale[i] : 1.0);
      double slope = mart ? lam_bar / scale[i] : 0.0;
      const double* crow = struct_cost ? struct_cost + static_cast<std::size_t>(i) * m : nullptr;
      int base = i * m;
      for (int j = 0; j < m; ++j) {
        double r = (crow ? crow[j] : 0.0) - off - lambda[n + j] - slope * y[j];
        if (r < best_r) {
          int col = base + j;
          if (pos[col] >= 0) continue;
          if (!banned.empty() &&
              std::find(banned.begin(), banned.end(), col) != banned.end())
            continue;
          if (bland) return col;
          best_r = r;
          best_col = col;
        }
      }
    }
    return best_col;
  }

  // ---- main loop -------------------------------------------------------

  // phase1: minimise sum of artificials; otherwise minimise struct_cost.
  void run(const double* struct_cost, bool phase1) {
    const double art_cost = phase1 ? 1.0 : 0.0;
    int degen_run = 0;
    bool bland = false;
    std::vector<int> banned;
    const long max_pivots = std::max<long>(200000, 40L * R);
    long pivots = 0;

    while (true) {
      compute_duals(phase1 ? nullptr : struct_cost, art_cost);
      int q = price(phase1 ? nullptr : struct_cost, bland, banned);
      if (q < 0) return;  // optimal for this phase

      // ftran: w = binv * a_q  (sparse combination of binv columns)
      int rows[3];
      double vals[3];
      int cnt = column(q, rows, vals);
      std::fill(w.begin(), w.end(), 0.0);
      for (int k = 0; k < cnt; ++k)
        cblas_daxpy(R, vals[k], binv.data() + static_cast<std::size_t>(rows[k]) * R, 1,
                    w.data(), 1);

      // ratio test
      int t = -1;
      double theta = std::numeric_limits<double>::infinity();
      double wt = 0.0;
      for (int s = 0; s < R; ++s) {
        double ws = w[s];
        double ratio;
        if (ws > kPivotTol) {
          ratio = std::max(xb[s], 0.0) / ws;
        } else if (!phase1 && basic[s] >= nm && ws < -kPivotTol) {
          ratio = 0.0;  // keep residual artificials pinned at zero
        } else {
          continue;
        }
        bool better;
        if (t < 0) {
          better = true;
        } else if (ratio < theta - kDegenEps) {
          better = true;
        } else if (ratio <= theta + kDegenEps) {
          if ((basic[s] >= nm) != (basic[t] >= nm))
            better = basic[s] >= nm;  // drive artificials out first
          else if (bland)
            better = basic[s] < basic[t];
          else
            better = std::abs(ws) > std::abs(wt);
        } else {
          better = false;
        }
        if (better) {
          t = s;
          theta = ratio;
          wt = ws;
        }
      }
      if (t < 0) {
        // bounded polytope: failure is numerical
        if (pivots_since_refactor > 0) {
          refactor();
          continue;
        }
        throw numeric_error("transport simplex: no admissible pivot");
      }
      if (std::abs(wt) < 1e-9 && pivots_since_refactor > 0) {
        refactor();
        banned.push_back(q);
        if (banned.size() > 16) banned.erase(banned.begin());
        continue;
      }
      banned.clear();

      // pivot
      theta = std::max(theta, 0.0);
      cblas_daxpy(R, -theta, w.data(), 1, xb.data(), 1);
      xb[t] = theta;
      int leaving = basic[t];
      pos[leaving] = -1;
      basic[t] = q;
      pos[q] = t;

      // binv <- E binv via rank-1 update
      for (int c = 0; c < R; ++c) rowt[c] = binv[static_cast<std::size_t>(c) * R + t];
      std::memcpy(wtil.data(), w.data(), sizeof(double) * static_cast<std::size_t>(R));
      wtil[t] = wt - 1.0;
      cblas_dger(CblasColMajor, R, R, -1.0 / wt, wtil.data(), 1, rowt.data(), 1, binv.data(),
                 R);

      ++total_iters;
      ++pivots;
      ++pivots_since_refactor;
      if (theta < kDegenEps) {
        if (++degen_run >= kBlandTrigger) bland = true;
      } else {
        degen_run = 0;
        bland = false;
      }
      if (pivots > max_pivots) throw numeric_error("transport simplex: pivot limit exceeded");
      if (pivots_since_refactor >= kRefactorPeriod) {
        refactor();
      } else if (pivots_since_refactor % kResidualCheckPeriod == 0 &&
                 basic_residual() > kResidualTrigger) {
        refactor();
      }
    }
  }

  double phase1_objective() const {
    KahanSum s;
    for (int slot = 0; slot < R; ++slot)
      if (basic[slot] >= nm) s.add(std::max(xb[slot], 0.0));
    return s.value();
  }

  void ensure_phase1() {
    if (phase1_done) return;
    init_basis();
    run(nullptr, /*phase1=*/true);
    is_feasible = phase1_objective() <= kFeasTol;
    phase1_done = true;
  }
};

TransportSimplex::TransportSimplex(std::vector<double> x_values, std::vector<double> mu_weights,
                                   std::vector<double> y_values, std::vector<double> nu_weights,
                                   bool martingale)
    : impl_(std::make_unique<Impl>()) {
  Impl& d = *impl_;
  if (x_values.empty() || y_values.empty() || x_values.size() != mu_weights.size() ||
      y_values.size() != nu_weights.size())
    throw std::invalid_argument("TransportSimplex: inconsistent dimensions");
  d.n = static_cast<int>(x_values.size());
  d.m = static_cast<int>(y_values.size());
  d.nm = d.n * d.m;
  d.mart = martingale;
  d.R = d.n + d.m + (martingale ? d.n : 0);
  d.x = std::move(x_values);
  d.muw = std::move(mu_weights);
  d.y = std::move(y_values);
  d.nuw = std::move(nu_weights);
  d.scale.resize(static_cast<std::size_t>(d.n));
  for (int i = 0; i < d.n; ++i) d.scale[static_cast<std::size_t>(i)] = std::max(1.0, std::abs(d.x[static_cast<std::size_t>(i)]));
  d.b.assign(static_cast<std::size_t>(d.R), 0.0);
  for (int i = 0; i < d.n; ++i) d.b[static_cast<std::size_t>(i)] = d.muw[static_cast<std::size_t>(i)];
  for (int j = 0; j < d.m; ++j) d.b[static_cast<std::size_t>(d.n + j)] = d.nuw[static_cast<std::size_t>(j)];
  d.binv.assign(static_cast<std::size_t>(d.R) * d.R, 0.0);
  d.xb.assign(static_cast<std::size_t>(d.R), 0.0);
  d.cB.assign(static_cast<std::size_t>(d.R), 0.0);
  d.lambda.assign(static_cast<std::size_t>(d.R), 0.0);
  d.w.assign(static_cast<std::size_t>(d.R), 0.0);
  d.wtil.assign(static_cast<std::size_t>(d.R), 0.0);
  d.rowt.assign(static_cast<std::size_t>(d.R), 0.0);
  d.ipiv.assign(static_cast<std::size_t>(d.R), 0);
}

TransportSimplex::~TransportSimplex() = default;
TransportSimplex::TransportSimplex(TransportSimplex&&) noexcept = default;
TransportSimplex& TransportSimplex::operator=(TransportSimplex&&) noexcept = default;

std::size_t TransportSimplex::rows() const { return static_cast<std::size_t>(impl_->R); }
std::size_t TransportSimplex::num_x() const { return static_cast<std::size_t>(impl_->n); }
std::size_t TransportSimplex::num_y() const { return static_cast<std::size_t>(impl_->m); }
long TransportSimplex::iterations() const { return impl_->total_iters; }

bool TransportSimplex::feasible() {
  impl_->ensure_phase1();
  return impl_->is_feasible;
}

double TransportSimplex::minimize(std::span<const double> cost) {
  Impl& d = *impl_;
  if (cost.size() != static_cast<std::size_t>(d.nm))
    throw std::invalid_argument("minimize: cost size mismatch");
  if (!feasible()) throw infeasible_error("transport polytope is empty");
  d.run(cost.data(), /*phase1=*/false);
  KahanSum v;
  for (int s = 0; s < d.R; ++s)
    if (d.basic[s] < d.nm && d.xb[s] != 0.0) v.add(cost[static_cast<std::size_t>(d.basic[s])] * d.xb[s]);
  return v.value();
}

std::vector<double> TransportSimplex::extract_joint() const {
  const Impl& d = *impl_;
  std::vector<double> joint(static_cast<std::size_t>(d.nm), 0.0);
  for (int s = 0; s < d.R; ++s)
    if (d.basic[s] < d.nm) joint[static_cast<std::size_t>(d.basic[s])] = std::max(d.xb[s], 0.0);
  return joint;
}

void TransportSimplex::current_vertex(std::vector<std::pair<std::size_t, double>>& cells) const {
  const Impl& d = *impl_;
  cells.clear();
  for (int s = 0; s < d.R; ++s)
    if (d.basic[s] < d.nm && d.xb[s] > 0.0)
      cells.emplace_back(static_cast<std::size_t>(d.basic[s]), d.xb[s]);
}

LPResult TransportSimplex::solve_with_certificates(std::span<const double> cost) {
  Impl& d = *impl_;
  LPResult res;
  if (!feasible()) {
    res.status = LPStatus::kInfeasible;
    return res;
  }
  d.run(cost.data(), /*phase1=*/false);
  d.refactor();  // fresh inverse and basic values for the certificates
  d.compute_duals(cost.data(), 0.0);

  res.status = LPStatus::kOptimal;
  res.joint = extract_joint();
  res.iterations = d.total_iters;

  KahanSum v;
  for (int c = 0; c < d.nm; ++c)
    if (res.joint[static_cast<std::size_t>(c)] != 0.0) v.add(cost[static_cast<std::size_t>(c)] * res.joint[static_cast<std::size_t>(c)]);
  res.value = v.value();

  res.row_duals.assign(d.lambda.begin(), d.lambda.begin() + d.n);
  res.col_duals.assign(d.lambda.begin() + d.n, d.lambda.begin() + d.n + d.m);
  if (d.mart) {
    res.bary_duals.resize(static_cast<std::size_t>(d.n));
    for (int i = 0; i < d.n; ++i)
      res.bary_duals[static_cast<std::size_t>(i)] = d.lambda[static_cast<std::size_t>(d.n + d.m + i)] / d.scale[static_cast<std::size_t>(i)];
  }
  KahanSum dv;
  for (int i = 0; i < d.n; ++i) dv.add(res.row_duals[static_cast<std::size_t>(i)] * d.muw[static_cast<std::size_t>(i)]);
  for (int j = 0; j < d.m; ++j) dv.add(res.col_duals[static_cast<std::size_t>(j)] * d.nuw[static_cast<std::size_t>(j)]);
  res.dual_value = dv.value();

  // primal residuals
  double pres = 0.0;
  {
    std::vector<double> acc(static_cast<std::size_t>(d.R), 0.0);
    for (int i = 0; i < d.n; ++i) {
      for (int j = 0; j < d.m; ++j) {
        double vcell = res.joint[static_cast<std::size_t>(i) * d.m + j];
        if (vcell == 0.0) continue;
        acc[static_cast<std::size_t>(i)] += vcell;
        acc[static_cast<std::size_t>(d.n + j)] += vcell;
        if (d.mart) acc[static_cast<std::size_t>(d.n + d.m + i)] += d.struct_coef_bar(i, j) * vcell;
      }
    }
    for (int r = 0; r < d.R; ++r) pres = std::max(pres, std::abs(acc[static_cast<std::size_t>(r)] - d.b[static_cast<std::size_t>(r)]));
  }
  res.primal_residual = pres;

  // complementary slackness on basic entries
  double cs = 0.0;
  for (int s = 0; s < d.R; ++s) {
    int col = d.basic[s];
    if (col >= d.nm) continue;
    int i = col / d.m, j = col % d.m;
    double r = cost[static_cast<std::size_t>(col)] - d.lambda[static_cast<std::size_t>(i)] - d.lambda[static_cast<std::size_t>(d.n + j)];
    if (d.mart) r -= d.lambda[static_cast<std::size_t>(d.n + d.m + i)] * d.struct_coef_bar(i, j);
    cs = std::max(cs, std::abs(r * d.xb[static_cast<std::size_t>(s)]));
  }
  res.compl_slackness = cs;
  return res;
}

namespace {
LPResult solve_linear(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                      std::span<const double> cost, bool martingale) {
  if (cost.size() != mu.size() * nu.size())
    throw std::invalid_argument("solve_linear: cost size mismatch");
  for (double c : cost)
    if (!std::isfinite(c)) throw std::invalid_argument("solve_linear: non-finite cost");
  TransportSimplex lp(mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), martingale);
  return lp.solve_with_certificates(cost);
}
}  // namespace

LPResult solve_linear_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         std::span<const double> cost) {
  return solve_linear(mu, nu, cost, false);
}

LPResult solve_linear_mot(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          std::span<const double> cost) {
  return solve_linear(mu, nu, cost, true);
}

std::optional<DiscreteCoupling> feasible_martingale_coupling(const DiscreteMeasure& mu,
                                                             const DiscreteMeasure& nu) {
  TransportSimplex lp(mu.atoms(), mu.weights(), nu.atoms(), nu.weights(), true);
  if (!lp.feasible()) return std::nullopt;
  std::vector<double> joint = lp.extract_joint();
  return from_matrix(mu.atoms(), nu.atoms(), joint);
}

}  // namespace wmot
