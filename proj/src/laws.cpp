#include "wmot/laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wmot/normal.hpp"
#include "wmot/numeric.hpp"

namespace wmot {

ParametricLaw ParametricLaw::normal(double mean, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("normal law: sigma <= 0");
  ParametricLaw law(Family::kNormal);
  law.p0_ = mean;
  law.p1_ = sigma;
  return law;
}

ParametricLaw ParametricLaw::lognormal(double log_mean, double log_sigma) {
  if (!(log_sigma > 0.0)) throw std::invalid_argument("lognormal law: sigma <= 0");
  ParametricLaw law(Family::kLognormal);
  law.p0_ = log_mean;
  law.p1_ = log_sigma;
  return law;
}

ParametricLaw ParametricLaw::lognormal_with_mean(double mean, double log_sigma) {
  if (!(mean > 0.0)) throw std::invalid_argument("lognormal law: mean <= 0");
  return lognormal(std::log(mean) - 0.5 * log_sigma * log_sigma, log_sigma);
}

ParametricLaw ParametricLaw::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform law: empty interval");
  ParametricLaw law(Family::kUniform);
  law.p0_ = lo;
  law.p1_ = hi;
  return law;
}

ParametricLaw ParametricLaw::two_point(double x0, double w0, double x1) {
  if (!(w0 > 0.0 && w0 < 1.0)) throw std::invalid_argument("two_point law: w0 outside (0,1)");
  if (!(x0 < x1)) throw std::invalid_argument("two_point law: atoms not increasing");
  ParametricLaw law(Family::kTwoPoint);
  law.p0_ = x0;
  law.p1_ = w0;
  law.p2_ = x1;
  return law;
}

ParametricLaw ParametricLaw::quantile_table(std::vector<double> u_knots,
                                            std::vector<double> q_knots) {
  if (u_knots.size() != q_knots.size() || u_knots.size() < 2)
    throw std::invalid_argument("quantile_table: need >= 2 matching knots");
  if (u_knots.front() != 0.0 || u_knots.back() != 1.0)
    throw std::invalid_argument("quantile_table: u knots must span [0,1]");
  for (std::size_t i = 1; i < u_knots.size(); ++i) {
    if (!(u_knots[i] > u_knots[i - 1]))
      throw std::invalid_argument("quantile_table: u knots not increasing");
    if (q_knots[i] < q_knots[i - 1])
      throw std::invalid_argument("quantile_table: quantile not nondecreasing");
  }
  ParametricLaw law(Family::kTable);
  law.us_ = std::move(u_knots);
  law.qs_ = std::move(q_knots);
  return law;
}

double ParametricLaw::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("law quantile: u outside (0,1)");
  switch (family_) {
    case Family::kNormal:
      return p0_ + p1_ * normal_quantile(u);
    case Family::kLognormal:
      return std::exp(p0_ + p1_ * normal_quantile(u));
    case Family::kUniform:
      return p0_ + (p1_ - p0_) * u;
    case Family::kTwoPoint:
      return u <= p1_ ? p0_ : p2_;
    case Family::kTable: {
      auto it = std::upper_bound(us_.begin(), us_.end(), u);
      std::size_t hi = static_cast<std::size_t>(it - us_.begin());
      std::size_t lo = hi - 1;
      double t = (u - us_[lo]) / (us_[hi] - us_[lo]);
      return qs_[lo] + t * (qs_[hi] - qs_[lo]);
    }
  }
  return 0.0;
}

double ParametricLaw::mean() const { return quantile_block_integral(0.0, 1.0); }

double ParametricLaw::quantile_block_integral(double lo, double hi) const {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
    throw std::domain_error("quantile_block_integral: bad block");
  if (lo == hi) return 0.0;
  switch (family_) {
    case Family::kNormal: {
      // antiderivative of Phi^{-1} is -phi(Phi^{-1})
      double zl = normal_quantile(lo), zh = normal_quantile(hi);
      return p0_ * (hi - lo) + p1_ * (normal_pdf(zl) - normal_pdf(zh));
    }
    case Family::kLognormal: {
      // \int exp(m + s Phi^{-1}(u)) du = e^{m+s^2/2}(Phi(z-s)) evaluated at ends
      double zl = normal_quantile(lo), zh = normal_quantile(hi);
      double scale = std::exp(p0_ + 0.5 * p1_ * p1_);
      return scale * (normal_cdf(zh - p1_) - normal_cdf(zl - p1_));
    }
    case Family::kUniform: {
      double mid = 0.5 * (lo + hi);
      return (hi - lo) * (p0_ + (p1_ - p0_) * mid);
    }
    case Family::kTwoPoint: {
      double below = std::min(hi, p1_) - std::min(lo, p1_);
      double above = (hi - lo) - below;
      return below * p0_ + above * p2_;
    }
    case Family::kTable: {
      // piecewise-linear quantile: exact trapezoid per overlapped segment
      KahanSum acc;
      for (std::size_t k = 1; k < us_.size(); ++k) {
        double a = std::max(lo, us_[k - 1]);
        double b = std::min(hi, us_[k]);
        if (a >= b) continue;
        double slope = (qs_[k] - qs_[k - 1]) / (us_[k] - us_[k - 1]);
        auto val = [&](double u) { return qs_[k - 1] + slope * (u - us_[k - 1]); };
        acc.add(0.5 * (b - a) * (val(a) + val(b)));
      }
      return acc.value();
    }
  }
  return 0.0;
}

DiscreteMeasure quantize(const ParametricLaw& law, int n, QuantizeScheme scheme,
                         double u_offset) {
  if (n < 1) throw std::invalid_argument("quantize: n < 1");
  std::vector<double> atoms(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(n), 1.0 / n);
  if (scheme == QuantizeScheme::kQuantile) {
    if (!(u_offset > 0.0 && u_offset < 1.0))
      throw std::invalid_argument("quantize: u_offset outside (0,1)");
    for (int j = 1; j <= n; ++j)
      atoms[static_cast<std::size_t>(j - 1)] = law.quantile((j - u_offset) / n);
  } else {
    for (int j = 1; j <= n; ++j) {
      double lo = static_cast<double>(j - 1) / n;
      double hi = static_cast<double>(j) / n;
      atoms[static_cast<std::size_t>(j - 1)] = n * law.quantile_block_integral(lo, hi);
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

DiscreteMeasure block_mean_quantize(const DiscreteMeasure& m, int n) {
  if (n < 1) throw std::invalid_argument("block_mean_quantize: n < 1");
  std::vector<double> atoms(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(n), 1.0 / n);
  std::size_t j = 0;
  double prev = 0.0;
  for (int b = 1; b <= n; ++b) {
    double hi = b == n ? 1.0 : static_cast<double>(b) / n;
    KahanSum acc;
    while (prev < hi) {
      double cj = m.cumulative()[j];
      double upper = std::min(cj, hi);
      acc.add((upper - prev) * m.atoms()[j]);
      prev = upper;
      if (upper == cj && j + 1 < m.size()) ++j;
    }
    atoms[static_cast<std::size_t>(b - 1)] = acc.value() * n;
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

}  // namespace wmot
