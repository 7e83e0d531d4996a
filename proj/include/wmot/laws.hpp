#pragma once

#include <vector>

#include "wmot/measures.hpp"

namespace wmot {

// One-dimensional source law with quantile access: normal, lognormal,
// uniform, two-point, or a tabulated quantile function (piecewise linear).
class ParametricLaw {
 public:
  static ParametricLaw normal(double mean, double sigma);
  // exp(N(log_mean, log_sigma^2))
  static ParametricLaw lognormal(double log_mean, double log_sigma);
  // lognormal re-parameterised by its expectation; handy for mean-matched pairs
  static ParametricLaw lognormal_with_mean(double mean, double log_sigma);
  static ParametricLaw uniform(double lo, double hi);
  static ParametricLaw two_point(double x0, double w0, double x1);
  static ParametricLaw quantile_table(std::vector<double> u_knots, std::vector<double> q_knots);

  double quantile(double u) const;  // u in (0,1)
  double mean() const;
  // \int_lo^hi F^{-1}(u) du, exact per family (antiderivative or piecewise).
  double quantile_block_integral(double lo, double hi) const;

 private:
  enum class Family { kNormal, kLognormal, kUniform, kTwoPoint, kTable };
  ParametricLaw(Family f) : family_(f) {}
  Family family_;
  double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
  std::vector<double> us_, qs_;
};

enum class QuantizeScheme { kBlockMean, kQuantile };

// n-point discretisation with equal weights 1/n. Block-mean places each atom
// at the conditional mean of its probability block; the quantile scheme
// samples F^{-1}((j - u_offset)/n).
DiscreteMeasure quantize(const ParametricLaw& law, int n,
                         QuantizeScheme scheme = QuantizeScheme::kBlockMean,
                         double u_offset = 0.5);

// Block-mean discretisation of an already-discrete law: exact mass splitting
// over the n equal-probability blocks.
DiscreteMeasure block_mean_quantize(const DiscreteMeasure& m, int n);


}  // namespace wmot
