#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace wmot {

// Neumaier-compensated accumulator.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);
double compensated_dot(std::span<const double> a, std::span<const double> b);

// Adaptive Simpson quadrature on [a,b] with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 60);

// Golden-section minimisation of a convex function on [lo,hi]; returns the
// abscissa of the minimum located to within tol.
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          double tol);

}  // namespace wmot
