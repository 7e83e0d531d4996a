#pragma once

#include <stdexcept>

namespace wmot {

// Requested martingale problem has an empty feasible set (convex order fails).
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown (factorization failure, residuals out of tolerance).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wmot
