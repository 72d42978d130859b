#pragma once

#include <stdexcept>
#include <string>

namespace sparsereg {

// Malformed or inconsistent input: bad files, dimension mismatches,
// missing ground truth, invalid parameter ranges.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver ran out of iterations; carries the worst KKT
// violation observed at the point of failure.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double worst_kkt_violation)
      : std::runtime_error(what), worst_kkt(worst_kkt_violation) {}
  double worst_kkt;
};

// An exact-enumeration routine would exceed its subset budget.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sparsereg
