#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace qconv {

/// Input outside the mathematical domain of an operation (non-Hermitian
/// matrix, parameter out of range, invalid state).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to converge or to certify its result.
/// When the solver had a usable feasible point, `best_value()` carries it
/// (for the robustness SDP this is an upper bound on R).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what,
                       double best_value = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), best_value_(best_value) {}

  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

}  // namespace qconv
