#pragma once

#include <nlohmann/json.hpp>

#include "qconv/states.hpp"

namespace qconv {

/// Generalized robustness R(rho) = min{ s >= 0 : (rho + s tau)/(1 + s) separable, tau a state }.
///
/// For two qubits separable = PPT, so R = min tr(Sigma) - 1 over
/// Sigma >= rho, Sigma^{T_B} >= 0, which is solved as a semidefinite program.
struct RobustnessResult {
  double value = 0.0;         // feasible upper bound, within `gap` of the optimum
  double lower_bound = 0.0;   // certified by a repaired dual point
  double gap = 0.0;           // value - lower_bound
  DensityMatrix witness = DensityMatrix::maximally_mixed();  // tau
  DensityMatrix free_state = DensityMatrix::maximally_mixed();  // (rho + R tau)/(1 + R)
  double tolerance = 0.0;
  int iterations = 0;         // Newton steps
  double primal_residual = 0.0;  // max(0, -lambda_min) over both cone constraints
};

struct RobustnessOptions {
  double tolerance = 1e-6;
  int max_newton_steps = 1500;
};

/// Throws DomainError for tolerance < 1e-9 and SolverError (best_value = an
/// upper bound on R) when the Newton budget is exhausted before the
/// primal-dual gap reaches the tolerance.
RobustnessResult generalized_robustness(const DensityMatrix& rho, RobustnessOptions options = {});

/// (sqrt(lambda1) + sqrt(lambda2))^2 - 1 = 2 sqrt(lambda1 lambda2).
double robustness_pure_oracle(const PureState& psi);

/// G/(1 - G).
double robustness_lower_bound(const DensityMatrix& rho);

nlohmann::json to_json(const RobustnessResult& r);

}  // namespace qconv
