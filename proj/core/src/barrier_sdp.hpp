#pragma once

// Small log-barrier interior-point solver for
//
//   minimize c.x  subject to  F_j(x) = A_j0 + sum_k x_k A_jk > 0  (Hermitian blocks).
//
// Each centering step is a damped Newton iteration on
//   t c.x - sum_j log det F_j(x).
// At an exact center Z_j = F_j(x)^{-1} / t is dual feasible and the duality
// gap is sum_j dim(F_j) / t. Callers decide when to stop: the predicate sees
// every centered iterate and typically certifies its own bounds from Z_j.

#include <functional>
#include <vector>

#include "qconv/smallmat.hpp"

namespace qconv::detail {

struct MatrixInequality {
  ComplexMatrix constant;
  std::vector<ComplexMatrix> coefficients;  // one per variable
};

struct BarrierProblem {
  std::vector<double> cost;
  std::vector<MatrixInequality> blocks;
};

struct BarrierIterate {
  std::vector<double> x;
  double t = 0.0;
  std::vector<ComplexMatrix> duals;  // F_j(x)^{-1} / t
  int newton_steps = 0;
};

struct BarrierOptions {
  double t_initial = 1.0;
  double t_growth = 8.0;
  double centering_tolerance = 1e-8;  // on the squared Newton decrement
  int max_stage_steps = 60;    // per value of t
  int max_newton_steps = 1500;
};

/// x0 must be strictly feasible. Returns the first centered iterate the
/// predicate accepts; throws SolverError carrying the current (feasible)
/// objective value when the Newton budget runs out.
BarrierIterate solve_barrier(const BarrierProblem& problem, std::vector<double> x0,
                             const BarrierOptions& options,
                             const std::function<bool(const BarrierIterate&)>& accept);

/// F(x) for one block.
ComplexMatrix evaluate_block(const MatrixInequality& block, const std::vector<double>& x);

}  // namespace qconv::detail
