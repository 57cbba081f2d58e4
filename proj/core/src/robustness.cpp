#include "qconv/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "barrier_sdp.hpp"
#include "qconv/errors.hpp"
#include "qconv/measures.hpp"
#include "qconv/state_io.hpp"

namespace qconv {

namespace {

// Hermitian basis of 4x4 matrices: e_kk, then (e_pq + e_qp) and i(e_pq - e_qp).
std::vector<ComplexMatrix> hermitian_basis() {
  std::vector<ComplexMatrix> basis;
  for (std::size_t k = 0; k < 4; ++k) {
    ComplexMatrix m(4);
    m(k, k) = 1.0;
    basis.push_back(m);
  }
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t q = p + 1; q < 4; ++q) {
      ComplexMatrix re(4);
      re(p, q) = re(q, p) = 1.0;
      basis.push_back(re);
      ComplexMatrix im(4);
      im(p, q) = Complex(0.0, 1.0);
      im(q, p) = Complex(0.0, -1.0);
      basis.push_back(im);
    }
  return basis;
}

// Dual bound from A ~ (Sigma - rho)^{-1}/t. The dual program is
//   max tr(A rho)  s.t.  A >= 0,  (1 - A)^{T_B} >= 0,
// and an approximately centered A is made feasible by shrinking it.
double certified_lower_bound(const ComplexMatrix& a, const ComplexMatrix& rho) {
  const double mu = hermitian_eigvals(partial_transpose(ComplexMatrix::identity(4) - a)).front();
  const double scale = mu < 0.0 ? 1.0 / (1.0 - mu) : 1.0;
  return std::max(scale * (a * rho).trace().real() - 1.0, 0.0);
}

}  // namespace

RobustnessResult generalized_robustness(const DensityMatrix& rho, RobustnessOptions options) {
  if (!(options.tolerance >= 1e-9)) throw DomainError("generalized_robustness: tolerance must be >= 1e-9");
  RobustnessResult out;
  out.tolerance = options.tolerance;
  const ComplexMatrix& m = rho.matrix();

  if (hermitian_eigvals(partial_transpose(m)).front() >= -options.tolerance) {
    out.free_state = rho;
    return out;
  }

  const auto basis = hermitian_basis();
  detail::MatrixInequality above{ComplexMatrix(4) - m, basis};
  detail::MatrixInequality ppt{ComplexMatrix(4), {}};
  for (const auto& b : basis) ppt.coefficients.push_back(partial_transpose(b));
  std::vector<double> cost(basis.size(), 0.0);
  std::fill(cost.begin(), cost.begin() + 4, 1.0);
  std::vector<double> x0(basis.size(), 0.0);
  std::fill(x0.begin(), x0.begin() + 4, 2.0);  // Sigma = 2 * identity

  detail::BarrierOptions bopts;
  bopts.max_newton_steps = options.max_newton_steps;
  double upper = 0.0;
  double lower = 0.0;
  detail::BarrierIterate it;
  try {
    it = detail::solve_barrier({cost, {above, ppt}}, x0, bopts, [&](const detail::BarrierIterate& x) {
      upper = x.x[0] + x.x[1] + x.x[2] + x.x[3] - 1.0;
      lower = std::max(lower, certified_lower_bound(x.duals[0], m));
      return upper - lower <= options.tolerance;
    });
  } catch (const SolverError& e) {
    throw SolverError("generalized_robustness: gap did not close within the Newton budget; value is an upper bound",
                      e.best_value() - 1.0);
  }

  ComplexMatrix sigma(4);
  for (std::size_t k = 0; k < basis.size(); ++k) sigma += basis[k] * it.x[k];
  out.value = upper;
  out.lower_bound = lower;
  out.gap = std::max(upper - lower, 0.0);
  out.iterations = it.newton_steps;
  out.primal_residual = std::max({0.0, -hermitian_eigvals(sigma - m).front(),
                                  -hermitian_eigvals(partial_transpose(sigma)).front()});
  out.witness = DensityMatrix::trusted((sigma - m) * (1.0 / upper));
  out.free_state = DensityMatrix::trusted(sigma * (1.0 / (1.0 + upper)));
  return out;
}

double robustness_pure_oracle(const PureState& psi) {
  const auto& s = psi.schmidt();
  return 2.0 * std::sqrt(s.lambda1 * s.lambda2);
}

double robustness_lower_bound(const DensityMatrix& rho) {
  const double g = geometric_entanglement(rho);
  return g / (1.0 - g);
}

nlohmann::json to_json(const RobustnessResult& r) {
  return {{"value", r.value},
          {"lower_bound", r.lower_bound},
          {"gap", r.gap},
          {"tolerance", r.tolerance},
          {"iterations", r.iterations},
          {"primal_residual", r.primal_residual},
          {"witness_state", to_json(r.witness)},
          {"free_state", to_json(r.free_state)}};
}

}  // namespace qconv
