#include "barrier_sdp.hpp"

#include <cmath>
#include <optional>

#include "qconv/errors.hpp"

namespace qconv::detail {

namespace {

// log det of a Hermitian matrix, nullopt unless positive definite.
std::optional<double> log_det(const ComplexMatrix& m) {
  const auto l = cholesky(m);
  if (!l) return std::nullopt;
  double s = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) s += std::log((*l)(i, i).real());
  return 2.0 * s;
}

std::optional<double> barrier_value(const BarrierProblem& p, const std::vector<double>& x, double t) {
  double v = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) v += t * p.cost[k] * x[k];
  for (const auto& block : p.blocks) {
    const auto ld = log_det(evaluate_block(block, x));
    if (!ld) return std::nullopt;
    v -= *ld;
  }
  return v;
}

// Solves H d = r for symmetric positive definite H (row-major, n x n) by
// Cholesky, adding a growing diagonal shift if H is numerically singular.
std::vector<double> spd_solve(std::vector<double> h, std::vector<double> r, std::size_t n) {
  double diag_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_max = std::max(diag_max, h[i * n + i]);
  std::vector<double> l(n * n);
  for (double shift = 0.0;; shift = shift == 0.0 ? 1e-14 * diag_max : shift * 100.0) {
    bool ok = true;
    std::fill(l.begin(), l.end(), 0.0);
    for (std::size_t j = 0; j < n && ok; ++j) {
      double d = h[j * n + j] + shift;
      for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
      if (!(d > 0.0)) {
        ok = false;
        break;
      }
      l[j * n + j] = std::sqrt(d);
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = h[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = s / l[j * n + j];
      }
    }
    if (ok) break;
    if (shift > diag_max) throw SolverError("barrier: Newton system is singular");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) r[i] -= l[i * n + k] * r[k];
    r[i] /= l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) r[i] -= l[k * n + i] * r[k];
    r[i] /= l[i * n + i];
  }
  return r;
}

}  // namespace

ComplexMatrix evaluate_block(const MatrixInequality& block, const std::vector<double>& x) {
  ComplexMatrix f = block.constant;
  const std::size_t d = f.dim();
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0.0) continue;
    const ComplexMatrix& a = block.coefficients[k];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) f(i, j) += x[k] * a(i, j);
  }
  return f;
}

BarrierIterate solve_barrier(const BarrierProblem& problem, std::vector<double> x0,
                             const BarrierOptions& options,
                             const std::function<bool(const BarrierIterate&)>& accept) {
  const std::size_t n = x0.size();
  BarrierIterate it;
  it.x = std::move(x0);
  it.t = options.t_initial;
  if (!barrier_value(problem, it.x, it.t)) throw SolverError("barrier: starting point is infeasible");

  std::vector<double> grad(n);
  std::vector<double> hess(n * n);
  std::vector<std::vector<ComplexMatrix>> p(problem.blocks.size());

  while (true) {
    // Center for the current t.
    bool centered = false;
    int stage_steps = 0;
    while (!centered) {
      if (it.newton_steps >= options.max_newton_steps) {
        double objective = 0.0;
        for (std::size_t k = 0; k < n; ++k) objective += problem.cost[k] * it.x[k];
        throw SolverError("barrier: Newton step budget exhausted", objective);
      }
      ++it.newton_steps;
      std::fill(hess.begin(), hess.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) grad[k] = it.t * problem.cost[k];
      for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
        const auto& block = problem.blocks[j];
        const ComplexMatrix finv = hpd_inverse(evaluate_block(block, it.x));
        const std::size_t d = finv.dim();
        p[j].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
          p[j][k] = finv * block.coefficients[k];
          grad[k] -= p[j][k].trace().real();
        }
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t l = k; l < n; ++l) {
            double s = 0.0;
            for (std::size_t a = 0; a < d; ++a)
              for (std::size_t b = 0; b < d; ++b) s += (p[j][k](a, b) * p[j][l](b, a)).real();
            hess[k * n + l] += s;
            if (l != k) hess[l * n + k] += s;
          }
        }
      }
      std::vector<double> rhs(n);
      for (std::size_t k = 0; k < n; ++k) rhs[k] = -grad[k];
      const std::vector<double> dx = spd_solve(hess, rhs, n);
      double decrement2 = 0.0;
      for (std::size_t k = 0; k < n; ++k) decrement2 -= grad[k] * dx[k];
      if (decrement2 / 2.0 <= options.centering_tolerance) {
        centered = true;
        break;
      }

      const double f0 = *barrier_value(problem, it.x, it.t);
      double step = 1.0;
      std::vector<double> trial(n);
      while (true) {
        for (std::size_t k = 0; k < n; ++k) trial[k] = it.x[k] + step * dx[k];
        const auto f1 = barrier_value(problem, trial, it.t);
        if (f1 && *f1 <= f0 - 0.25 * step * decrement2) break;
        step *= 0.5;
        if (step < 1e-14) break;
      }
      if (step < 1e-14) {
        // No descent possible at working precision: treat as centered.
        centered = true;
        break;
      }
      it.x = trial;
      // Near the end of the path rounding noise keeps the decrement from
      // vanishing; a stage that stops making progress is as centered as it gets.
      if (step * decrement2 < 1e-12 || ++stage_steps >= options.max_stage_steps) centered = true;
    }

    it.duals.clear();
    for (const auto& block : problem.blocks) {
      it.duals.push_back(hpd_inverse(evaluate_block(block, it.x)) * (1.0 / it.t));
    }
    if (accept(it)) return it;
    it.t *= options.t_growth;
  }
}

}  // namespace qconv::detail
