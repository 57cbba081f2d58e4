#include "qconv/measures.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <random>

#include "barrier_sdp.hpp"
#include "qconv/errors.hpp"

namespace qconv {

namespace {

ComplexMatrix spin_flip() {
  ComplexMatrix y(4);
  y(0, 3) = y(3, 0) = -1.0;
  y(1, 2) = y(2, 1) = 1.0;
  return y;
}

// Top eigenvector of a 2x2 Hermitian matrix, and its eigenvalue.
std::pair<QubitVector, double> top_eigen2(const ComplexMatrix& m) {
  const EigenSystem es = hermitian_eig(m);
  return {{es.vectors(0, 1), es.vectors(1, 1)}, es.values[1]};
}

// <a| rho |a> on qubit B (fix_a) or <b| rho |b> on qubit A.
ComplexMatrix contract(const ComplexMatrix& rho, const QubitVector& v, bool fix_a) {
  ComplexMatrix out(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) {
          const std::size_t row = fix_a ? 2 * k + i : 2 * i + k;
          const std::size_t col = fix_a ? 2 * l + j : 2 * j + l;
          s += std::conj(v[k]) * v[l] * rho(row, col);
        }
      out(i, j) = s;
    }
  return out.hermitian_part();
}

double ascend_product(const ComplexMatrix& rho, QubitVector a) {
  double value = -1.0;
  for (int iter = 0; iter < 1000; ++iter) {
    const auto [b, vb] = top_eigen2(contract(rho, a, true));
    const auto [a_next, va] = top_eigen2(contract(rho, b, false));
    a = a_next;
    const bool stalled = va <= value + 1e-15;
    value = std::max(value, va);
    if (stalled) break;
  }
  return value;
}

// Traceless Hermitian basis of 4x4 matrices (15 elements).
std::vector<ComplexMatrix> traceless_basis() {
  std::vector<ComplexMatrix> basis;
  for (std::size_t k = 0; k < 3; ++k) {
    ComplexMatrix m(4);
    m(k, k) = 1.0;
    m(3, 3) = -1.0;
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

// max Re tr(L K) over [[1_r, K], [K^H, sigma]] >= 0, sigma^{T_B} >= 0, tr sigma = 1.
double ppt_root_fidelity(const DensityMatrix& rho) {
  const EigenSystem es = hermitian_eig(rho.matrix());
  std::vector<std::vector<Complex>> columns;  // columns of L
  for (std::size_t k = 0; k < 4; ++k) {
    if (es.values[k] <= 1e-13) continue;
    std::vector<Complex> col(4);
    for (std::size_t i = 0; i < 4; ++i) col[i] = std::sqrt(es.values[k]) * es.vectors(i, k);
    columns.push_back(col);
  }
  const std::size_t r = columns.size();
  const std::size_t d = r + 4;
  const auto basis = traceless_basis();
  const std::size_t nvars = basis.size() + 8 * r;

  detail::MatrixInequality joint{ComplexMatrix(d), {}};
  for (std::size_t i = 0; i < r; ++i) joint.constant(i, i) = 1.0;
  for (std::size_t i = 0; i < 4; ++i) joint.constant(r + i, r + i) = 0.25;
  detail::MatrixInequality ppt{ComplexMatrix::identity(4) * 0.25, {}};
  std::vector<double> cost(nvars, 0.0);

  for (const auto& b : basis) {
    ComplexMatrix embedded(d);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) embedded(r + i, r + j) = b(i, j);
    joint.coefficients.push_back(embedded);
    ppt.coefficients.push_back(partial_transpose(b));
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      ComplexMatrix re(d);
      re(i, r + j) = re(r + j, i) = 1.0;
      ComplexMatrix im(d);
      im(i, r + j) = Complex(0.0, 1.0);
      im(r + j, i) = Complex(0.0, -1.0);
      // Re(L_ji K_ij) = Re(L_ji) Re(K_ij) - Im(L_ji) Im(K_ij); minimize the negative.
      cost[joint.coefficients.size()] = -columns[i][j].real();
      joint.coefficients.push_back(re);
      ppt.coefficients.push_back(ComplexMatrix(4));
      cost[joint.coefficients.size()] = columns[i][j].imag();
      joint.coefficients.push_back(im);
      ppt.coefficients.push_back(ComplexMatrix(4));
    }

  detail::BarrierProblem problem{cost, {joint, ppt}};
  const double total_dim = static_cast<double>(d + 4);
  const auto it = detail::solve_barrier(problem, std::vector<double>(nvars, 0.0), {},
                                        [&](const detail::BarrierIterate& x) { return total_dim / x.t <= 1e-9; });
  double value = 0.0;
  for (std::size_t k = 0; k < nvars; ++k) value -= cost[k] * it.x[k];
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

namespace {

// For rho = F F^H the mu_i are also the singular values of the symmetric
// matrix F^H Y F^*, and a pivoted Cholesky factor is cheaper than sqrt(rho).
double concurrence_from_factor(const ComplexMatrix& f) {
  const auto mu = singular_values(f.adjoint() * spin_flip() * f.conjugate());
  return std::clamp(mu[0] - mu[1] - mu[2] - mu[3], 0.0, 1.0);
}

// The column of a rank-one factor, normalized; nullopt for higher rank.
std::optional<Amplitudes> rank_one_vector(const ComplexMatrix& f) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (f(i, 1) != Complex(0.0)) return std::nullopt;
  }
  Amplitudes v;
  double n2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    v[i] = f(i, 0);
    n2 += std::norm(v[i]);
  }
  for (Complex& x : v) x /= std::sqrt(n2);
  return v;
}

}  // namespace

double concurrence(const DensityMatrix& rho) { return concurrence_from_factor(psd_factor(rho.matrix())); }

double concurrence(const PureState& psi) {
  const auto& s = psi.schmidt();
  return std::min(2.0 * std::sqrt(s.lambda1 * s.lambda2), 1.0);
}

double geometric_entanglement(const DensityMatrix& rho) {
  // G from C is sqrt-sensitive at C = 1, so (numerically) pure states take the
  // Schmidt route, which stays accurate up to G = 1/2.
  const ComplexMatrix f = psd_factor(rho.matrix());
  if (const auto v = rank_one_vector(f)) return schmidt_decompose(*v).schmidt().lambda2;
  return geometric_from_concurrence(concurrence_from_factor(f));
}

double geometric_entanglement(const PureState& psi) { return psi.schmidt().lambda2; }

double geometric_from_concurrence(double c) {
  const double x = clamp_to_domain(c, 0.0, 1.0, "concurrence");
  // (1 - sqrt(1 - C^2))/2 without the cancellation at small C.
  return x * x / (2.0 * (1.0 + std::sqrt(1.0 - x * x)));
}

double concurrence_from_geometric(double g) {
  const double x = clamp_to_domain(g, 0.0, 0.5, "geometric entanglement");
  return 2.0 * std::sqrt(x * (1.0 - x));
}

double binary_entropy(double x) {
  const double p = clamp_to_domain(x, 0.0, 1.0, "binary_entropy");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

double inverse_binary_entropy(double y) {
  const double target = clamp_to_domain(y, 0.0, 1.0, "inverse_binary_entropy");
  if (target <= 0.0) return 0.0;
  if (target >= 1.0) return 0.5;
  // Bisect to adjacent doubles: small x needs relative, not absolute, accuracy.
  double lo = 0.0;
  double hi = 0.5;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (binary_entropy(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double entanglement_of_formation(const DensityMatrix& rho) {
  return binary_entropy(geometric_entanglement(rho));
}

MeasureReport measure_report(const DensityMatrix& rho) {
  MeasureReport r;
  r.concurrence = concurrence(rho);
  r.geometric = geometric_entanglement(rho);
  r.eof = binary_entropy(r.geometric);
  return r;
}

MeasureReport measure_report(const PureState& psi) {
  MeasureReport r;
  r.concurrence = concurrence(psi);
  r.geometric = geometric_entanglement(psi);
  r.eof = binary_entropy(r.geometric);
  return r;
}

nlohmann::json to_json(const MeasureReport& r) {
  return {{"geometric", r.geometric},
          {"concurrence", r.concurrence},
          {"eof", r.eof},
          {"source", r.source == MeasureSource::ClosedForm ? "closed-form" : "brute-force"}};
}

double best_product_overlap(const DensityMatrix& rho, int restarts, std::uint64_t seed) {
  const ComplexMatrix& m = rho.matrix();
  // Deterministic start from the Schmidt basis of the top eigenvector.
  const EigenSystem es = hermitian_eig(m);
  Amplitudes top;
  for (std::size_t i = 0; i < 4; ++i) top[i] = es.vectors(i, 3);
  double best = ascend_product(m, schmidt_decompose(top).schmidt().basis_a[0]);

  std::normal_distribution<double> nd(0.0, 1.0);
  for (int k = 0; k < restarts; ++k) {
    std::mt19937_64 gen(derive_seed(seed, static_cast<std::uint64_t>(k)));
    QubitVector a;
    for (Complex& z : a) {
      const double re = nd(gen);
      z = Complex(re, nd(gen));
    }
    const double n = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
    a[0] /= n;
    a[1] /= n;
    best = std::max(best, ascend_product(m, a));
  }
  return std::clamp(best, 0.0, 1.0);
}

double geometric_entanglement_brute(const DensityMatrix& rho, BruteForceOptions options) {
  const double product = best_product_overlap(rho, options.restarts, options.seed);
  const double root = ppt_root_fidelity(rho);
  return std::clamp(1.0 - std::max(product, root * root), 0.0, 1.0);
}

double generalized_geometric(const DensityMatrix& rho, double g) {
  const double bound = clamp_to_domain(g, 0.0, 0.5, "generalized_geometric: g");
  const double geo = geometric_entanglement(rho);
  if (geo <= bound) return 0.0;
  const double s = std::sin(asin_sqrt(geo) - asin_sqrt(bound));
  return s * s;
}

std::string_view monotone_name(Monotone m) {
  switch (m) {
    case Monotone::EntanglementOfFormation:
      return "eof";
    case Monotone::Concurrence:
      return "concurrence";
    case Monotone::Geometric:
      return "geometric";
  }
  return "unknown";
}

double monotone_ball_value(const DensityMatrix& rho, double k, Monotone monotone) {
  switch (monotone) {
    case Monotone::EntanglementOfFormation:
      return generalized_geometric(rho, inverse_binary_entropy(clamp_to_domain(k, 0.0, 1.0, "E_F level")));
    case Monotone::Concurrence:
      return generalized_geometric(rho, geometric_from_concurrence(k));
    case Monotone::Geometric:
      return generalized_geometric(rho, k);
  }
  throw DomainError("monotone_ball_value: unknown monotone");
}

double min_distance_to_bounded_entanglement(const DensityMatrix& rho, double g) {
  const double bound = clamp_to_domain(g, 0.0, 0.5, "min_distance: g");
  return std::max(asin_sqrt(geometric_entanglement(rho)) - asin_sqrt(bound), 0.0);
}

}  // namespace qconv
