#include "qconv/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "qconv/errors.hpp"
#include "qconv/measures.hpp"
#include "qconv/state_io.hpp"

namespace qconv {

namespace {

using Vec4 = std::array<Complex, 4>;

constexpr double kReconstructionTolerance = 1e-9;
constexpr double kEqualGTolerance = 1e-8;

// <a| (Y(x)Y) |b^*>
Complex preconcurrence(const Vec4& a, const Vec4& b) {
  const Vec4 flipped{-std::conj(b[3]), std::conj(b[2]), std::conj(b[1]), -std::conj(b[0])};
  Complex s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += std::conj(a[i]) * flipped[i];
  return s;
}

Complex inner(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Takagi factorization of a complex symmetric n x n matrix tau: unitary
// columns w_i with tau conj(w_i) = mu_i w_i, mu_i >= 0 descending. Uses the
// real symmetric embedding [[Re tau, Im tau], [Im tau, -Re tau]], whose
// eigenpairs are +-mu_i with eigenvector (Re w, Im w).
std::vector<std::vector<Complex>> takagi_vectors(const std::vector<std::vector<Complex>>& tau) {
  const std::size_t n = tau.size();
  ComplexMatrix m(2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = tau[i][j].real();
      m(i, n + j) = tau[i][j].imag();
      m(n + i, j) = tau[i][j].imag();
      m(n + i, n + j) = -tau[i][j].real();
    }
  const EigenSystem es = hermitian_eig(m);
  const double scale = std::max(std::abs(es.values.front()), std::abs(es.values.back()));
  const double zero = 1e-12 * std::max(scale, 1e-300);

  auto column = [&](std::size_t k) {
    std::vector<Complex> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = Complex(es.vectors(i, k).real(), es.vectors(n + i, k).real());
    return w;
  };

  std::vector<std::vector<Complex>> out;
  for (std::size_t k = 2 * n; k-- > 0 && out.size() < n;) {
    if (es.values[k] <= zero) break;
    out.push_back(column(k));
  }
  // The (near-)kernel is a complex subspace; pick a complex-orthonormal
  // basis of it from its real eigenvectors, largest residual first.
  std::vector<std::vector<Complex>> kernel;
  for (std::size_t k = 0; k < 2 * n; ++k)
    if (std::abs(es.values[k]) <= zero) kernel.push_back(column(k));
  while (out.size() < n) {
    std::optional<std::vector<Complex>> best;
    double best_norm = 0.0;
    for (auto cand : kernel) {
      for (const auto& w : out) {
        const Complex ov = inner(w, cand);
        for (std::size_t i = 0; i < n; ++i) cand[i] -= ov * w[i];
      }
      const double nrm = std::sqrt(inner(cand, cand).real());
      if (nrm > best_norm) {
        best_norm = nrm;
        best = cand;
      }
    }
    if (!best || best_norm < 1e-6) {
      throw SolverError("equal_g_decomposition: spin-flip spectrum is numerically degenerate (kernel residual " +
                        std::to_string(best_norm) + ")");
    }
    for (Complex& z : *best) z /= best_norm;
    out.push_back(*best);
  }
  return out;
}

// Real orthogonal W (row-major) with zero diagonal of W K W^T, for a real
// symmetric traceless K. Peels off one direction u with u^T K u = 0 at a time.
std::vector<double> zero_diagonal_rotation(std::vector<double> k, std::size_t n) {
  std::vector<double> q(n * n, 0.0);  // accumulated basis, columns
  for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

  for (std::size_t s = 0; s + 1 < n; ++s) {
    const std::size_t m = n - s;
    ComplexMatrix sub(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) sub(i, j) = k[(s + i) * n + (s + j)];
    const EigenSystem es = hermitian_eig(sub);
    const double lo = es.values.front();
    const double hi = es.values.back();
    std::vector<double> u(m, 0.0);
    if (hi - lo <= 1e-300) {
      u[0] = 1.0;
    } else {
      const double c2 = std::clamp(-lo / (hi - lo), 0.0, 1.0);
      const double c = std::sqrt(c2);
      const double sn = std::sqrt(1.0 - c2);
      for (std::size_t i = 0; i < m; ++i) u[i] = c * es.vectors(i, m - 1).real() + sn * es.vectors(i, 0).real();
    }
    // Householder reflection H = 1 - 2 v v^T / v^T v with H e_1 = u.
    std::vector<double> v = u;
    v[0] -= 1.0;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    if (vv < 1e-30) continue;
    auto reflect_rows = [&](std::vector<double>& a, std::size_t cols) {
      for (std::size_t c = 0; c < cols; ++c) {
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += v[i] * a[(s + i) * cols + c];
        for (std::size_t i = 0; i < m; ++i) a[(s + i) * cols + c] -= 2.0 * d / vv * v[i];
      }
    };
    auto reflect_cols = [&](std::vector<double>& a, std::size_t rows) {
      for (std::size_t r = 0; r < rows; ++r) {
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += a[r * n + s + i] * v[i];
        for (std::size_t i = 0; i < m; ++i) a[r * n + s + i] -= 2.0 * d / vv * v[i];
      }
    };
    reflect_rows(k, n);
    reflect_cols(k, n);
    reflect_cols(q, n);
  }
  // Q^T K Q has zero diagonal; W = Q^T.
  std::vector<double> w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i * n + j] = q[j * n + i];
  return w;
}

// Phases psi_j with sum_j mu_j e^{i psi_j} = 0, for mu descending with
// mu_1 <= mu_2 + mu_3 + mu_4: two triangles sharing a diagonal of length L.
std::array<double, 4> closing_phases(const std::array<double, 4>& mu) {
  std::array<double, 4> psi{0.0, std::numbers::pi, 0.0, std::numbers::pi};
  const double diag = std::max(mu[0] - mu[1], mu[2] - mu[3]);
  if (mu[0] * mu[1] > 0.0) {
    psi[1] = std::acos(std::clamp((diag * diag - mu[0] * mu[0] - mu[1] * mu[1]) / (2.0 * mu[0] * mu[1]), -1.0, 1.0));
  }
  const Complex target = -(mu[0] + mu[1] * std::polar(1.0, psi[1]));
  if (diag > 0.0 && mu[2] > 0.0) {
    const double delta = std::arg(target);
    psi[2] = delta + std::acos(std::clamp((diag * diag + mu[2] * mu[2] - mu[3] * mu[3]) / (2.0 * diag * mu[2]), -1.0, 1.0));
    const Complex rest = target - mu[2] * std::polar(1.0, psi[2]);
    if (std::abs(rest) > 0.0) psi[3] = std::arg(rest);
  }
  return psi;
}

bool satisfies_invariants(const EqualGDecomposition& d, const ComplexMatrix& rho, double g) {
  ComplexMatrix recon(4);
  for (const auto& t : d.terms) {
    recon += t.state.projector() * t.probability;
    if (std::abs(geometric_entanglement(t.state) - g) > kEqualGTolerance) return false;
  }
  return distance(recon, rho) <= kReconstructionTolerance;
}

std::optional<EqualGDecomposition> attempt(const ComplexMatrix& rho, const ComplexMatrix& reference, double g) {
  const EigenSystem es = hermitian_eig(rho);
  std::vector<Vec4> v;
  for (std::size_t k = 4; k-- > 0;) {
    if (es.values[k] <= 1e-14) continue;
    Vec4 col;
    for (std::size_t i = 0; i < 4; ++i) col[i] = std::sqrt(es.values[k]) * es.vectors(i, k);
    v.push_back(col);
  }
  const std::size_t n = v.size();
  std::vector<std::vector<Complex>> tau(n, std::vector<Complex>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) tau[i][j] = preconcurrence(v[i], v[j]);
  const auto w = takagi_vectors(tau);

  std::array<Vec4, 4> x{};
  std::array<double, 4> mu{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < 4; ++a) x[i][a] += w[i][j] * v[j][a];
    mu[i] = std::max(preconcurrence(x[i], x[i]).real(), 0.0);
  }
  const double c = mu[0] - mu[1] - mu[2] - mu[3];

  std::array<Vec4, 4> z{};
  if (c > 0.0) {
    std::array<Vec4, 4> y = x;
    for (std::size_t j = 1; j < 4; ++j)
      for (Complex& e : y[j]) e *= Complex(0.0, 1.0);
    std::vector<double> k(16);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        Complex gram = 0.0;
        for (std::size_t a = 0; a < 4; ++a) gram += std::conj(y[i][a]) * y[j][a];
        k[i * 4 + j] = -c * gram.real();
      }
    k[0] += mu[0];
    for (std::size_t j = 1; j < 4; ++j) k[j * 4 + j] -= mu[j];
    const auto rot = zero_diagonal_rotation(k, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t a = 0; a < 4; ++a) z[i][a] += rot[i * 4 + j] * y[j][a];
  } else {
    const auto psi = closing_phases(mu);
    constexpr double h[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const Complex coeff = 0.5 * h[i][j] * std::polar(1.0, -psi[j] / 2.0);
        for (std::size_t a = 0; a < 4; ++a) z[i][a] += coeff * x[j][a];
      }
  }

  EqualGDecomposition d;
  d.common_angle = asin_sqrt(g);
  for (const Vec4& zi : z) {
    double p = 0.0;
    for (const Complex& e : zi) p += std::norm(e);
    if (p <= 1e-15) continue;
    d.terms.push_back({p, schmidt_decompose(zi)});
  }
  if (!satisfies_invariants(d, reference, g)) return std::nullopt;
  return d;
}

}  // namespace

EqualGDecomposition equal_g_decomposition(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix();
  const double g = geometric_entanglement(rho);
  if (auto d = attempt(m, m, g)) return *d;
  const ComplexMatrix nudged = (m + ComplexMatrix::identity(4) * 0.25e-12) * (1.0 / (1.0 + 1e-12));
  if (auto d = attempt(nudged, m, g)) return *d;
  throw SolverError("equal_g_decomposition: construction failed its reconstruction/equal-G checks "
                    "(ill-conditioned spin-flip spectrum)");
}

double min_geometric_in_ball(double g, double f) {
  const double gg = clamp_to_domain(g, 0.0, 0.5, "min_geometric_in_ball: g");
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("min_geometric_in_ball: f must lie in (0, 1]");
  const double s = std::sin(std::max(asin_sqrt(gg) - acos_sqrt(f), 0.0));
  return s * s;
}

double max_geometric_in_ball(double g, double f) {
  const double gg = clamp_to_domain(g, 0.0, 0.5, "max_geometric_in_ball: g");
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("max_geometric_in_ball: f must lie in (0, 1]");
  const double s = std::sin(std::min(asin_sqrt(gg) + acos_sqrt(f), std::numbers::pi / 4));
  return s * s;
}

DensityMatrix rho_min(const DensityMatrix& rho, double f) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("rho_min: f must lie in (0, 1]");
  if (f == 1.0) return rho;
  const EqualGDecomposition d = equal_g_decomposition(rho);
  const double beta = std::max(d.common_angle - acos_sqrt(f), 0.0);

  std::vector<Amplitudes> tilted;
  std::vector<double> weights;
  double norm = 0.0;
  for (const auto& t : d.terms) {
    const auto& s = t.state.schmidt();
    Amplitudes phi;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        phi[2 * i + j] = std::cos(beta) * s.basis_a[0][i] * s.basis_b[0][j] +
                         std::sin(beta) * s.basis_a[1][i] * s.basis_b[1][j];
    Complex overlap = 0.0;
    for (std::size_t i = 0; i < 4; ++i) overlap += std::conj(t.state.amplitudes()[i]) * phi[i];
    tilted.push_back(phi);
    weights.push_back(t.probability * std::norm(overlap));
    norm += weights.back();
  }
  if (!(norm > 0.0)) throw SolverError("rho_min: vanishing overlap normalization");
  ComplexMatrix out(4);
  for (std::size_t i = 0; i < tilted.size(); ++i) out += ComplexMatrix::outer(tilted[i]) * (weights[i] / norm);
  return DensityMatrix::trusted(out);
}

PureState psi_max(const PureState& psi, double f) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("psi_max: f must lie in (0, 1]");
  if (f == 1.0) return psi;
  const auto& s = psi.schmidt();
  const double angle = std::min(psi.schmidt_angle() + acos_sqrt(f), std::numbers::pi / 4);
  Amplitudes v;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      v[2 * i + j] = std::cos(angle) * s.basis_a[0][i] * s.basis_b[0][j] +
                     std::sin(angle) * s.basis_a[1][i] * s.basis_b[1][j];
  return PureState::from_amplitudes(v);
}

nlohmann::json to_json(const EqualGDecomposition& d) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : d.terms) {
    const auto& s = t.state.schmidt();
    auto qubit = [](const QubitVector& q) { return nlohmann::json::array({complex_to_json(q[0]), complex_to_json(q[1])}); };
    terms.push_back({{"probability", t.probability},
                     {"state", to_json(t.state)},
                     {"geometric", geometric_entanglement(t.state)},
                     {"tilt_bases",
                      {{"a", qubit(s.basis_a[0])},
                       {"a_perp", qubit(s.basis_a[1])},
                       {"b", qubit(s.basis_b[0])},
                       {"b_perp", qubit(s.basis_b[1])}}}});
  }
  return {{"common_angle", d.common_angle}, {"terms", terms}};
}

}  // namespace qconv
