#include "qconv/smallmat.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <string>

#include "qconv/errors.hpp"

namespace qconv {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw DomainError("ComplexMatrix: dimension " + std::to_string(dim) + " not in [1, 8]");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
  ComplexMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> v) {
  ComplexMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = std::conj((*this)(j, i));
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(j, i);
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) s += std::norm((*this)(i, j));
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
  ComplexMatrix m(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rhs.dim_ != dim_) throw DomainError("ComplexMatrix: dimension mismatch in +");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) (*this)(i, j) += rhs(i, j);
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rhs.dim_ != dim_) throw DomainError("ComplexMatrix: dimension mismatch in -");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) (*this)(i, j) -= rhs(i, j);
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) (*this)(i, j) *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim_ != b.dim_) throw DomainError("ComplexMatrix: dimension mismatch in *");
  const std::size_t n = a.dim_;
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim_ != b.dim_) return false;
  for (std::size_t i = 0; i < a.dim_; ++i)
    for (std::size_t j = 0; j < a.dim_; ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

double distance(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).frobenius_norm(); }

std::vector<Complex> multiply(const ComplexMatrix& a, std::span<const Complex> v) {
  if (v.size() != a.dim()) throw DomainError("multiply: dimension mismatch");
  std::vector<Complex> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim() * b.dim();
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t k = 0; k < b.dim(); ++k)
        for (std::size_t l = 0; l < b.dim(); ++l)
          m(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
  return m;
}

namespace {

constexpr int kMaxSweeps = 100;

// tan of the Jacobi angle, |t| <= 1; sqrt(1 + z^2) would overflow past 1e154.
double rotation_tangent(double zeta) {
  const double z = std::abs(zeta);
  const double root = z < 1e150 ? std::sqrt(1.0 + z * z) : z;
  return std::copysign(1.0, zeta) / (z + root);
}

// Cyclic Jacobi with a relative off-diagonal test; a rotation is skipped
// once |a_pq| is negligible against sqrt(|a_pp a_qq|) or against the
// matrix scale.
EigenSystem jacobi(const ComplexMatrix& input, bool want_vectors) {
  const std::size_t n = input.dim();
  const double scale = std::max(1.0, input.frobenius_norm());
  if (input.hermiticity_defect() > 1e-12 * scale) {
    throw DomainError("hermitian_eig: matrix is not Hermitian");
  }
  ComplexMatrix a = input.hermitian_part();
  ComplexMatrix v = want_vectors ? ComplexMatrix::identity(n) : ComplexMatrix{};
  const double floor = 1e-30 * scale;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (r <= floor || r <= 1e-17 * std::sqrt(std::abs(app * aqq))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const Complex phase = apq / r;
        const Complex phase_conj = std::conj(phase);
        const double zeta = (aqq - app) / (2.0 * r);
        const double t = rotation_tangent(zeta);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- J^H A J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * phase_conj * akq;
          a(k, q) = s * akp + c * phase_conj * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        if (want_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const Complex vkp = v(k, p);
            const Complex vkq = v(k, q);
            v(k, p) = c * vkp - s * phase_conj * vkq;
            v(k, q) = s * vkp + c * phase_conj * vkq;
          }
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += std::norm(a(i, j));
    if (std::sqrt(off) > 1e-13 * scale) {
      throw SolverError("hermitian_eig: Jacobi sweeps did not converge");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenSystem es;
  es.values.resize(n);
  if (want_vectors) es.vectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    es.values[k] = a(order[k], order[k]).real();
    if (want_vectors)
      for (std::size_t i = 0; i < n; ++i) es.vectors(i, k) = v(i, order[k]);
  }
  return es;
}

}  // namespace

EigenSystem hermitian_eig(const ComplexMatrix& a) { return jacobi(a, true); }

std::vector<double> hermitian_eigvals(const ComplexMatrix& a) { return jacobi(a, false).values; }

std::vector<double> singular_values(const ComplexMatrix& input) {
  const std::size_t n = input.dim();
  ComplexMatrix a = input;
  const double scale = std::max(1e-300, input.frobenius_norm());
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          alpha += std::norm(a(k, p));
          beta += std::norm(a(k, q));
          gamma += std::conj(a(k, p)) * a(k, q);
        }
        const double r = std::abs(gamma);
        if (r <= 1e-30 * scale * scale || r <= 2e-15 * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Complex phase_conj = std::conj(gamma / r);
        const double zeta = (beta - alpha) / (2.0 * r);
        const double t = rotation_tangent(zeta);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * phase_conj * akq;
          a(k, q) = s * akp + c * phase_conj * akq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw SolverError("singular_values: one-sided Jacobi did not converge");
  std::vector<double> sv(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) s2 += std::norm(a(i, k));
    sv[k] = std::sqrt(s2);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  const EigenSystem es = hermitian_eig(a);
  if (es.values.front() < -kPsdTolerance) {
    throw DomainError("psd_sqrt: matrix is not PSD (eigenvalue " +
                      std::to_string(es.values.front()) + ")");
  }
  const double floor = kSqrtNoiseFloor * std::max(1.0, es.values.back());
  return spectral_map(es, [floor](double x) { return x <= floor ? 0.0 : std::sqrt(x); });
}

std::optional<ComplexMatrix> cholesky(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

ComplexMatrix psd_factor(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix s = a.hermitian_part();
  ComplexMatrix f(n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, s(i, i).real());
  const double floor = kSqrtNoiseFloor * max_diag;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (s(i, i).real() > s(p, p).real()) p = i;
    const double d = s(p, p).real();
    if (!(d > floor)) break;
    const double root = std::sqrt(d);
    for (std::size_t i = 0; i < n; ++i) f(i, k) = s(i, p) / root;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) -= f(i, k) * std::conj(f(j, k));
  }
  return f;
}

ComplexMatrix hpd_inverse(const ComplexMatrix& a) {
  const auto l = cholesky(a);
  if (!l) throw DomainError("hpd_inverse: matrix is not positive definite");
  const std::size_t n = a.dim();
  // Invert L (lower triangular), then A^{-1} = L^{-H} L^{-1}.
  ComplexMatrix linv(n);
  for (std::size_t j = 0; j < n; ++j) {
    linv(j, j) = 1.0 / (*l)(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = 0.0;
      for (std::size_t k = j; k < i; ++k) s -= (*l)(i, k) * linv(k, j);
      linv(i, j) = s / (*l)(i, i);
    }
  }
  ComplexMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      Complex s = 0.0;
      for (std::size_t k = i; k < n; ++k) s += std::conj(linv(k, i)) * linv(k, j);
      inv(i, j) = s;
      inv(j, i) = std::conj(s);
    }
  return inv;
}

ComplexMatrix partial_transpose(const ComplexMatrix& a, Subsystem side) {
  if (a.dim() != 4) throw DomainError("partial_transpose: expected a 4x4 two-qubit operator");
  ComplexMatrix out(4);
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t b1 = 0; b1 < 2; ++b1)
      for (std::size_t a2 = 0; a2 < 2; ++a2)
        for (std::size_t b2 = 0; b2 < 2; ++b2) {
          const std::size_t row = 2 * a1 + b1;
          const std::size_t col = 2 * a2 + b2;
          if (side == Subsystem::B) {
            out(row, col) = a(2 * a1 + b2, 2 * a2 + b1);
          } else {
            out(row, col) = a(2 * a2 + b1, 2 * a1 + b2);
          }
        }
  return out;
}

void require_density_matrix(const ComplexMatrix& m) {
  if (m.dim() != 4) throw DomainError("density matrix must be 4x4");
  if (!m.is_hermitian(1e-12)) throw DomainError("density matrix is not Hermitian");
  const Complex tr = m.trace();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw DomainError("density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  if (hermitian_eigvals(m).front() < -kPsdTolerance) throw DomainError("density matrix is not PSD");
}

namespace detail {

double root_fidelity(const ComplexMatrix& sqrt_rho, const ComplexMatrix& sqrt_sigma) {
  double root = 0.0;
  for (double x : singular_values(sqrt_rho * sqrt_sigma)) root += x;
  return std::clamp(root, 0.0, 1.0);
}

}  // namespace detail

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_density_matrix(rho);
  require_density_matrix(sigma);
  const double root = detail::root_fidelity(psd_sqrt(rho), psd_sqrt(sigma));
  return root * root;
}

double bures_angle(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  return acos_sqrt(fidelity(rho, sigma));
}

double clamp_to_domain(double x, double lo, double hi, const char* what) {
  constexpr double kSlack = 1e-9;
  if (!(x >= lo - kSlack && x <= hi + kSlack)) {
    throw DomainError(std::string(what) + ": argument " + std::to_string(x) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return std::clamp(x, lo, hi);
}

// Above 1/2 the complementary form keeps full relative accuracy in 1 - x.
double asin_sqrt(double x) {
  const double v = clamp_to_domain(x, 0.0, 1.0, "asin_sqrt");
  return v <= 0.5 ? std::asin(std::sqrt(v)) : std::acos(std::sqrt(1.0 - v));
}

double acos_sqrt(double x) {
  const double v = clamp_to_domain(x, 0.0, 1.0, "acos_sqrt");
  return v <= 0.5 ? std::acos(std::sqrt(v)) : std::asin(std::sqrt(1.0 - v));
}

}  // namespace qconv
