#pragma once

// Dense complex matrices of dimension <= 8 and the handful of spectral
// operations the rest of the library needs.
//
// Two-qubit index convention: row/column index = 2*a + b, where a is the
// qubit-A (high-order) index and b the qubit-B index.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace qconv {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 8;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> entries);
  /// |v><v| (no normalization).
  static ComplexMatrix outer(std::span<const Complex> v);

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * kMaxDim + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * kMaxDim + j];
  }

  ComplexMatrix adjoint() const;
  ComplexMatrix conjugate() const;
  ComplexMatrix transpose() const;
  Complex trace() const;
  double frobenius_norm() const;
  /// max_ij |A_ij - conj(A_ji)|
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }
  /// (A + A^H)/2
  ComplexMatrix hermitian_part() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t dim_ = 0;
  std::array<Complex, kMaxDim * kMaxDim> data_{};
};

/// Frobenius norm of a - b.
double distance(const ComplexMatrix& a, const ComplexMatrix& b);

std::vector<Complex> multiply(const ComplexMatrix& a, std::span<const Complex> v);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k belongs to values[k]
};

/// Cyclic complex Jacobi. Throws DomainError for non-Hermitian input
/// (defect > 1e-12 * max(1, ||A||)) and SolverError when the sweep cap is
/// reached without convergence.
EigenSystem hermitian_eig(const ComplexMatrix& a);
/// Eigenvalues only (ascending); cheaper than hermitian_eig.
std::vector<double> hermitian_eigvals(const ComplexMatrix& a);

/// Singular values, descending, by one-sided (Hestenes) Jacobi. Small
/// singular values carry absolute error ~ eps * ||A||.
std::vector<double> singular_values(const ComplexMatrix& a);

/// Rebuilds V f(Lambda) V^H.
template <typename F>
ComplexMatrix spectral_map(const EigenSystem& es, F&& f) {
  const std::size_t n = es.vectors.dim();
  ComplexMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(es.values[k]);
    if (fk == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = es.vectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(es.vectors(j, k));
    }
  }
  return out;
}

/// Eigenvalues below this are an error for PSD operations; values in
/// [-kPsdTolerance, 0) are clamped to zero.
inline constexpr double kPsdTolerance = 1e-10;

/// Eigenvalues below kSqrtNoiseFloor * max(1, lambda_max) are rounding noise
/// of an exactly singular matrix and map to 0.
inline constexpr double kSqrtNoiseFloor = 1e-14;

ComplexMatrix psd_sqrt(const ComplexMatrix& a);

/// Lower-triangular L with A = L L^H, or nullopt when A is not positive
/// definite.
std::optional<ComplexMatrix> cholesky(const ComplexMatrix& a);
/// F with F F^H = A for PSD A, by diagonally pivoted Cholesky; stops once
/// the largest remaining pivot is below kSqrtNoiseFloor * max diag(A), so
/// trailing columns of F are zero for (numerically) singular A.
ComplexMatrix psd_factor(const ComplexMatrix& a);
/// Inverse of a Hermitian positive definite matrix; throws DomainError
/// otherwise.
ComplexMatrix hpd_inverse(const ComplexMatrix& a);

enum class Subsystem { A, B };

/// Partial transpose of a 4x4 two-qubit operator (B-side by default).
ComplexMatrix partial_transpose(const ComplexMatrix& a, Subsystem side = Subsystem::B);

/// Throws DomainError unless `m` is a 4x4 Hermitian, PSD, unit-trace matrix
/// within the library tolerances.
void require_density_matrix(const ComplexMatrix& m);

/// Uhlmann fidelity [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2, clamped to [0,1].
/// Evaluated as the squared trace norm of sqrt(rho) sqrt(sigma).
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);
/// arccos(sqrt(F)).
double bures_angle(const ComplexMatrix& rho, const ComplexMatrix& sigma);

/// Clamps x into [lo, hi] when it lies outside by at most 1e-9; larger
/// violations throw DomainError naming `what`.
double clamp_to_domain(double x, double lo, double hi, const char* what);

/// arcsin(sqrt(x)) and arccos(sqrt(x)) for x in [0,1] (with clamping).
double asin_sqrt(double x);
double acos_sqrt(double x);

namespace detail {
// sqrt(F) from precomputed square roots, no validation.
double root_fidelity(const ComplexMatrix& sqrt_rho, const ComplexMatrix& sqrt_sigma);
}  // namespace detail

}  // namespace qconv
