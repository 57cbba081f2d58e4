#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qconv/smallmat.hpp"

namespace qconv {

using Amplitudes = std::array<Complex, 4>;
using QubitVector = std::array<Complex, 2>;

/// Schmidt form  psi = e^{i chi} (sqrt(lambda1) |a0>|b0> + sqrt(lambda2) |a1>|b1>).
///
/// Phase convention: both local A vectors and b0 have their first nonzero
/// component real-positive; b1 keeps whatever relative phase the state
/// requires. The global phase chi is dropped.
struct SchmidtData {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  std::array<QubitVector, 2> basis_a{};
  std::array<QubitVector, 2> basis_b{};
};

class PureState {
 public:
  /// Validates ||v||^2 = 1 within 1e-12.
  static PureState from_amplitudes(const Amplitudes& v);

  const Amplitudes& amplitudes() const noexcept { return amplitudes_; }
  const SchmidtData& schmidt() const noexcept { return schmidt_; }
  /// arcsin(sqrt(lambda2)), in [0, pi/4].
  double schmidt_angle() const;
  ComplexMatrix projector() const;

 private:
  PureState(const Amplitudes& v, const SchmidtData& s) : amplitudes_(v), schmidt_(s) {}
  Amplitudes amplitudes_;
  SchmidtData schmidt_;
  friend PureState schmidt_decompose(const Amplitudes& v);
};

/// 4x4 Hermitian, PSD, unit-trace two-qubit state.
class DensityMatrix {
 public:
  /// Validates the state invariants (Hermitian 1e-12, trace 1e-10, PSD -1e-10).
  static DensityMatrix from_matrix(const ComplexMatrix& m);
  static DensityMatrix from_pure(const PureState& psi);
  /// For matrices that are states by construction (convex mixtures, unitary
  /// conjugates). Only symmetrizes; does not check.
  static DensityMatrix trusted(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept { return matrix_(i, j); }

  static DensityMatrix maximally_mixed();

 private:
  explicit DensityMatrix(const ComplexMatrix& m) : matrix_(m) {}
  ComplexMatrix matrix_;
};

/// (1 - t) a + t b.
DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double t);

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double bures_angle(const DensityMatrix& rho, const DensityMatrix& sigma);

/// cos(alpha)|00> + sin(alpha)|11>, alpha in [0, pi/4].
PureState pure_from_angle(double alpha);
/// (|00> + |11>)/sqrt 2.
PureState bell_phi_plus();
/// r |phi+><phi+| + (1 - r) 1/4, r in [0, 1].
DensityMatrix werner(double r);
/// Throws DomainError for a zero vector; the input is normalized first.
PureState schmidt_decompose(const Amplitudes& v);

/// Normalized complex-Gaussian 4-vector; deterministic per seed.
PureState sample_haar_pure(std::uint64_t seed);
/// Reduced state of a Haar vector on C^4 (x) C^rank, rank in 1..4.
DensityMatrix sample_mixed(std::uint64_t seed, int rank);

/// States with fidelity to `rho` at least f.
///
/// Proposal law: a random direction (Haar pure, random mixed, random product
/// state, or a local-unitary kick of rho) mixed into rho with weight t;
/// t is placed near the fidelity boundary by a few chord steps on sqrt(F), which
/// is concave in t; about half of the draws are then pulled inward by a
/// uniform factor, which concavity keeps inside the ball. Rejection keeps only
/// boundary points with F >= f. This is an envelope probe, not a uniform
/// sampler.
std::vector<DensityMatrix> sample_fidelity_ball(const DensityMatrix& rho, double f, std::size_t n,
                                                std::uint64_t seed);

/// splitmix64 mix of (seed, index); used for per-case generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

using AnyState = std::variant<PureState, DensityMatrix>;

DensityMatrix as_density(const AnyState& s);

/// Parses the CLI state mini-language:
///   pure:<alpha>   werner:<r>   bell:phi+   haar:<seed>   file:<path>
/// Throws DomainError naming the offending token.
AnyState parse_state_spec(std::string_view spec);

}  // namespace qconv
