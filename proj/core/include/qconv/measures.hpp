#pragma once

#include <cstdint>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qconv/states.hpp"

namespace qconv {

enum class MeasureSource { ClosedForm, BruteForce };

struct MeasureReport {
  double concurrence = 0.0;
  double geometric = 0.0;
  double eof = 0.0;
  MeasureSource source = MeasureSource::ClosedForm;
};

/// Wootters concurrence max{0, mu1 - mu2 - mu3 - mu4}; the mu_i are the
/// singular values of sqrt(rho) (Y(x)Y) sqrt(rho)^*.
double concurrence(const DensityMatrix& rho);
/// 2 sqrt(lambda1 lambda2).
double concurrence(const PureState& psi);

/// Two-qubit geometric entanglement, (1 - sqrt(1 - C^2))/2, in [0, 1/2].
double geometric_entanglement(const DensityMatrix& rho);
/// 1 - lambda1 (the smaller Schmidt coefficient).
double geometric_entanglement(const PureState& psi);

double geometric_from_concurrence(double c);
double concurrence_from_geometric(double g);

/// h(x) = -x log2 x - (1-x) log2(1-x), h(0) = h(1) = 0.
double binary_entropy(double x);
/// Inverse of h on [0, 1/2] by bisection (1e-12).
double inverse_binary_entropy(double y);

/// E_F = h(G).
double entanglement_of_formation(const DensityMatrix& rho);

MeasureReport measure_report(const DensityMatrix& rho);
/// Same quantities from the Schmidt coefficients.
MeasureReport measure_report(const PureState& psi);

/// {"geometric", "concurrence", "eof", "source": "closed-form" | "brute-force"}.
nlohmann::json to_json(const MeasureReport& r);

struct BruteForceOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
};

/// Independent estimate of G(rho) = 1 - max_{sigma separable} F(rho, sigma).
///
/// Separable two-qubit states are exactly the PPT states, so the maximum
/// fidelity is the value of the semidefinite program
///   max Re tr(L K)  s.t.  [[1, K], [K^H, sigma]] >= 0,  sigma^{T_B} >= 0,  tr sigma = 1,
/// with rho = L L^H. The SDP value is combined with a multi-start
/// alternating ascent over product states |a>|b> (exact for pure rho, a
/// feasible lower bound otherwise). Never touches the concurrence.
double geometric_entanglement_brute(const DensityMatrix& rho, BruteForceOptions options = {});

/// max over product states of <ab|rho|ab>, by multi-start alternating
/// maximization (each half-step is a 2x2 top eigenvector).
double best_product_overlap(const DensityMatrix& rho, int restarts, std::uint64_t seed);

/// G_g(rho): 0 if G <= g, else sin^2(asin sqrt G - asin sqrt g); g in [0, 1/2].
double generalized_geometric(const DensityMatrix& rho, double g);

enum class Monotone { EntanglementOfFormation, Concurrence, Geometric };

std::string_view monotone_name(Monotone m);

/// M_k for M = f(G): 0 if M <= k, else sin^2(asin sqrt f^{-1}(M) - asin sqrt f^{-1}(k)).
/// k must lie in the monotone's range ([0,1] for E_F and C, [0,1/2] for G).
double monotone_ball_value(const DensityMatrix& rho, double k, Monotone monotone);

/// Minimal Bures angle from rho to {sigma : G(sigma) <= g}.
double min_distance_to_bounded_entanglement(const DensityMatrix& rho, double g);

}  // namespace qconv
