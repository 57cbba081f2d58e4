#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "qconv/states.hpp"

namespace qconv {

/// One term p_i |psi_i><psi_i|; the tilt bases (a_i, a_i_perp, b_i, b_i_perp)
/// are psi_i.schmidt().basis_a / basis_b.
struct DecompositionTerm {
  double probability = 0.0;
  PureState state;
};

/// rho = sum_i p_i |psi_i><psi_i| with G(psi_i) = G(rho) for every term.
struct EqualGDecomposition {
  std::vector<DecompositionTerm> terms;  // at most 4
  double common_angle = 0.0;             // asin sqrt G(rho)
};

/// Wootters-style optimal decomposition: the subnormalized eigenvectors of
/// rho are rotated so that the preconcurrences <x_i|Y(x)Y|x_i^*> become
/// real and diagonal, then mixed by a real orthogonal matrix that makes
/// every term's concurrence equal C(rho) (or zero when C(rho) = 0).
///
/// Checked before returning: reconstruction within 1e-9 (Frobenius) and
/// |G(psi_i) - G(rho)| <= 1e-8. On failure the input is nudged by
/// 1e-12 * identity/4 and the construction retried once; a second failure
/// throws SolverError.
EqualGDecomposition equal_g_decomposition(const DensityMatrix& rho);

/// sin^2(max(asin sqrt g - acos sqrt f, 0)).
double min_geometric_in_ball(double g, double f);
/// sin^2(min(asin sqrt g + acos sqrt f, pi/4)).
double max_geometric_in_ball(double g, double f);

/// A state within fidelity f of rho whose G equals min_geometric_in_ball:
/// every decomposition term is tilted towards its product state |a_i b_i>.
DensityMatrix rho_min(const DensityMatrix& rho, double f);

/// The pure state within fidelity f of psi with the largest G: psi's
/// Schmidt angle pushed up by acos sqrt f, saturating at pi/4.
PureState psi_max(const PureState& psi, double f);

nlohmann::json to_json(const EqualGDecomposition& d);

}  // namespace qconv
