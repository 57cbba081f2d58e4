#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qconv/states.hpp"

namespace qconv {

enum class ConversionQuery { FidelityAtProbability, ProbabilityAtFidelity, ProbabilityAtFidelityPair, ExactProbability };

/// "fidelity-at-p", "probability-at-f", "probability-at-f1-f2", "exact-probability".
std::string_view query_name(ConversionQuery q);

struct ConversionReport {
  std::string initial;  // state descriptors, filled in by the caller
  std::string target;
  ConversionQuery query = ConversionQuery::ExactProbability;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<double> branch_discriminant;  // m1 for P_f, m2 for P_{f1,f2}
  double exact_value = 0.0;
  std::optional<double> thm1_bound;
  std::optional<double> gap;
};

/// A robustness value together with whether the solver certified it. The
/// bounds below refuse uncertified values: an underestimated R would make
/// them invalid, not merely loose.
struct Robustness {
  double value = 0.0;
  bool certified = true;
};

/// min{(1/p)(1 + R)(1 - G_target), 1}, p in (0, 1].
double thm1_fidelity_bound(const Robustness& r_initial, double g_target, double p);
/// min{(1/f)(1 + R)(1 - G_target), 1}, f in (0, 1].
double thm1_probability_bound(const Robustness& r_initial, double g_target, double f);

/// Branch decisions treat discriminants >= -1e-12 as the unit-value branch;
/// the two branches agree at the boundary.
inline constexpr double kBranchDeadBand = 1e-12;

/// min{G(psi)/G(rho), 1}; 1 when G(rho) = 0.
double exact_probability(const PureState& psi, const DensityMatrix& rho);
ConversionReport exact_probability_report(const PureState& psi, const DensityMatrix& rho);

/// Largest success probability of reaching fidelity f with rho:
/// 1 if m1 >= 0, else G(psi)/sin^2(asin sqrt G(rho) - acos sqrt f),
/// m1 = asin sqrt G(psi) - asin sqrt G(rho) + acos sqrt f.
ConversionReport p_f(const PureState& psi, const DensityMatrix& rho, double f);

/// Largest fidelity with rho at success probability p:
/// 1 if p <= G(psi)/G(rho), else cos^2(asin sqrt G(rho) - asin sqrt(G(psi)/p)).
ConversionReport f_p(const PureState& psi, const DensityMatrix& rho, double p);

/// Probability with fidelity f1 on the initial side and f2 on the target:
/// 1 if m2 >= 0, else sin^2(min(asin sqrt G(psi) + k1, pi/4)) / sin^2(asin sqrt G(rho) - k2),
/// k_i = acos sqrt f_i, m2 = asin sqrt G(psi) - asin sqrt G(rho) + k1 + k2.
ConversionReport p_f1_f2(const PureState& psi, const DensityMatrix& rho, double f1, double f2);

/// Adds the robustness bound and gap for fidelity-at-p,
/// probability-at-f and exact-probability queries (the last as f = 1).
/// Leaves probability-at-f1-f2 reports untouched.
void attach_thm1_bound(ConversionReport& report, const Robustness& r_initial, double g_target);

/// Largest Werner parameter r with F_p(psi(alpha) -> werner(r)) = 1, i.e.
/// G(werner(r)) = sin^2(alpha)/p, found by bisection on [1/3, 1] to 1e-12.
double werner_unit_fidelity_threshold(double alpha, double p);

nlohmann::json to_json(const ConversionReport& r);

}  // namespace qconv
