#include "qconv/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qconv/errors.hpp"
#include "qconv/measures.hpp"

namespace qconv {

namespace {

void require_unit_interval(double x, const char* what) {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError(std::string(what) + " must lie in (0, 1]");
}

double pinned_g(double g) { return clamp_to_domain(g, 0.0, 0.5, "geometric entanglement"); }

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

double thm1_bound(const Robustness& r, double g_target, double x, const char* what) {
  if (!r.certified) {
    throw SolverError("refusing a robustness bound built on an uncertified robustness value", r.value);
  }
  if (!(r.value >= 0.0)) throw DomainError("robustness must be non-negative");
  require_unit_interval(x, what);
  const double g = clamp_to_domain(g_target, 0.0, 1.0, "target geometric entanglement");
  return std::min((1.0 + r.value) * (1.0 - g) / x, 1.0);
}

ConversionReport make_report(ConversionQuery q) {
  ConversionReport r;
  r.query = q;
  return r;
}

}  // namespace

std::string_view query_name(ConversionQuery q) {
  switch (q) {
    case ConversionQuery::FidelityAtProbability:
      return "fidelity-at-p";
    case ConversionQuery::ProbabilityAtFidelity:
      return "probability-at-f";
    case ConversionQuery::ProbabilityAtFidelityPair:
      return "probability-at-f1-f2";
    case ConversionQuery::ExactProbability:
      return "exact-probability";
  }
  return "unknown";
}

double thm1_fidelity_bound(const Robustness& r_initial, double g_target, double p) {
  return thm1_bound(r_initial, g_target, p, "p");
}

double thm1_probability_bound(const Robustness& r_initial, double g_target, double f) {
  return thm1_bound(r_initial, g_target, f, "f");
}

double exact_probability(const PureState& psi, const DensityMatrix& rho) {
  const double g_psi = pinned_g(geometric_entanglement(psi));
  const double g_rho = pinned_g(geometric_entanglement(rho));
  if (asin_sqrt(g_psi) - asin_sqrt(g_rho) >= -kBranchDeadBand) return 1.0;
  return std::min(g_psi / g_rho, 1.0);
}

ConversionReport exact_probability_report(const PureState& psi, const DensityMatrix& rho) {
  ConversionReport r = make_report(ConversionQuery::ExactProbability);
  r.exact_value = exact_probability(psi, rho);
  return r;
}

ConversionReport p_f(const PureState& psi, const DensityMatrix& rho, double f) {
  require_unit_interval(f, "f");
  const double g_psi = pinned_g(geometric_entanglement(psi));
  const double g_rho = pinned_g(geometric_entanglement(rho));
  const double k = acos_sqrt(f);
  const double m1 = asin_sqrt(g_psi) - asin_sqrt(g_rho) + k;

  ConversionReport r = make_report(ConversionQuery::ProbabilityAtFidelity);
  r.parameters = {{"f", f}};
  r.branch_discriminant = m1;
  if (m1 >= -kBranchDeadBand) {
    r.exact_value = 1.0;
  } else {
    const double den = k == 0.0 ? g_rho : sin2(asin_sqrt(g_rho) - k);
    r.exact_value = std::clamp(g_psi / den, 0.0, 1.0);
  }
  return r;
}

ConversionReport f_p(const PureState& psi, const DensityMatrix& rho, double p) {
  require_unit_interval(p, "p");
  const double g_psi = pinned_g(geometric_entanglement(psi));
  const double g_rho = pinned_g(geometric_entanglement(rho));

  ConversionReport r = make_report(ConversionQuery::FidelityAtProbability);
  r.parameters = {{"p", p}};
  if (g_psi - p * g_rho >= -kBranchDeadBand) {
    r.exact_value = 1.0;
  } else {
    // On this branch G(psi)/p < G(rho) <= 1/2; anything larger is a bug upstream.
    const double ratio = clamp_to_domain(g_psi / p, 0.0, 0.5, "f_p: G(psi)/p");
    const double c = std::cos(asin_sqrt(g_rho) - asin_sqrt(ratio));
    r.exact_value = std::clamp(c * c, 0.0, 1.0);
  }
  return r;
}

ConversionReport p_f1_f2(const PureState& psi, const DensityMatrix& rho, double f1, double f2) {
  require_unit_interval(f1, "f1");
  require_unit_interval(f2, "f2");
  const double g_psi = pinned_g(geometric_entanglement(psi));
  const double g_rho = pinned_g(geometric_entanglement(rho));
  const double k1 = acos_sqrt(f1);
  const double k2 = acos_sqrt(f2);
  const double m2 = asin_sqrt(g_psi) - asin_sqrt(g_rho) + k1 + k2;

  ConversionReport r = make_report(ConversionQuery::ProbabilityAtFidelityPair);
  r.parameters = {{"f1", f1}, {"f2", f2}};
  r.branch_discriminant = m2;
  if (m2 >= -kBranchDeadBand) {
    r.exact_value = 1.0;
  } else {
    // Zero-radius sides use G directly so that f1 = f2 = 1 is bit-identical
    // to exact_probability.
    const double num = k1 == 0.0 ? g_psi : sin2(std::min(asin_sqrt(g_psi) + k1, std::numbers::pi / 4));
    const double den = k2 == 0.0 ? g_rho : sin2(asin_sqrt(g_rho) - k2);
    r.exact_value = std::min(num / den, 1.0);
  }
  return r;
}

void attach_thm1_bound(ConversionReport& report, const Robustness& r_initial, double g_target) {
  double bound = 0.0;
  switch (report.query) {
    case ConversionQuery::FidelityAtProbability:
      bound = thm1_fidelity_bound(r_initial, g_target, report.parameters.at("p").get<double>());
      break;
    case ConversionQuery::ProbabilityAtFidelity:
      bound = thm1_probability_bound(r_initial, g_target, report.parameters.at("f").get<double>());
      break;
    case ConversionQuery::ExactProbability:
      bound = thm1_probability_bound(r_initial, g_target, 1.0);
      break;
    case ConversionQuery::ProbabilityAtFidelityPair:
      return;
  }
  report.thm1_bound = bound;
  report.gap = std::max(bound - report.exact_value, 0.0);
}

double werner_unit_fidelity_threshold(double alpha, double p) {
  if (!(alpha > 0.0 && alpha <= std::numbers::pi / 4 + 1e-9)) {
    throw DomainError("werner_unit_fidelity_threshold: alpha must lie in (0, pi/4]");
  }
  require_unit_interval(p, "p");
  const double target = sin2(std::min(alpha, std::numbers::pi / 4)) / p;
  if (target > 0.5 + 1e-12) {
    throw DomainError("werner_unit_fidelity_threshold: G(psi)/p exceeds 1/2, no Werner state reaches it");
  }
  double lo = 1.0 / 3.0;
  double hi = 1.0;
  if (target >= 0.5) return hi;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (geometric_entanglement(werner(mid)) <= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

nlohmann::json to_json(const ConversionReport& r) {
  nlohmann::json j = {{"initial", r.initial},
                      {"target", r.target},
                      {"query", std::string(query_name(r.query))},
                      {"parameters", r.parameters},
                      {"exact_value", r.exact_value}};
  if (r.branch_discriminant) j["branch_discriminant"] = *r.branch_discriminant;
  if (r.thm1_bound) j["thm1_bound"] = *r.thm1_bound;
  if (r.gap) j["gap"] = *r.gap;
  return j;
}

}  // namespace qconv
