// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "qconv/conversion.hpp"
#include "qconv/decomp.hpp"
#include "qconv/measures.hpp"
#include "qconv/robustness.hpp"
#include "qconv/states.hpp"
#include "qconv/verify.hpp"

namespace {

using namespace qconv;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string suite_detail(const SuiteReport& r) {
  std::string s = fmt("%s: %zu cases, %zu checks, %zu failures, %.2fs", r.suite.c_str(), r.cases, r.checks,
                      r.failures.size(), r.wall_time);
  if (!r.failures.empty()) {
    const auto& f = r.failures.front();
    s += fmt(" [first: case %zu '%s' expected %.12g got %.12g]", f.case_index, f.check.c_str(), f.expected, f.got);
  }
  return s;
}

Outcome exact_ratio() {
  const PureState psi = pure_from_angle(0.01);
  const DensityMatrix rho = werner(0.9);
  const auto start = Clock::now();
  const double p = exact_probability(psi, rho);
  const double elapsed = seconds_since(start);
  return {std::abs(p - 0.000423) <= 5e-6 && elapsed < 1e-3, fmt("P = %.9f (target 0.000423 +- 5e-6), %.1f us", p, elapsed * 1e6)};
}

Outcome bound_gap() {
  const auto start = Clock::now();
  const PureState psi = pure_from_angle(0.01);
  const DensityMatrix rho = werner(0.9);
  const RobustnessResult r = generalized_robustness(DensityMatrix::from_pure(psi), {1e-6});
  const double oracle = std::sin(0.02);
  ConversionReport report = f_p(psi, rho, 1.0);
  attach_thm1_bound(report, {r.value, r.gap <= 1e-5}, geometric_entanglement(rho));
  const double elapsed = seconds_since(start);
  if (!report.gap) return {false, "bound refused: robustness not certified"};
  const bool ok = std::abs(*report.gap - 0.0068) <= 5e-4 && std::abs(r.value - oracle) <= 1e-4 && elapsed < 10.0;
  return {ok, fmt("gap = %.7f (target 0.0068 +- 5e-4), R = %.9f vs sin 0.02 = %.9f, %.3fs", *report.gap, r.value,
                  oracle, elapsed)};
}

Outcome fidelity_plateau() {
  const double f = f_p(pure_from_angle(0.01), werner(0.9), 1.0).exact_value;
  return {std::abs(f - 0.7718) <= 5e-4, fmt("F_p(1) = %.10f (target 0.7718 +- 5e-4)", f)};
}

Outcome werner_threshold() {
  const double r = werner_unit_fidelity_threshold(0.01, 0.75);
  return {std::abs(r - 0.3487) <= 1e-3, fmt("r* = %.10f (target 0.3487 +- 1e-3)", r)};
}

Outcome pure_target() {
  const PureState psi = pure_from_angle(0.2);
  const DensityMatrix phi = DensityMatrix::from_pure(bell_phi_plus());
  const double p = exact_probability(psi, phi);
  const RobustnessResult r = generalized_robustness(DensityMatrix::from_pure(psi), {1e-6});
  ConversionReport report = f_p(psi, phi, 1.0);
  attach_thm1_bound(report, {r.value, r.gap <= 1e-5}, geometric_entanglement(phi));
  if (!report.thm1_bound) return {false, "bound refused: robustness not certified"};
  const double diff = std::abs(report.exact_value - *report.thm1_bound);
  return {std::abs(p - 0.0789) <= 5e-4 && diff <= 1e-6,
          fmt("P = %.9f (target 0.0789 +- 5e-4), |F_p(1) - bound| = %.2e (<= 1e-6)", p, diff)};
}

Outcome envelope() {
  SuiteOptions o;
  o.samples = 10000;
  o.cases = 200;
  o.seed = 2024;
  const auto start = Clock::now();
  const SuiteReport lo = run_suite(Suite::Theorem2Min, o);
  const SuiteReport hi = run_suite(Suite::Theorem2Max, o);
  const double elapsed = seconds_since(start);
  return {lo.passed() && hi.passed() && elapsed < 300.0,
          suite_detail(lo) + "; " + suite_detail(hi) + fmt("; total %.1fs (< 300s)", elapsed)};
}

Outcome robustness_inequality() {
  constexpr double kTol = 1e-6;
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const DensityMatrix rho = sample_mixed(derive_seed(7007, s), 1 + static_cast<int>(s % 4));
    const double slack = generalized_robustness(rho, {kTol}).value - robustness_lower_bound(rho);
    worst = std::min(worst, slack);
    if (slack < -1e-5) ++violations;
  }
  return {violations == 0, fmt("500 states, %zu violations, min R - G/(1-G) = %.3e", violations, worst)};
}

Outcome oracle_agreement() {
  SuiteOptions o;
  o.samples = 200;
  o.seed = 8008;
  const SuiteReport measures = run_suite(Suite::MeasuresOracle, o);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const PureState psi = sample_haar_pure(derive_seed(8009, s));
    const double solved = generalized_robustness(DensityMatrix::from_pure(psi), {1e-6}).value;
    worst = std::max(worst, std::abs(solved - robustness_pure_oracle(psi)));
  }
  return {measures.passed() && worst <= 1e-4,
          suite_detail(measures) + fmt("; 200 Haar pure states, max |R_sdp - R_closed| = %.3e (<= 1e-4)", worst)};
}

Outcome structural_identities() {
  SuiteOptions o;
  o.samples = 100;
  o.seed = 9009;
  const SuiteReport inverse = run_suite(Suite::Theorem3, o);
  const SuiteReport composed = run_suite(Suite::Eq29, o);
  double worst_rebuild = 0.0;
  double worst_spread = 0.0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const DensityMatrix rho = sample_mixed(derive_seed(9010, s), 1 + static_cast<int>(s % 4));
    const EqualGDecomposition d = equal_g_decomposition(rho);
    ComplexMatrix rebuilt(4);
    double lo = 1.0;
    double hi = 0.0;
    for (const auto& t : d.terms) {
      rebuilt += t.state.projector() * t.probability;
      const double g = geometric_entanglement(t.state);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    worst_rebuild = std::max(worst_rebuild, distance(rebuilt, rho.matrix()));
    worst_spread = std::max(worst_spread, hi - lo);
  }
  return {inverse.passed() && composed.passed() && worst_rebuild <= 1e-9 && worst_spread <= 1e-8,
          suite_detail(inverse) + "; " + suite_detail(composed) +
              fmt("; decomposition on 500 states: max reconstruction %.2e (<= 1e-9), max G spread %.2e (<= 1e-8)",
                  worst_rebuild, worst_spread)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"exact conversion ratio", exact_ratio},
      {"robustness bound gap", bound_gap},
      {"fidelity plateau", fidelity_plateau},
      {"Werner unit-fidelity threshold", werner_threshold},
      {"pure-target threshold and tight bound", pure_target},
      {"fidelity-ball envelope", envelope},
      {"robustness lower-bound inequality", robustness_inequality},
      {"oracle agreement", oracle_agreement},
      {"structural identities", structural_identities},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
