#include "qconv/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "qconv/conversion.hpp"
#include "qconv/decomp.hpp"
#include "qconv/errors.hpp"
#include "qconv/measures.hpp"
#include "qconv/robustness.hpp"
#include "qconv/state_io.hpp"
#include "qconv/states.hpp"

namespace qconv {

namespace {

constexpr double kSdpTolerance = 1e-6;
constexpr std::size_t kDefaultBallStates = 200;
constexpr std::array<double, 3> kBallFidelities{0.8, 0.9, 0.99};

struct CaseLog {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<SuiteFailure> failures;
  std::size_t checks = 0;

  void record(std::string_view check, double expected, double got, double tol) {
    failures.push_back({seed, index, std::string(check), inputs, expected, got, tol});
  }
  void near(std::string_view check, double got, double expected, double tol) {
    ++checks;
    if (!(std::abs(got - expected) <= tol)) record(check, expected, got, tol);
  }
  void at_least(std::string_view check, double got, double bound, double tol) {
    ++checks;
    if (!(got >= bound - tol)) record(check, bound, got, tol);
  }
  void at_most(std::string_view check, double got, double bound, double tol) {
    ++checks;
    if (!(got <= bound + tol)) record(check, bound, got, tol);
  }
  void exactly(std::string_view check, double got, double expected) {
    ++checks;
    if (!(got == expected)) record(check, expected, got, 0.0);
  }
  void holds(std::string_view check, bool ok) {
    ++checks;
    if (!ok) record(check, 1.0, 0.0, 0.0);
  }
  std::uint64_t draw(std::uint64_t k) const { return derive_seed(seed, k); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Body>
SuiteReport run_cases(Suite suite, std::size_t count, const SuiteOptions& options, Body&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CaseLog> logs(count);
  parallel_for(count, options.threads, [&](std::size_t i) {
    CaseLog& log = logs[i];
    log.index = i;
    log.seed = derive_seed(options.seed, i);
    try {
      body(log);
    } catch (const std::exception& e) {
      log.record(std::string("exception: ") + e.what(), 0.0, 0.0, 0.0);
    }
  });
  SuiteReport report;
  report.suite = std::string(suite_name(suite));
  report.cases = count;
  for (auto& log : logs) {
    report.checks += log.checks;
    for (auto& f : log.failures) report.failures.push_back(std::move(f));
  }
  report.wall_time = seconds_since(t0);
  return report;
}

DensityMatrix random_state(const CaseLog& log, std::uint64_t k, int rank) {
  return sample_mixed(log.draw(k), rank);
}

nlohmann::json state_json(const DensityMatrix& rho) { return to_json(rho); }
nlohmann::json state_json(const PureState& psi) { return to_json(psi); }

void theorem1_case(CaseLog& log) {
  const PureState psi = sample_haar_pure(log.draw(0));
  const DensityMatrix rho = random_state(log, 1, 1 + static_cast<int>(log.index % 4));
  log.inputs = {{"initial", state_json(psi)}, {"target", state_json(rho)}};

  const RobustnessResult r_psi = generalized_robustness(DensityMatrix::from_pure(psi), {kSdpTolerance});
  const Robustness r{r_psi.value, r_psi.gap <= 10 * kSdpTolerance};
  const double g_rho = geometric_entanglement(rho);
  for (double p : {0.25, 0.5, 0.75, 1.0}) {
    log.at_most("f_p <= fidelity bound", f_p(psi, rho, p).exact_value, thm1_fidelity_bound(r, g_rho, p), 1e-6);
  }
  for (double f : {0.5, 0.75, 0.9, 1.0}) {
    log.at_most("p_f <= probability bound", p_f(psi, rho, f).exact_value, thm1_probability_bound(r, g_rho, f), 1e-6);
  }
  const RobustnessResult r_rho = generalized_robustness(rho, {kSdpTolerance});
  log.at_least("R(rho) >= G/(1-G)", r_rho.value, robustness_lower_bound(rho), 10 * kSdpTolerance);
}

void theorem2_min_case(CaseLog& log, std::size_t samples) {
  const DensityMatrix rho = random_state(log, 0, 2 + static_cast<int>(log.index % 3));
  log.inputs = {{"rho", state_json(rho)}, {"samples", samples}};
  const double g = geometric_entanglement(rho);
  for (std::size_t j = 0; j < kBallFidelities.size(); ++j) {
    const double f = kBallFidelities[j];
    const double minimum = min_geometric_in_ball(g, f);
    const DensityMatrix extremal = rho_min(rho, f);
    log.inputs["f"] = f;
    log.near("G(rho_min) = minimum", geometric_entanglement(extremal), minimum, 1e-7);
    log.at_least("fidelity(rho, rho_min) >= f", fidelity(rho, extremal), f, 1e-9);
    double lowest = 1.0;
    for (const auto& s : sample_fidelity_ball(rho, f, samples, log.draw(1 + j))) {
      lowest = std::min(lowest, geometric_entanglement(s));
    }
    log.at_least("sampled G >= minimum", lowest, minimum, 1e-9);
  }
  log.inputs.erase("f");
}

void theorem2_max_case(CaseLog& log, std::size_t samples) {
  const PureState psi = sample_haar_pure(log.draw(0));
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  log.inputs = {{"psi", state_json(psi)}, {"samples", samples}};
  const double g = geometric_entanglement(psi);
  for (std::size_t j = 0; j < kBallFidelities.size(); ++j) {
    const double f = kBallFidelities[j];
    const double maximum = max_geometric_in_ball(g, f);
    const PureState extremal = psi_max(psi, f);
    log.inputs["f"] = f;
    log.near("G(psi_max) = maximum", geometric_entanglement(extremal), maximum, 1e-12);
    log.at_least("fidelity(psi, psi_max) >= f", fidelity(rho, DensityMatrix::from_pure(extremal)), f, 1e-12);
    double highest = 0.0;
    for (const auto& s : sample_fidelity_ball(rho, f, samples, log.draw(1 + j))) {
      highest = std::max(highest, geometric_entanglement(s));
    }
    log.at_most("sampled G <= maximum", highest, maximum, 1e-9);
  }
  log.inputs.erase("f");
}

void theorem3_case(CaseLog& log) {
  const bool product = log.index % 8 == 7;
  const PureState psi = product ? pure_from_angle(0.0) : sample_haar_pure(log.draw(0));
  const DensityMatrix rho = random_state(log, 1, 1 + static_cast<int>(log.index % 4));
  log.inputs = {{"initial", state_json(psi)}, {"target", state_json(rho)}};
  const double g_psi = geometric_entanglement(psi);
  const double g_rho = geometric_entanglement(rho);
  const double a = asin_sqrt(g_rho);
  const double b = asin_sqrt(g_psi);

  log.exactly("p_f(f=1) = exact_probability", p_f(psi, rho, 1.0).exact_value, exact_probability(psi, rho));

  // Inverse relation on the second branch of f_p.
  // With G(psi) = 0, F_p is flat in p and has no inverse.
  const double p_star = g_rho > 0.0 ? g_psi / g_rho : 1.0;
  if (g_psi > 0.0 && p_star < 1.0 - 1e-6) {
    for (int j = 1; j <= 10; ++j) {
      const double p = std::min(p_star + (1.0 - p_star) * j / 10.0, 1.0);
      const double f = f_p(psi, rho, p).exact_value;
      if (f >= 1.0) continue;
      log.near("p_f(f_p(p)) = p", p_f(psi, rho, f).exact_value, p, 1e-9);
    }
    log.near("f_p continuous at p = G(psi)/G(rho)", f_p(psi, rho, std::min(p_star * (1.0 + 1e-10), 1.0)).exact_value,
             1.0, 1e-9);
  }
  // p_f just past m1 = 0; the excursion from 1 scales like 1/tan(b).
  if (b >= 0.05 && a > b) {
    const double k = a - b + 1e-11;
    const double c = std::cos(k);
    log.near("p_f continuous at m1 = 0", p_f(psi, rho, c * c).exact_value, 1.0, 1e-9);
  }

  double previous = 2.0;
  for (int j = 0; j <= 10; ++j) {
    const double p = (j + 1) / 11.0;
    const double f = f_p(psi, rho, p).exact_value;
    log.at_most("f_p nonincreasing in p", f, previous, 1e-12);
    previous = f;
    if (product) log.near("f_p of a product initial = 1 - G(rho)", f, 1.0 - g_rho, 1e-12);
  }
  previous = 2.0;
  for (int j = 0; j <= 10; ++j) {
    const double f = 0.5 + 0.05 * j;
    const ConversionReport r = p_f(psi, rho, f);
    log.at_most("p_f nonincreasing in f", r.exact_value, previous, 1e-12);
    previous = r.exact_value;
    const double m1 = *r.branch_discriminant;
    if (m1 >= -kBranchDeadBand) log.exactly("m1 >= 0 gives P_f = 1", r.exact_value, 1.0);
    if (m1 < -1e-9) log.holds("m1 < 0 gives P_f < 1", r.exact_value < 1.0);
    if (product && m1 < -kBranchDeadBand) log.exactly("product initial gives P_f = 0", r.exact_value, 0.0);
  }
}

void eq29_case(CaseLog& log) {
  const PureState psi = sample_haar_pure(log.draw(0));
  const DensityMatrix rho = random_state(log, 1, 1 + static_cast<int>(log.index % 4));
  std::mt19937_64 gen(log.draw(2));
  std::uniform_real_distribution<double> unit(0.6, 1.0);
  const double f1 = unit(gen);
  const double f2 = unit(gen);
  log.inputs = {{"initial", state_json(psi)}, {"target", state_json(rho)}, {"f1", f1}, {"f2", f2}};

  log.exactly("p_f1_f2(1, 1) = exact_probability", p_f1_f2(psi, rho, 1.0, 1.0).exact_value, exact_probability(psi, rho));

  const ConversionReport r = p_f1_f2(psi, rho, f1, f2);
  const double composed = exact_probability(psi_max(psi, f1), rho_min(rho, f2));
  log.near("p_f1_f2 = exact_probability(psi_max, rho_min)", r.exact_value, composed, 1e-7);
  if (*r.branch_discriminant >= -kBranchDeadBand) log.exactly("m2 >= 0 gives 1", r.exact_value, 1.0);

  double prev1 = 2.0;
  double prev2 = 2.0;
  for (int j = 0; j <= 10; ++j) {
    const double f = 0.5 + 0.05 * j;
    const double v1 = p_f1_f2(psi, rho, f, f2).exact_value;
    const double v2 = p_f1_f2(psi, rho, f1, f).exact_value;
    log.at_most("p_f1_f2 nonincreasing in f1", v1, prev1, 1e-12);
    log.at_most("p_f1_f2 nonincreasing in f2", v2, prev2, 1e-12);
    prev1 = v1;
    prev2 = v2;
  }
}

void measures_oracle_case(CaseLog& log) {
  const DensityMatrix rho = random_state(log, 0, 1 + static_cast<int>(log.index % 4));
  log.inputs = {{"rho", state_json(rho)}};
  log.near("closed-form G = brute-force G", geometric_entanglement(rho),
           geometric_entanglement_brute(rho, {16, log.draw(1)}), 1e-6);
  const PureState psi = sample_haar_pure(log.draw(2));
  log.near("G(psi) from Schmidt = G from density matrix", geometric_entanglement(psi),
           geometric_entanglement(DensityMatrix::from_pure(psi)), 1e-10);
}

void robustness_oracle_case(CaseLog& log) {
  const PureState psi = sample_haar_pure(log.draw(0));
  const DensityMatrix rho = random_state(log, 1, 1 + static_cast<int>(log.index % 4));
  log.inputs = {{"psi", state_json(psi)}, {"rho", state_json(rho)}};
  log.near("SDP R(psi) = 2 sqrt(lambda1 lambda2)",
           generalized_robustness(DensityMatrix::from_pure(psi), {kSdpTolerance}).value, robustness_pure_oracle(psi),
           1e-4);

  const RobustnessResult r = generalized_robustness(rho, {kSdpTolerance});
  log.at_least("R(rho) >= G/(1-G)", r.value, robustness_lower_bound(rho), 10 * kSdpTolerance);
  log.at_most("duality gap", r.gap, 0.0, 10 * kSdpTolerance);
  const ComplexMatrix mixed = (rho.matrix() + r.witness.matrix() * r.value) * (1.0 / (1.0 + r.value));
  log.at_most("(rho + R tau)/(1 + R) = free state", distance(mixed, r.free_state.matrix()), 0.0, kSdpTolerance);
  log.at_least("free state is PPT", hermitian_eigvals(partial_transpose(r.free_state.matrix())).front(), 0.0,
               kSdpTolerance);

  double previous = r.value;
  for (int j = 1; j <= 9; ++j) {
    const double t = j / 9.0;
    const double rt = generalized_robustness(mix(rho, DensityMatrix::maximally_mixed(), t), {kSdpTolerance}).value;
    log.at_most("R nonincreasing under mixing with identity", rt, previous, 2 * kSdpTolerance);
    previous = rt;
  }
}

void figures_case(CaseLog& log) {
  const PureState psi_small = pure_from_angle(0.01);
  const DensityMatrix w = werner(0.9);
  switch (log.index) {
    case 0: {
      log.inputs = {{"check", "exact probability psi(0.01) -> werner(0.9)"}};
      const auto t0 = std::chrono::steady_clock::now();
      const double p = exact_probability(psi_small, w);
      log.at_most("runtime (s)", seconds_since(t0), 1e-3, 0.0);
      log.near("exact_probability", p, 0.000423, 5e-6);
      break;
    }
    case 1: {
      log.inputs = {{"check", "robustness-bound gap at p = 1, psi(0.01) -> werner(0.9)"}};
      const auto t0 = std::chrono::steady_clock::now();
      const RobustnessResult r = generalized_robustness(DensityMatrix::from_pure(psi_small), {kSdpTolerance});
      const double bound = thm1_fidelity_bound({r.value, r.gap <= 10 * kSdpTolerance}, geometric_entanglement(w), 1.0);
      const double exact = f_p(psi_small, w, 1.0).exact_value;
      log.at_most("runtime (s)", seconds_since(t0), 10.0, 0.0);
      log.near("SDP R(psi(0.01)) = sin 0.02", r.value, std::sin(0.02), 1e-4);
      log.near("bound - F_p", bound - exact, 0.0068, 5e-4);
      break;
    }
    case 2:
      log.inputs = {{"check", "F_p(p = 1), psi(0.01) -> werner(0.9)"}};
      log.near("F_p", f_p(psi_small, w, 1.0).exact_value, 0.7718, 5e-4);
      break;
    case 3:
      log.inputs = {{"check", "Werner unit-fidelity threshold, alpha = 0.01, p = 0.75"}};
      log.near("r*", werner_unit_fidelity_threshold(0.01, 0.75), 0.3487, 1e-3);
      break;
    case 4: {
      log.inputs = {{"check", "psi(0.2) -> phi+"}};
      const PureState psi = pure_from_angle(0.2);
      const DensityMatrix phi = DensityMatrix::from_pure(bell_phi_plus());
      log.near("exact_probability", exact_probability(psi, phi), 0.0789, 5e-4);
      const RobustnessResult r = generalized_robustness(DensityMatrix::from_pure(psi), {kSdpTolerance});
      const double bound = thm1_fidelity_bound({r.value, r.gap <= 10 * kSdpTolerance}, geometric_entanglement(phi), 1.0);
      log.near("F_p(p = 1) = bound", f_p(psi, phi, 1.0).exact_value, bound, 1e-6);
      break;
    }
    default:
      break;
  }
}

}  // namespace

std::string_view suite_name(Suite s) {
  switch (s) {
    case Suite::Theorem1:
      return "theorem1";
    case Suite::Theorem2Min:
      return "theorem2-min";
    case Suite::Theorem2Max:
      return "theorem2-max";
    case Suite::Theorem3:
      return "theorem3";
    case Suite::Eq29:
      return "eq29";
    case Suite::MeasuresOracle:
      return "measures-oracle";
    case Suite::RobustnessOracle:
      return "robustness-oracle";
    case Suite::Figures:
      return "figures";
  }
  return "unknown";
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites{Suite::Theorem1, Suite::Theorem2Min, Suite::Theorem2Max,
                                         Suite::Theorem3, Suite::Eq29,        Suite::MeasuresOracle,
                                         Suite::RobustnessOracle, Suite::Figures};
  return suites;
}

std::optional<Suite> parse_suite(std::string_view name) {
  for (Suite s : all_suites())
    if (suite_name(s) == name) return s;
  return std::nullopt;
}

SuiteReport run_suite(Suite suite, const SuiteOptions& options) {
  if (options.samples == 0) throw DomainError("run_suite: samples must be >= 1");
  const std::size_t n = options.samples;
  const std::size_t states = options.cases == 0 ? kDefaultBallStates : options.cases;
  switch (suite) {
    case Suite::Theorem1:
      return run_cases(suite, n, options, theorem1_case);
    case Suite::Theorem2Min:
      return run_cases(suite, states, options, [n](CaseLog& log) { theorem2_min_case(log, n); });
    case Suite::Theorem2Max:
      return run_cases(suite, states, options, [n](CaseLog& log) { theorem2_max_case(log, n); });
    case Suite::Theorem3:
      return run_cases(suite, n, options, theorem3_case);
    case Suite::Eq29:
      return run_cases(suite, n, options, eq29_case);
    case Suite::MeasuresOracle:
      return run_cases(suite, n, options, measures_oracle_case);
    case Suite::RobustnessOracle:
      return run_cases(suite, n, options, robustness_oracle_case);
    case Suite::Figures:
      return run_cases(suite, 5, options, figures_case);
  }
  throw DomainError("run_suite: unknown suite");
}

nlohmann::json to_json(const SuiteFailure& f) {
  return {{"seed", f.seed},         {"case_index", f.case_index}, {"check", f.check},
          {"inputs", f.inputs},     {"expected", f.expected},     {"got", f.got},
          {"tolerance", f.tolerance}};
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(f));
  return {{"suite", r.suite},         {"cases", r.cases},         {"checks", r.checks},
          {"passed", r.passed()},     {"wall_time", r.wall_time}, {"failures", failures}};
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qconv
