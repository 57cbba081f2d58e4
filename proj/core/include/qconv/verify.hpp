#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace qconv {

enum class Suite {
  Theorem1,
  Theorem2Min,
  Theorem2Max,
  Theorem3,
  Eq29,
  MeasuresOracle,
  RobustnessOracle,
  Figures,
};

std::string_view suite_name(Suite s);
/// nullopt for unknown names.
std::optional<Suite> parse_suite(std::string_view name);
const std::vector<Suite>& all_suites();

struct SuiteOptions {
  /// For theorem2-min/max: fidelity-ball draws per (state, f) case.
  /// For every other suite: number of random cases. Ignored by figures.
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  /// theorem2-min/max only: number of random states (0 = 200).
  std::size_t cases = 0;
  /// Worker threads; 0 = hardware concurrency.
  unsigned threads = 0;
};

struct SuiteFailure {
  std::uint64_t seed = 0;  // per-case generator seed, replays the case
  std::size_t case_index = 0;
  std::string check;
  nlohmann::json inputs;
  double expected = 0.0;
  double got = 0.0;
  double tolerance = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::size_t cases = 0;
  std::size_t checks = 0;
  std::vector<SuiteFailure> failures;
  double wall_time = 0.0;  // seconds
  bool passed() const { return failures.empty(); }
};

/// Deterministic per (suite, options.samples, options.seed, options.cases)
/// regardless of thread count: case i draws from derive_seed(seed, i).
SuiteReport run_suite(Suite suite, const SuiteOptions& options);

nlohmann::json to_json(const SuiteFailure& f);
nlohmann::json to_json(const SuiteReport& r);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace qconv
