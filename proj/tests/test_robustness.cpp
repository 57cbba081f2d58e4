#include <gtest/gtest.h>

#include <cmath>

#include "qconv/errors.hpp"
#include "qconv/measures.hpp"
#include "qconv/robustness.hpp"
#include "qconv/states.hpp"
#include "support.hpp"

namespace qconv {
namespace {

using test::oracle_value;

void expect_result_invariants(const DensityMatrix& rho, const RobustnessResult& r) {
  const double tol = r.tolerance;
  EXPECT_GE(r.value, 0.0);
  EXPECT_LE(r.gap, 10 * tol);
  EXPECT_LE(r.lower_bound, r.value);
  const ComplexMatrix mixed = (rho.matrix() + r.witness.matrix() * r.value) * (1.0 / (1.0 + r.value));
  EXPECT_LE(distance(mixed, r.free_state.matrix()), tol);
  EXPECT_GE(hermitian_eigvals(partial_transpose(r.free_state.matrix())).front(), -tol);
  EXPECT_NO_THROW(DensityMatrix::from_matrix(r.witness.matrix()));
  EXPECT_LE(r.primal_residual, tol);
}

TEST(Robustness, PptStatesAreFree) {
  for (double r : {0.0, 0.2, 1.0 / 3.0}) {
    const RobustnessResult res = generalized_robustness(werner(r));
    EXPECT_EQ(res.value, 0.0) << r;
    EXPECT_LE(distance(res.free_state.matrix(), werner(r).matrix()), 0.0);
    EXPECT_LE(distance(res.witness.matrix(), DensityMatrix::maximally_mixed().matrix()), 0.0);
  }
}

TEST(Robustness, Examples) {
  const DensityMatrix phi = DensityMatrix::from_pure(bell_phi_plus());
  const RobustnessResult r_phi = generalized_robustness(phi);
  EXPECT_NEAR(r_phi.value, 1.0, 1e-4);
  expect_result_invariants(phi, r_phi);

  const DensityMatrix small = DensityMatrix::from_pure(pure_from_angle(0.01));
  EXPECT_NEAR(generalized_robustness(small).value, oracle_value("r_psi001"), 1e-4);

  const DensityMatrix w = werner(0.9);
  const RobustnessResult r_w = generalized_robustness(w);
  EXPECT_NEAR(r_w.value, oracle_value("r_werner09_sdp"), 1e-5);
  expect_result_invariants(w, r_w);
}

TEST(Robustness, MatchesIndependentSdpValues) {
  for (const auto& entry : test::oracle().at("random_states")) {
    const DensityMatrix rho = DensityMatrix::from_matrix(test::matrix_from_json(entry.at("rho")));
    const RobustnessResult r = generalized_robustness(rho);
    EXPECT_NEAR(r.value, entry.at("robustness").get<double>(), 1e-5);
    expect_result_invariants(rho, r);
  }
}

TEST(Robustness, PureOracle) {
  EXPECT_EQ(robustness_pure_oracle(pure_from_angle(0.0)), 0.0);
  EXPECT_NEAR(robustness_pure_oracle(bell_phi_plus()), 1.0, 1e-15);
  EXPECT_NEAR(robustness_pure_oracle(pure_from_angle(0.2)), oracle_value("r_psi02"), 1e-15);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const PureState psi = sample_haar_pure(derive_seed(5, s));
    const double solved = generalized_robustness(DensityMatrix::from_pure(psi)).value;
    ASSERT_NEAR(solved, robustness_pure_oracle(psi), 1e-4) << "seed " << s;
  }
}

TEST(Robustness, LowerBound) {
  EXPECT_EQ(robustness_lower_bound(werner(0.2)), 0.0);
  EXPECT_NEAR(robustness_lower_bound(DensityMatrix::from_pure(bell_phi_plus())), 1.0, 1e-13);
  EXPECT_NEAR(robustness_lower_bound(werner(0.9)), oracle_value("lower_bound_werner09"), 1e-12);
  constexpr double kTol = 1e-6;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const DensityMatrix rho = sample_mixed(derive_seed(6, s), 1 + s % 4);
    const RobustnessResult r = generalized_robustness(rho, {kTol});
    ASSERT_GE(r.value, robustness_lower_bound(rho) - 10 * kTol) << "seed " << s;
  }
}

TEST(Robustness, NonincreasingUnderMixingWithIdentity) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = sample_mixed(derive_seed(8, s), 1 + s % 4);
    double previous = generalized_robustness(rho).value;
    for (int j = 1; j <= 9; ++j) {
      const double v = generalized_robustness(mix(rho, DensityMatrix::maximally_mixed(), j / 9.0)).value;
      ASSERT_LE(v, previous + 2e-6);
      previous = v;
    }
    EXPECT_EQ(previous, 0.0);  // t = 1 is the maximally mixed state
  }
}

TEST(Robustness, ZeroExactlyWhenPpt) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const DensityMatrix rho = mix(sample_mixed(s, 1 + s % 4), DensityMatrix::maximally_mixed(), (s % 7) / 7.0);
    const RobustnessResult r = generalized_robustness(rho);
    const bool ppt = hermitian_eigvals(partial_transpose(rho.matrix())).front() >= -r.tolerance;
    ASSERT_EQ(r.value == 0.0, ppt) << "seed " << s;
  }
}

TEST(Robustness, RejectsTinyTolerance) {
  EXPECT_THROW(generalized_robustness(werner(0.9), {1e-10}), DomainError);
  EXPECT_NO_THROW(generalized_robustness(werner(0.9), {1e-9}));
}

TEST(Robustness, BudgetExhaustionCarriesUpperBound) {
  try {
    generalized_robustness(werner(0.9), {1e-9, 3});
    FAIL() << "three Newton steps should not certify";
  } catch (const SolverError& e) {
    EXPECT_GE(e.best_value(), 0.85 - 1e-9);
  }
}

TEST(Robustness, JsonCarriesDiagnostics) {
  const nlohmann::json j = to_json(generalized_robustness(werner(0.9)));
  for (const char* key : {"value", "lower_bound", "gap", "witness_state", "free_state", "tolerance", "iterations",
                          "primal_residual"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

}  // namespace
}  // namespace qconv
