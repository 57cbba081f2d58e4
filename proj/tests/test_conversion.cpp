#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qconv/conversion.hpp"
#include "qconv/decomp.hpp"
#include "qconv/errors.hpp"
#include "qconv/measures.hpp"
#include "qconv/robustness.hpp"
#include "qconv/states.hpp"
#include "support.hpp"

namespace qconv {
namespace {

using test::oracle_value;

const PureState kSmall = pure_from_angle(0.01);
const PureState kPsi02 = pure_from_angle(0.2);
const DensityMatrix kWerner09 = werner(0.9);
const DensityMatrix kPhi = DensityMatrix::from_pure(bell_phi_plus());

TEST(RobustnessBounds, Examples) {
  EXPECT_EQ(thm1_fidelity_bound({0.0, true}, 0.0, 1.0), 1.0);
  const Robustness r{oracle_value("r_psi001"), true};
  EXPECT_NEAR(thm1_fidelity_bound(r, oracle_value("werner09_g"), 1.0), oracle_value("thm1_psi001_werner09_p1"), 1e-12);
  EXPECT_NEAR(thm1_probability_bound(r, oracle_value("werner09_g"), 1.0), oracle_value("thm1_psi001_werner09_p1"),
              1e-12);
  EXPECT_EQ(thm1_fidelity_bound({0.5, true}, 0.1, 0.5), 1.0);
  EXPECT_NEAR(thm1_probability_bound(r, 0.3, 0.9), (1.0 + r.value) * 0.7 / 0.9, 1e-15);
}

TEST(RobustnessBounds, NonincreasingAndRefusals) {
  const Robustness r{0.2, true};
  double previous = 2.0;
  for (int j = 1; j <= 20; ++j) {
    const double v = thm1_fidelity_bound(r, 0.3, j / 20.0);
    EXPECT_LE(v, previous);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    previous = v;
  }
  EXPECT_THROW(thm1_fidelity_bound(r, 0.3, 0.0), DomainError);
  EXPECT_THROW(thm1_probability_bound(r, 0.3, -1.0), DomainError);
  EXPECT_THROW(thm1_fidelity_bound({0.2, false}, 0.3, 1.0), SolverError);
  EXPECT_THROW(thm1_fidelity_bound({-0.1, true}, 0.3, 1.0), DomainError);
}

TEST(ExactProbability, Examples) {
  EXPECT_EQ(exact_probability(bell_phi_plus(), kWerner09), 1.0);
  EXPECT_EQ(exact_probability(kPsi02, werner(0.2)), 1.0);
  EXPECT_NEAR(exact_probability(kPsi02, kPhi), oracle_value("exact_psi02_phi"), 1e-12);
  EXPECT_NEAR(exact_probability(kSmall, kWerner09), oracle_value("exact_psi001_werner09"), 1e-12);
}

TEST(ProbabilityAtFidelity, Examples) {
  const ConversionReport r = p_f(kPsi02, kPhi, 1.0);
  EXPECT_NEAR(r.exact_value, oracle_value("exact_psi02_phi"), 1e-12);
  EXPECT_NEAR(*r.branch_discriminant, 0.2 - std::numbers::pi / 4, 1e-12);
  EXPECT_EQ(p_f(bell_phi_plus(), kWerner09, 0.7).exact_value, 1.0);
  EXPECT_EQ(p_f(kSmall, kWerner09, 1.0).exact_value, exact_probability(kSmall, kWerner09));

  const double plateau = oracle_value("fp_psi001_werner09_p1");
  const ConversionReport edge = p_f(kSmall, kWerner09, plateau);
  EXPECT_NEAR(*edge.branch_discriminant, 0.0, 1e-9);
  EXPECT_NEAR(edge.exact_value, 1.0, 1e-6);
  EXPECT_THROW(p_f(kSmall, kWerner09, 0.0), DomainError);
}

TEST(FidelityAtProbability, Examples) {
  EXPECT_EQ(f_p(kSmall, kWerner09, 1e-4).exact_value, 1.0);
  EXPECT_NEAR(f_p(kSmall, kWerner09, 1.0).exact_value, oracle_value("fp_psi001_werner09_p1"), 1e-12);
  EXPECT_NEAR(f_p(kPsi02, kPhi, 1.0).exact_value, oracle_value("fig2_fp_p1"), 1e-12);
  EXPECT_THROW(f_p(kSmall, kWerner09, 1.5), DomainError);
}

TEST(FidelityPair, Examples) {
  EXPECT_EQ(p_f1_f2(kPsi02, kPhi, 1.0, 1.0).exact_value, exact_probability(kPsi02, kPhi));
  EXPECT_EQ(p_f1_f2(kSmall, kWerner09, 1.0, 1.0).exact_value, p_f(kSmall, kWerner09, 1.0).exact_value);
  EXPECT_NEAR(p_f1_f2(kPsi02, kPhi, 0.99, 0.99).exact_value, oracle_value("pf1f2_psi02_phi_099"), 1e-12);
  const ConversionReport unit = p_f1_f2(kPsi02, kPhi, 0.5, 0.5);
  EXPECT_GE(*unit.branch_discriminant, 0.0);
  EXPECT_EQ(unit.exact_value, 1.0);
}

TEST(WernerThreshold, Examples) {
  EXPECT_NEAR(werner_unit_fidelity_threshold(0.01, 0.75), oracle_value("threshold_001_075"), 1e-9);
  EXPECT_NEAR(werner_unit_fidelity_threshold(0.01, 0.75), oracle_value("threshold_001_075_scan"), 1e-5);
  EXPECT_NEAR(werner_unit_fidelity_threshold(0.01, 1.0), oracle_value("threshold_001_1"), 1e-9);
  EXPECT_NEAR(werner_unit_fidelity_threshold(std::numbers::pi / 4, 1.0), 1.0, 1e-12);
  EXPECT_THROW(werner_unit_fidelity_threshold(0.6, 0.5), DomainError);  // sin^2(0.6)/0.5 > 1/2
  EXPECT_THROW(werner_unit_fidelity_threshold(0.0, 0.5), DomainError);
  const double r = werner_unit_fidelity_threshold(0.01, 0.75);
  EXPECT_EQ(f_p(kSmall, werner(r - 1e-6), 0.75).exact_value, 1.0);
  EXPECT_LT(f_p(kSmall, werner(r + 1e-6), 0.75).exact_value, 1.0);
}

struct Pair {
  PureState psi;
  DensityMatrix rho;
  bool product;
};

Pair random_pair(std::uint64_t s) {
  const bool product = s % 8 == 7;
  return {product ? pure_from_angle(0.0) : sample_haar_pure(derive_seed(61, s)), sample_mixed(derive_seed(62, s), 1 + s % 4),
          product};
}

TEST(ConversionProperties, BoundDominance) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Pair c = random_pair(s);
    const Robustness r{generalized_robustness(DensityMatrix::from_pure(c.psi)).value, true};
    const double g = geometric_entanglement(c.rho);
    for (double p : {0.25, 0.5, 0.75, 1.0}) {
      ConversionReport report = f_p(c.psi, c.rho, p);
      attach_thm1_bound(report, r, g);
      ASSERT_LE(report.exact_value, *report.thm1_bound + 1e-6) << "seed " << s;
      ASSERT_GE(*report.gap, 0.0);
    }
  }
}

TEST(ConversionProperties, InverseAndContinuity) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const Pair c = random_pair(s);
    const double g_psi = geometric_entanglement(c.psi);
    const double g_rho = geometric_entanglement(c.rho);
    if (g_psi == 0.0 || g_rho <= g_psi) continue;
    const double p_star = g_psi / g_rho;
    for (int j = 1; j <= 10; ++j) {
      const double p = std::min(p_star + (1.0 - p_star) * j / 10.0, 1.0);
      const double f = f_p(c.psi, c.rho, p).exact_value;
      if (f >= 1.0) continue;
      ASSERT_NEAR(p_f(c.psi, c.rho, f).exact_value, p, 1e-9) << "seed " << s;
    }
    ASSERT_NEAR(f_p(c.psi, c.rho, std::min(p_star * (1 + 1e-10), 1.0)).exact_value, 1.0, 1e-9);
  }
}

TEST(ConversionProperties, MonotoneGrids) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Pair c = random_pair(s);
    double fp_prev = 2.0;
    double pf_prev = 2.0;
    double a_prev = 2.0;
    double b_prev = 2.0;
    for (int j = 0; j <= 10; ++j) {
      const double x = 0.5 + 0.05 * j;
      const double fp = f_p(c.psi, c.rho, x).exact_value;
      const double pf = p_f(c.psi, c.rho, x).exact_value;
      const double a = p_f1_f2(c.psi, c.rho, x, 0.9).exact_value;
      const double b = p_f1_f2(c.psi, c.rho, 0.9, x).exact_value;
      ASSERT_LE(fp, fp_prev + 1e-12);
      ASSERT_LE(pf, pf_prev + 1e-12);
      ASSERT_LE(a, a_prev + 1e-12);
      ASSERT_LE(b, b_prev + 1e-12);
      fp_prev = fp;
      pf_prev = pf;
      a_prev = a;
      b_prev = b;
    }
  }
}

TEST(ConversionProperties, BranchDiscriminantDecidesUnitValue) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const Pair c = random_pair(s);
    for (int j = 0; j <= 10; ++j) {
      const double f = 0.5 + 0.05 * j;
      const ConversionReport r = p_f(c.psi, c.rho, f);
      if (*r.branch_discriminant >= 0.0) ASSERT_EQ(r.exact_value, 1.0);
      if (*r.branch_discriminant < -1e-9) ASSERT_LT(r.exact_value, 1.0);
      const ConversionReport q = p_f1_f2(c.psi, c.rho, f, f);
      if (*q.branch_discriminant >= 0.0) ASSERT_EQ(q.exact_value, 1.0);
      if (*q.branch_discriminant < -1e-9) ASSERT_LT(q.exact_value, 1.0);
    }
  }
}

TEST(ConversionProperties, ProductInitialState) {
  const PureState product = pure_from_angle(0.0);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DensityMatrix rho = sample_mixed(derive_seed(63, s), 1 + s % 4);
    const double g = geometric_entanglement(rho);
    for (double p : {0.1, 0.5, 1.0}) ASSERT_NEAR(f_p(product, rho, p).exact_value, 1.0 - g, 1e-12);
    for (double f : {0.6, 0.9, 1.0}) {
      const ConversionReport r = p_f(product, rho, f);
      ASSERT_EQ(r.exact_value, *r.branch_discriminant >= -kBranchDeadBand ? 1.0 : 0.0);
    }
  }
}

TEST(ConversionProperties, PairMatchesExtremalComposition) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Pair c = random_pair(s);
    const double f1 = 0.6 + 0.4 * ((s * 37) % 100) / 100.0;
    const double f2 = 0.6 + 0.4 * ((s * 53) % 100) / 100.0;
    const double composed = exact_probability(psi_max(c.psi, f1), rho_min(c.rho, f2));
    ASSERT_NEAR(p_f1_f2(c.psi, c.rho, f1, f2).exact_value, composed, 1e-7) << "seed " << s;
    ASSERT_EQ(p_f1_f2(c.psi, c.rho, 1.0, 1.0).exact_value, exact_probability(c.psi, c.rho));
  }
}

TEST(ConversionReport, JsonOmitsAbsentFields) {
  ConversionReport r = f_p(kSmall, kWerner09, 1.0);
  nlohmann::json j = to_json(r);
  EXPECT_EQ(j.at("query"), "fidelity-at-p");
  EXPECT_FALSE(j.contains("thm1_bound"));
  EXPECT_FALSE(j.contains("branch_discriminant"));
  attach_thm1_bound(r, {oracle_value("r_psi001"), true}, geometric_entanglement(kWerner09));
  j = to_json(r);
  EXPECT_NEAR(j.at("gap").get<double>(), oracle_value("gap_psi001_werner09_p1"), 1e-12);

  ConversionReport pair = p_f1_f2(kSmall, kWerner09, 0.9, 0.9);
  attach_thm1_bound(pair, {0.1, true}, 0.2);
  EXPECT_FALSE(pair.thm1_bound.has_value());
  EXPECT_EQ(query_name(ConversionQuery::ProbabilityAtFidelityPair), "probability-at-f1-f2");
  EXPECT_EQ(to_json(exact_probability_report(kSmall, kWerner09)).at("query"), "exact-probability");
}

}  // namespace
}  // namespace qconv
