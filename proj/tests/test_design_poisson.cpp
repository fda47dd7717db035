#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lrseq/design_poisson.hpp"

using lrseq::EventSplit;
using lrseq::Hypothesis;
using lrseq::PoissonDesign;

namespace {

PoissonDesign design(double psi1, double k0, double k1, double g = 1.0) {
  PoissonDesign d;
  d.psi1 = psi1;
  d.g = g;
  d.thresholds = {k0, k1};
  return d;
}

// P(D >= d) by summing the pmf in long double from the mode outwards.
long double tail_oracle(int d, long double lambda) {
  long double lower = 0.0L;
  long double term = std::exp(-lambda);
  for (int j = 0; j < d; ++j) {
    lower += term;
    term *= lambda / (j + 1);
  }
  return 1.0L - lower;
}

}  // namespace

TEST(Mapping, PsiToP) {
  EXPECT_DOUBLE_EQ(lrseq::p_from_psi(1, 1), 0.5);
  EXPECT_NEAR(lrseq::p_from_psi(2.41, 1), 0.7067, 5e-5);
  EXPECT_NEAR(lrseq::p_from_psi(0.415, 2), 0.1718, 5e-5);
  EXPECT_THROW(lrseq::p_from_psi(0, 1), lrseq::DomainError);
  EXPECT_THROW(lrseq::p_from_psi(1, -1), lrseq::DomainError);
}

TEST(Mapping, RoundTrips) {
  for (double psi : {0.1, 0.415, 1.0, 2.41, 9.0})
    for (double g : {0.5, 1.0, 3.0}) EXPECT_NEAR(lrseq::psi_from_p(lrseq::p_from_psi(psi, g), g), psi, 1e-12 * psi);
}

TEST(BinomialLoglr, MatchesLikelihoodKernel) {
  const auto d = design(2.41, 1.0 / 8, 8);
  EXPECT_EQ(lrseq::binomial_loglr({0, 0}, d), 0.0);
  // Kernel (psi/(psi+g))^dt (g/(g+psi))^dc evaluated directly.
  auto kernel = [](double psi, double g, int dt, int dc) {
    return dt * std::log(psi / (psi + g)) + dc * std::log(g / (g + psi));
  };
  const double want = kernel(2.41, 1, 7, 3) - kernel(1, 1, 7, 3);
  EXPECT_NEAR(lrseq::binomial_loglr({7, 3}, d), want, 1e-13);
  EXPECT_NEAR(lrseq::binomial_loglr({7, 3}, d), 0.8216, 5e-4);
  const auto g2 = design(0.415, 1.0 / 8, 8, 2.0);
  EXPECT_NEAR(lrseq::binomial_loglr({4, 9}, g2), kernel(0.415, 2, 4, 9) - kernel(1, 2, 4, 9), 1e-13);
}

TEST(BinomialLoglr, AdditiveInCounts) {
  const auto d = design(2.41, 1.0 / 8, 8, 1.5);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) {
      const double whole = lrseq::binomial_loglr({a + 2, b + 3}, d);
      EXPECT_NEAR(whole, lrseq::binomial_loglr({a, b}, d) + lrseq::binomial_loglr({2, 3}, d), 1e-12);
    }
}

TEST(Orientation, FlipsTowardsTreatmentExcess) {
  const auto o = lrseq::orient_hypotheses(design(0.415, 1.0 / 20, 20));
  EXPECT_TRUE(o.flipped);
  EXPECT_NEAR(o.design.psi1, 2.4096, 5e-5);
  EXPECT_DOUBLE_EQ(o.design.psi0, 1.0);
  EXPECT_GT(o.design.p1(), o.design.p0());
  EXPECT_EQ(o.original, design(0.415, 1.0 / 20, 20));

  const auto same = lrseq::orient_hypotheses(design(2.41, 1.0 / 20, 20));
  EXPECT_FALSE(same.flipped);
  EXPECT_EQ(same.design, same.original);

  const auto twice = lrseq::orient_hypotheses(o.design);
  EXPECT_FALSE(twice.flipped);
  EXPECT_EQ(twice.design, o.design);
}

TEST(Orientation, UnorientedDesignIsRejected) {
  EXPECT_THROW(lrseq::poisson_operating_characteristics(design(0.415, 1.0 / 20, 20)), lrseq::DomainError);
}

TEST(PoissonCharacteristics, PublishedTable) {
  struct Row {
    double k0_inv, k1, alpha, power, e_null, e_alt;
  };
  const std::vector<Row> rows = {
      {8, 8, 0.086, 0.914, 21, 23},    {10, 20, 0.035, 0.927, 26, 33}, {20, 20, 0.036, 0.964, 33, 35},
      {20, 32, 0.023, 0.963, 34, 40},  {32, 32, 0.023, 0.977, 39, 41}, {32, 64, 0.012, 0.977, 39, 49},
      {64, 64, 0.012, 0.988, 47, 50},
  };
  for (const auto& r : rows) {
    SCOPED_TRACE(testing::Message() << "k0=1/" << r.k0_inv << " k1=" << r.k1);
    const auto oc = lrseq::poisson_operating_characteristics(design(2.41, 1.0 / r.k0_inv, r.k1));
    EXPECT_NEAR(oc.alpha_l, r.alpha, 1e-3);
    EXPECT_NEAR(oc.power_l, r.power, 1e-3);
    EXPECT_NEAR(oc.e_events_null, r.e_null, 1.0);
    EXPECT_NEAR(oc.e_events_alt, r.e_alt, 1.0);
  }
}

TEST(PoissonCharacteristics, FlippedDesignMatchesMirror) {
  const auto flipped = lrseq::poisson_operating_characteristics(lrseq::orient_hypotheses(design(0.415, 1.0 / 20, 20)));
  const auto direct = lrseq::poisson_operating_characteristics(design(1.0 / 0.415, 1.0 / 20, 20));
  EXPECT_NEAR(flipped.alpha_l, direct.alpha_l, 1e-14);
  EXPECT_NEAR(flipped.power_l, direct.power_l, 1e-14);
}

TEST(PoissonCharacteristics, AgreesWithNormalApproximation) {
  const double pairs[][2] = {{8, 8}, {10, 20}, {20, 20}, {20, 32}, {32, 32}, {32, 64}, {64, 64}};
  for (const auto& p : pairs) {
    const lrseq::EvidenceThresholds t{1.0 / p[0], p[1]};
    const auto pois = lrseq::poisson_operating_characteristics(design(2.41, t.k0(), t.k1()));
    const auto norm = lrseq::operating_characteristics(lrseq::NormalDesign::from_delta(0.44, t));
    EXPECT_NEAR(pois.alpha_l, norm.alpha_l, 0.005);
    EXPECT_NEAR(pois.power_l, norm.power_l, 0.005);
  }
}

TEST(PoissonTail, MatchesOracleAndComplement) {
  for (double lambda : {0.5, 5.0, 16.5, 33.0, 80.0}) {
    for (int d : {1, 3, 10, 33, 60}) {
      const double direct = lrseq::poisson_upper_tail(d, lambda);
      const double oracle = static_cast<double>(tail_oracle(d, lambda));
      EXPECT_NEAR(direct, oracle, 1e-12);
      EXPECT_NEAR(direct, lrseq::poisson_upper_tail_complement(d, lambda), 1e-10);
    }
  }
  EXPECT_EQ(lrseq::poisson_upper_tail(0, 3.0), 1.0);
  EXPECT_EQ(lrseq::poisson_upper_tail(4, 0.0), 0.0);
}

TEST(Exposure, NumericIsSmallestFeasible) {
  auto d = design(1.0, 1.0 / 8, 8);
  d.psi1 = 2.41;
  d.lambda_c = 0.25;
  const auto p = lrseq::exposure_time_numeric(33, 0.8, d, Hypothesis::null);
  const double rate = 0.25 * 2.0;
  EXPECT_GE(static_cast<double>(tail_oracle(33, rate * p.t_c)), 0.8 - 1e-12);
  EXPECT_LT(static_cast<double>(tail_oracle(33, rate * (p.t_c - 2e-6))), 0.8);
  EXPECT_DOUBLE_EQ(p.t_t, p.t_c);
  EXPECT_DOUBLE_EQ(p.gamma, 0.8);

  const auto higher = lrseq::exposure_time_numeric(33, 0.9, d, Hypothesis::null);
  EXPECT_GE(higher.t_c, p.t_c);
  const auto tiny = lrseq::exposure_time_numeric(33, 1e-9, d, Hypothesis::null);
  EXPECT_LT(tiny.t_c, p.t_c / 3);
}

TEST(Exposure, MeanProjection) {
  auto d = design(2.41, 1.0 / 20, 20);
  d.lambda_c = 0.25;
  const auto p = lrseq::exposure_time_simple(33, d, Hypothesis::null);
  EXPECT_NEAR(p.t_c, 66.0, 1e-12);
  EXPECT_LE(p.t_c, lrseq::exposure_time_numeric(33, 0.8, d, Hypothesis::null).t_c);
  const auto alt = lrseq::exposure_time_simple(35, d, Hypothesis::alternative);
  EXPECT_NEAR(alt.t_c, 35 / (0.25 * 3.41), 1e-12);

  d.g = 2.0;
  const auto g2 = lrseq::exposure_time_simple(33, d, Hypothesis::null);
  EXPECT_NEAR(g2.t_t, g2.t_c / 2, 1e-15);
}

TEST(Exposure, RequiresControlHazard) {
  const auto d = design(2.41, 1.0 / 20, 20);
  EXPECT_THROW(lrseq::exposure_time_simple(33, d, Hypothesis::null), lrseq::DomainError);
  auto with = d;
  with.lambda_c = 0.25;
  EXPECT_THROW(lrseq::exposure_time_numeric(33, 1.0, with, Hypothesis::null), lrseq::DomainError);
}
