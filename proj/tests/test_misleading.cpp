#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "lrseq/misleading.hpp"

using lrseq::EvidenceScale;
using lrseq::LookWindow;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Phi via the complementary error function, independent of the library's Phi.
double phi_erfc(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Fraction of discrete Gaussian walks (log LR increments under the null are
// N(-delta^2/2, delta^2)) that reach ln k at some look in [m0, m].
double walk_crossing_rate(double delta, double k, int m0, int m, int reps, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(-delta * delta / 2.0, delta);
  const double target = std::log(k);
  int hits = 0;
  for (int r = 0; r < reps; ++r) {
    double s = 0.0;
    for (int n = 1; n <= m; ++n) {
      s += step(rng);
      if (n >= m0 && s >= target) {
        ++hits;
        break;
      }
      if (s < -40.0) break;
    }
  }
  return static_cast<double>(hits) / reps;
}

}  // namespace

TEST(UniversalBound, IsReciprocal) {
  EXPECT_DOUBLE_EQ(lrseq::universal_bound(8), 0.125);
  EXPECT_DOUBLE_EQ(lrseq::universal_bound(20), 0.05);
  EXPECT_THROW(lrseq::universal_bound(1.0), lrseq::DomainError);
  EXPECT_THROW(lrseq::universal_bound(0.5), lrseq::DomainError);
}

TEST(Bump, MatchesDirectEvaluation) {
  const EvidenceScale s{0.44, lrseq::kRhoNormal};
  const double want = phi_erfc(-std::log(20.0) / (0.44 * 5.0) - 0.44 * 5.0 / 2.0);
  EXPECT_NEAR(lrseq::bump(s, 25, 20), want, 1e-14);
}

TEST(Bump, AtMaximizingDistanceEqualsBumpMax) {
  const double z = std::sqrt(2.0 * std::log(8.0));
  // delta * sqrt(n) = z with n = 1
  EXPECT_NEAR(lrseq::bump({z, 0.0}, 1, 8), 0.0207, 5e-5);
  EXPECT_NEAR(lrseq::bump({z, 0.0}, 1, 8), lrseq::bump_max(8).probability, 1e-14);
  EXPECT_NEAR(lrseq::bump_max(8).standardized_distance, z, 1e-14);
}

TEST(Bump, NeverExceedsMaxOnGrid) {
  for (double k : {8.0, 20.0, 32.0, 64.0}) {
    const double top = lrseq::bump_max(k).probability;
    for (double delta = 0.01; delta <= 5.0; delta += 0.07) {
      for (double n : {1.0, 2.0, 5.0, 17.0, 100.0, 999.0, 10000.0}) {
        EXPECT_LE(lrseq::bump({delta, 0.0}, n, k), top + 1e-12);
      }
    }
  }
}

TEST(Bump, VanishesForLargeSamples) {
  EXPECT_LT(lrseq::bump({0.44, 0.0}, 1e6, 8), 1e-10);
}

TEST(Bump, RejectsBadInputs) {
  EXPECT_THROW(lrseq::bump({0.0, 0.0}, 10, 8), lrseq::DomainError);
  EXPECT_THROW(lrseq::bump({0.5, 0.0}, 0.5, 8), lrseq::DomainError);
  EXPECT_THROW(lrseq::bump({0.5, 0.0}, 10, 1.0), lrseq::DomainError);
}

TEST(BumpMax, PublishedValues) {
  EXPECT_NEAR(lrseq::bump_max(8).probability, 0.0207, 5e-5);
  EXPECT_NEAR(lrseq::bump_max(20).probability, 0.0072, 5e-5);
  EXPECT_NEAR(lrseq::bump_max(64).probability, 0.0020, 5e-5);
  EXPECT_THROW(lrseq::bump_max(1.0), lrseq::DomainError);
}

TEST(Tepee, LimitsAndBound) {
  EXPECT_DOUBLE_EQ(lrseq::tepee({0.7, 0.0}, 8), 0.125);
  EXPECT_NEAR(lrseq::tepee({0.44, 0.583}, 20), std::exp(-0.583 * 0.44) / 20, 1e-15);
  EXPECT_NEAR(lrseq::tepee({0.44, 0.583}, 20), 0.03868, 1e-5);
  EXPECT_LT(lrseq::tepee({200.0, 0.583}, 8), 1e-40);
  for (double delta : {0.05, 0.25, 0.44, 1.0, 3.0})
    for (double rho : {0.0, 0.32, 0.583, 2.0})
      for (double k : {2.0, 8.0, 64.0}) EXPECT_LE(lrseq::tepee({delta, rho}, k), 1.0 / k);
}

TEST(ExtendedBump, UnlimitedLooksFromStartGiveTepee) {
  for (double delta : {0.25, 0.44, 1.0}) {
    const EvidenceScale s{delta, lrseq::kRhoNormal};
    EXPECT_NEAR(lrseq::extended_bump(s, {1.0, kInf}, 8), lrseq::tepee(s, 8), 1e-15);
    EXPECT_NEAR(lrseq::extended_bump(s, {1.0, 1e8}, 8), lrseq::tepee(s, 8), 1e-6);
  }
}

TEST(ExtendedBump, IllustrativeWindowStaysBelowUniversalBound) {
  const double p = lrseq::extended_bump({1.0, lrseq::kRhoNormal}, {3.0, 15.0}, 8);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 0.125);
}

TEST(ExtendedBump, GrowsWithTheWindow) {
  const EvidenceScale s{0.44, lrseq::kRhoNormal};
  double prev = 0.0;
  for (double m : {10.0, 20.0, 50.0, 100.0, 500.0, kInf}) {
    const double p = lrseq::extended_bump(s, {10.0, m}, 20);
    EXPECT_GE(p, prev - 1e-15);
    prev = p;
  }
}

TEST(ExtendedBump, TracksDiscreteWalkForLongWindows) {
  // The overshoot correction targets discrete looks, so a long window should
  // agree with simulation to within a few Monte Carlo standard errors plus a
  // small approximation allowance.
  const double delta = 0.44;
  const double k = 8.0;
  const double p = lrseq::extended_bump({delta, lrseq::kRhoNormal}, {1.0, 400.0}, k);
  const int reps = 100000;
  const double mc = walk_crossing_rate(delta, k, 1, 400, reps, 42);
  const double se = std::sqrt(mc * (1 - mc) / reps);
  EXPECT_NEAR(p, mc, 4 * se + 0.005);
}

TEST(ExtendedBump, RejectsInvalidWindow) {
  EXPECT_THROW(lrseq::extended_bump({1.0, 0.5}, {0.0, 10.0}, 8), lrseq::DomainError);
  EXPECT_THROW(lrseq::extended_bump({1.0, 0.5}, {10.0, 5.0}, 8), lrseq::DomainError);
}

TEST(AstrayFixed, PublishedValuesAndTwoSided) {
  EXPECT_NEAR(lrseq::astray_fixed(20), 0.0072, 5e-5);
  EXPECT_NEAR(lrseq::astray_fixed(32), 0.0042, 5e-5);
  EXPECT_NEAR(lrseq::astray_fixed(8, true), 0.0414, 1e-4);
  EXPECT_DOUBLE_EQ(lrseq::astray_fixed(8, true), 2 * lrseq::astray_fixed(8));
  EXPECT_THROW(lrseq::astray_fixed(1.0), lrseq::DomainError);
}

TEST(AstraySequential, PublishedValues) {
  EXPECT_NEAR(lrseq::astray_sequential_bound({1.0, 10.0}, 20).sequential, 0.0562, 5e-5);
  EXPECT_NEAR(lrseq::astray_sequential_bound({1.0, 100.0}, 8).sequential, 0.2342, 5e-5);
}

TEST(AstraySequential, EqualEndsReportTheFixedDesign) {
  const auto b = lrseq::astray_sequential_bound({40.0, 40.0}, 20);
  EXPECT_EQ(b.sequential, 0.0);
  EXPECT_DOUBLE_EQ(b.fixed, lrseq::astray_fixed(20));
  EXPECT_DOUBLE_EQ(b.reported, b.fixed);
}

TEST(AstraySequential, AdditiveOverSplitWindows) {
  for (double k : {8.0, 32.0}) {
    for (double r : {5.0, 17.0, 60.0}) {
      const double whole = lrseq::astray_sequential_bound({5.0, 60.0}, k).sequential;
      const double left = lrseq::astray_sequential_bound({5.0, r}, k).sequential;
      const double right = lrseq::astray_sequential_bound({r, 60.0}, k).sequential;
      EXPECT_NEAR(whole, left + right, 1e-14);
    }
  }
}

TEST(AstraySequential, UnboundedWindowDiverges) {
  EXPECT_THROW(lrseq::astray_sequential_bound({1.0, kInf}, 20), lrseq::DomainError);
}

TEST(Table1, ReproducesEveryCell) {
  const double published[4][6] = {
      {0.2342, 0.1523, 0.1171, 0.0818, 0.0352, 0.0207},
      {0.1124, 0.0731, 0.0562, 0.0393, 0.0169, 0.0072},
      {0.0756, 0.0492, 0.0378, 0.0264, 0.0114, 0.0042},
      {0.0414, 0.0269, 0.0207, 0.0145, 0.0062, 0.0020},
  };
  const auto t = lrseq::reproduce_table1();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(t[i][j], published[i][j], 5e-5) << i << "," << j;
}

TEST(Table1, RowsDecreaseLeftToRight) {
  const auto t = lrseq::reproduce_table1();
  for (const auto& row : t)
    for (std::size_t j = 1; j < row.size(); ++j) EXPECT_LT(row[j], row[j - 1]);
}
