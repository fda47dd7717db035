#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lrseq/evidence.hpp"

using namespace lrseq;

namespace {

// Direct Breslow partial log likelihood: for each event i,
// theta z_i - log sum_{j : t_j >= t_i} exp(theta z_j).
double naive_loglik(const std::vector<SurvivalRecord>& rs, double theta) {
  double ll = 0.0;
  for (const auto& ri : rs) {
    if (ri.event != 1) continue;
    double denom = 0.0;
    for (const auto& rj : rs)
      if (rj.time >= ri.time) denom += std::exp(theta * rj.group);
    ll += theta * ri.group - std::log(denom);
  }
  return ll;
}

struct GridOptimum {
  double theta_hat;
  double ll_hat;
};

GridOptimum grid_mle(const std::vector<SurvivalRecord>& rs, double lo, double hi, double step) {
  GridOptimum best{lo, -std::numeric_limits<double>::infinity()};
  for (double t = lo; t <= hi; t += step) {
    const double ll = naive_loglik(rs, t);
    if (ll > best.ll_hat) best = {t, ll};
  }
  return best;
}

// Crossings of loglik = ll_hat - ln k found by scanning outward on a fine grid.
std::pair<double, double> grid_support(const std::vector<SurvivalRecord>& rs, double k, const GridOptimum& opt,
                                       double step) {
  const double cut = opt.ll_hat - std::log(k);
  double lower = opt.theta_hat;
  while (naive_loglik(rs, lower) >= cut) lower -= step;
  double upper = opt.theta_hat;
  while (naive_loglik(rs, upper) >= cut) upper += step;
  return {lower + step / 2, upper - step / 2};
}

SurvivalRecord rec(std::string id, double t, int e, int g) { return {std::move(id), t, e, g}; }

// Three small fixed datasets with finite MLEs.
std::vector<SurvivalRecord> dataset_a() {
  return {rec("a1", 1.0, 1, 1), rec("a2", 2.0, 1, 0), rec("a3", 3.0, 1, 1), rec("a4", 4.0, 0, 0),
          rec("a5", 5.0, 1, 0), rec("a6", 6.0, 1, 1), rec("a7", 2.5, 1, 0), rec("a8", 7.0, 0, 1)};
}

std::vector<SurvivalRecord> dataset_b() {
  // Tied event times and censoring at an event time.
  return {rec("b1", 1.0, 1, 0), rec("b2", 1.0, 1, 1), rec("b3", 1.0, 0, 1), rec("b4", 2.0, 1, 0),
          rec("b5", 2.0, 1, 0), rec("b6", 3.0, 1, 1), rec("b7", 3.5, 0, 0), rec("b8", 4.0, 1, 1),
          rec("b9", 4.5, 1, 0), rec("b10", 6.0, 0, 1)};
}

std::vector<SurvivalRecord> dataset_c() {
  return {rec("c1", 0.3, 1, 0), rec("c2", 0.7, 1, 0), rec("c3", 0.9, 0, 1), rec("c4", 1.2, 1, 1),
          rec("c5", 1.5, 1, 0), rec("c6", 2.2, 1, 1), rec("c7", 2.8, 1, 0), rec("c8", 3.1, 0, 0),
          rec("c9", 3.3, 1, 1), rec("c10", 4.0, 1, 0), rec("c11", 4.4, 0, 1), rec("c12", 5.0, 1, 1)};
}

std::vector<SurvivalRecord> random_dataset(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution event(0.7);
  std::vector<SurvivalRecord> rs;
  for (int i = 0; i < n; ++i) {
    // Round to create ties.
    rs.push_back(rec("s" + std::to_string(i), std::round(u(gen) * 4) / 4, event(gen), coin(gen)));
  }
  return rs;
}

}  // namespace

TEST(Hypotheses, Validation) {
  EXPECT_THROW(Hypotheses(0.0, 0.0), DomainError);
  EXPECT_THROW(Hypotheses(0.0, std::numeric_limits<double>::infinity()), DomainError);
  EXPECT_THROW(Hypotheses::from_hazard_ratios(1.0, -0.5), DomainError);
  const auto h = Hypotheses::from_hazard_ratios(1.0, 0.415);
  EXPECT_DOUBLE_EQ(h.theta0(), 0.0);
  EXPECT_NEAR(h.psi1(), 0.415, 1e-15);
}

TEST(EvidenceThresholds, Validation) {
  EXPECT_THROW(EvidenceThresholds(1.0, 8.0), DomainError);
  EXPECT_THROW(EvidenceThresholds(0.1, 1.0), DomainError);
  EXPECT_THROW(EvidenceThresholds(0.0, 8.0), DomainError);
  const auto t = EvidenceThresholds::symmetric(20.0);
  EXPECT_DOUBLE_EQ(t.k0(), 0.05);
}

TEST(SurvivalRecord, Validation) {
  EXPECT_THROW(validate(rec("x", -1.0, 1, 0)), DomainError);
  EXPECT_THROW(validate(rec("x", 1.0, 2, 0)), DomainError);
  EXPECT_THROW(validate(rec("x", 1.0, 1, 3)), DomainError);
  EXPECT_THROW(validate(rec("x", std::nan(""), 1, 0)), DomainError);
  EXPECT_NO_THROW(validate(rec("x", 0.0, 0, 1)));
}

TEST(PartialLikelihood, TwoSubjectHandExample) {
  // Treated event at t=1 with both at risk, control event at t=2 alone:
  // LR = [e^t1 / (e^t1 + 1)] / (1/2).
  const SurvivalDataset data({rec("1", 1.0, 1, 1), rec("2", 2.0, 1, 0)});
  const Hypotheses h(0.0, -0.8795);
  const auto report = partial_lr(data, h, EvidenceThresholds(1.0 / 8, 8.0));
  EXPECT_NEAR(report.lr, 0.5866, 1e-4);
  EXPECT_NEAR(report.lr, 2.0 * std::exp(-0.8795) / (std::exp(-0.8795) + 1.0), 1e-14);
  EXPECT_EQ(report.classification, Classification::weak);
  EXPECT_EQ(report.d_events, 2u);
}

TEST(PartialLikelihood, MatchesNaiveOracle) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 50; ++rep) {
    auto rs = random_dataset(gen, 5 + rep % 20);
    if (std::none_of(rs.begin(), rs.end(), [](const auto& r) { return r.event == 1; })) continue;
    const SurvivalDataset data(rs);
    for (double theta : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
      EXPECT_NEAR(cox_partial_loglik(data, theta), naive_loglik(rs, theta), 1e-10);
    }
  }
}

TEST(PartialLikelihood, ScoreAndInformationMatchFiniteDifferences) {
  const SurvivalDataset data(dataset_b());
  const double h = 1e-5;
  for (double theta : {-1.5, -0.2, 0.0, 0.8}) {
    const double fd = (cox_partial_loglik(data, theta + h) - cox_partial_loglik(data, theta - h)) / (2 * h);
    EXPECT_NEAR(cox_score(data, theta), fd, 1e-7);
    const double fd2 = -(cox_score(data, theta + h) - cox_score(data, theta - h)) / (2 * h);
    EXPECT_NEAR(cox_information(data, theta), fd2, 1e-7);
  }
}

TEST(PartialLikelihood, EqualHypothesesGiveUnitRatio) {
  const SurvivalDataset data(dataset_a());
  EXPECT_EQ(partial_log_lr(data.risk_table(), 0.3, 0.3), 0.0);
}

TEST(PartialLikelihood, CensoredRecordsContributeNoFactor) {
  auto rs = dataset_a();
  const SurvivalDataset before(rs);
  rs.push_back(rec("late", 0.5, 0, 1));  // censored before every event: leaves no risk set
  const SurvivalDataset after(rs);
  EXPECT_NEAR(cox_partial_loglik(before, -0.4), cox_partial_loglik(after, -0.4), 1e-14);
}

TEST(PartialLikelihood, NoEventsThrows) {
  const SurvivalDataset data({rec("1", 1.0, 0, 1), rec("2", 2.0, 0, 0)});
  EXPECT_THROW(cox_partial_loglik(data, 0.0), NoEventsError);
  EXPECT_THROW(mle_theta(data), NoEventsError);
}

TEST(PartialLikelihood, RankInvariance) {
  // Any strictly increasing transform of the times leaves the LR unchanged.
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto rs = random_dataset(gen, 15);
    if (std::none_of(rs.begin(), rs.end(), [](const auto& r) { return r.event == 1; })) continue;
    auto moved = rs;
    for (auto& r : moved) r.time = std::exp(r.time) + 3.0 * r.time;
    const Hypotheses h(0.0, -0.8);
    EXPECT_NEAR(partial_log_lr(SurvivalDataset(rs).risk_table(), h),
                partial_log_lr(SurvivalDataset(moved).risk_table(), h), 1e-12);
  }
}

TEST(PartialLikelihood, GroupSwapNegatesTheta) {
  std::mt19937_64 gen(5);
  for (int rep = 0; rep < 20; ++rep) {
    auto rs = random_dataset(gen, 12);
    if (std::none_of(rs.begin(), rs.end(), [](const auto& r) { return r.event == 1; })) continue;
    auto swapped = rs;
    for (auto& r : swapped) r.group = 1 - r.group;
    const SurvivalDataset a(rs);
    const SurvivalDataset b(swapped);
    for (double theta : {-1.0, 0.25, 2.0}) {
      // loglik_swapped(theta) = loglik(-theta) + const; compare differences.
      EXPECT_NEAR(cox_partial_loglik(b, theta) - cox_partial_loglik(b, 0.0),
                  cox_partial_loglik(a, -theta) - cox_partial_loglik(a, 0.0), 1e-10);
    }
  }
}

TEST(PartialLikelihood, Classification) {
  const EvidenceThresholds t(1.0 / 20, 20.0);
  EXPECT_EQ(classify(20.0, t), Classification::strong_for_h1);
  EXPECT_EQ(classify(19.99, t), Classification::weak);
  EXPECT_EQ(classify(0.05, t), Classification::strong_for_h0);
  EXPECT_EQ(classify(1.0, t), Classification::weak);
}

class GridOracle : public ::testing::TestWithParam<int> {};

TEST_P(GridOracle, MleAndSupportIntervalMatchGridSearch) {
  const std::vector<SurvivalRecord> rs = GetParam() == 0 ? dataset_a() : GetParam() == 1 ? dataset_b() : dataset_c();
  const SurvivalDataset data(rs);
  const auto coarse = grid_mle(rs, -6.0, 6.0, 1e-3);
  const auto fine = grid_mle(rs, coarse.theta_hat - 2e-3, coarse.theta_hat + 2e-3, 1e-6);
  EXPECT_NEAR(mle_theta(data), fine.theta_hat, 1e-4);
  for (double k : {8.0, 32.0}) {
    const auto si = support_interval(data, k);
    const auto [lo, hi] = grid_support(rs, k, fine, 1e-5);
    EXPECT_NEAR(si.lower, lo, 1e-4) << "k=" << k;
    EXPECT_NEAR(si.upper, hi, 1e-4) << "k=" << k;
    EXPECT_LT(si.lower, si.theta_hat);
    EXPECT_GT(si.upper, si.theta_hat);
  }
}

INSTANTIATE_TEST_SUITE_P(FixedDatasets, GridOracle, ::testing::Values(0, 1, 2));

TEST(Mle, DivergenceDirection) {
  // Every event is in the treated arm while controls are at risk: the
  // likelihood increases in theta.
  const SurvivalDataset up({rec("1", 1.0, 1, 1), rec("2", 2.0, 1, 1), rec("3", 3.0, 0, 0)});
  try {
    mle_theta(up);
    FAIL() << "expected divergence";
  } catch (const MleDivergenceError& e) {
    EXPECT_EQ(e.direction(), +1);
  }
  const SurvivalDataset down({rec("1", 1.0, 1, 0), rec("2", 2.0, 1, 0), rec("3", 3.0, 0, 1)});
  try {
    mle_theta(down);
    FAIL() << "expected divergence";
  } catch (const MleDivergenceError& e) {
    EXPECT_EQ(e.direction(), -1);
  }
}

TEST(Mle, SupportIntervalNests) {
  const SurvivalDataset data(dataset_c());
  const auto s8 = support_interval(data, 8.0);
  const auto s32 = support_interval(data, 32.0);
  EXPECT_LT(s32.lower, s8.lower);
  EXPECT_GT(s32.upper, s8.upper);
  EXPECT_THROW(support_interval(data, 1.0), DomainError);
}

TEST(PosthocSupremum, OneWhenMleAboveNull) {
  auto below = dataset_a();
  ASSERT_LT(mle_theta(SurvivalDataset(below)), 0.0);
  auto above = below;
  for (auto& r : above) r.group = 1 - r.group;
  ASSERT_GT(mle_theta(SurvivalDataset(above)), 0.0);
  EXPECT_DOUBLE_EQ(suplr_posthoc(SurvivalDataset(above), 0.0), 1.0);

  const double sup = suplr_posthoc(SurvivalDataset(below), 0.0);
  const auto opt = grid_mle(below, -6.0, 0.0, 1e-5);
  EXPECT_NEAR(std::log(sup), opt.ll_hat - naive_loglik(below, 0.0), 1e-6);
  EXPECT_GE(sup, 1.0);
}

TEST(PosthocSupremum, MonotoneDecreasingUsesLimit) {
  // Only control events while treated are at risk: loglik rises as theta -> -inf.
  const std::vector<SurvivalRecord> rs{rec("1", 1.0, 1, 0), rec("2", 2.0, 1, 0), rec("3", 3.0, 0, 1)};
  const SurvivalDataset data(rs);
  const double sup = suplr_posthoc(data, 0.0);
  // Limit: each control death has probability 1/n_control.
  const double limit = -std::log(2.0) - std::log(1.0);
  EXPECT_NEAR(std::log(sup), limit - naive_loglik(rs, 0.0), 1e-12);
  EXPECT_NEAR(std::log(sup), naive_loglik(rs, -40.0) - naive_loglik(rs, 0.0), 1e-9);
}
