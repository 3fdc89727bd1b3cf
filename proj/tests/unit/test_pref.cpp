#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "hsd/pref/bradley_terry.hpp"

using namespace hsd;
using namespace hsd::pref;

namespace {

PairwiseVoteTable survey_three_way() {
  // Linear, SGC, Ours. SGC beat Linear 135-26, Ours beat Linear 144-17,
  // Ours beat SGC 131-30.
  return {{"Linear", "SGC", "Ours"}, {{0, 26, 17}, {135, 0, 30}, {144, 131, 0}}};
}

PairwiseVoteTable survey_two_way() { return {{"SGC", "Ours"}, {{0, 52}, {155, 0}}}; }

// Independent oracle: Newton's method on theta = log(pi) with theta_0 = 0.
std::vector<double> newton_oracle(const PairwiseVoteTable& t) {
  const int m = static_cast<int>(t.size());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double n = static_cast<double>(t.wins[i][j] + t.wins[j][i]);
        if (n == 0) continue;
        const double p = 1.0 / (1.0 + std::exp(theta[j] - theta[i]));
        g[i] += t.wins[i][j] - n * p;
        g[j] -= t.wins[i][j] - n * p;
        const double w = n * p * (1 - p);
        h(i, i) -= w;
        h(j, j) -= w;
        h(i, j) += w;
        h(j, i) += w;
      }
    const Eigen::VectorXd step =
        h.bottomRightCorner(m - 1, m - 1).ldlt().solve(-g.tail(m - 1));
    theta.tail(m - 1) += step;
    if (step.norm() < 1e-14) break;
  }
  std::vector<double> pi(m);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += pi[i] = std::exp(theta[i]);
  for (auto& p : pi) p /= s;
  return pi;
}

}  // namespace

TEST(BradleyTerry, ThreeWayMatchesNewtonOracle) {
  const auto t = survey_three_way();
  const auto fit = fit_bradley_terry(t);
  const auto oracle = newton_oracle(t);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(fit.pi[i], oracle[i], 1e-8);
}

TEST(BradleyTerry, ThreeWayReproducesSurvey) {
  const auto fit = fit_bradley_terry(survey_three_way());
  EXPECT_NEAR(fit.pi[0], 0.053, 0.01);
  EXPECT_NEAR(fit.pi[1], 0.213, 0.01);
  EXPECT_NEAR(fit.pi[2], 0.734, 0.01);
  EXPECT_NEAR(preference_ratio(fit.pi, 2, 0), 13.8, 13.8 * 0.05);
  EXPECT_NEAR(preference_ratio(fit.pi, 2, 1), 3.5, 3.5 * 0.05);
  EXPECT_EQ(preference_ratio(fit.pi, 1, 1), 1.0);
  const auto p = significance_test(survey_three_way(), fit);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_LT(p[i][j], 0.01);
}

TEST(BradleyTerry, TwoWayIsWinProportion) {
  const auto fit = fit_bradley_terry(survey_two_way());
  EXPECT_NEAR(fit.pi[0], 52.0 / 207.0, 1e-9);
  EXPECT_NEAR(fit.pi[1], 155.0 / 207.0, 1e-9);
  EXPECT_NEAR(fit.pi[0], 0.251, 0.005);
  EXPECT_LT(significance_test(survey_two_way(), fit)[0][1], 0.01);
}

TEST(BradleyTerry, TwoWayLikelihoodRatioClosedForm) {
  // G statistic for a binomial against p = 1/2.
  const double a = 52, b = 155, n = a + b;
  const double g = 2 * (a * std::log(a / n) + b * std::log(b / n) - n * std::log(0.5));
  const auto fit = fit_bradley_terry(survey_two_way());
  EXPECT_NEAR(significance_test(survey_two_way(), fit)[0][1], std::erfc(std::sqrt(g / 2)), 1e-12);
}

TEST(BradleyTerry, BalancedVotes) {
  PairwiseVoteTable t{{"a", "b"}, {{0, 50}, {50, 0}}};
  const auto fit = fit_bradley_terry(t);
  EXPECT_NEAR(fit.pi[0], 0.5, 1e-12);
  EXPECT_NEAR(significance_test(t, fit)[0][1], 1.0, 1e-9);
}

TEST(BradleyTerry, PermutationEquivariant) {
  const auto t = survey_three_way();
  const int perm[] = {2, 0, 1};
  PairwiseVoteTable u;
  u.wins.assign(3, std::vector<std::int64_t>(3, 0));
  for (int i = 0; i < 3; ++i) {
    u.methods.push_back(t.methods[perm[i]]);
    for (int j = 0; j < 3; ++j) u.wins[i][j] = t.wins[perm[i]][perm[j]];
  }
  const auto a = fit_bradley_terry(t), b = fit_bradley_terry(u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(b.pi[i], a.pi[perm[i]], 1e-9);
}

TEST(BradleyTerry, ScalingCountsKeepsEstimate) {
  auto t = survey_three_way();
  const auto a = fit_bradley_terry(t);
  for (auto& row : t.wins)
    for (auto& w : row) w *= 3;
  const auto b = fit_bradley_terry(t);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.pi[i], b.pi[i], 1e-9);
}

TEST(BradleyTerry, Errors) {
  PairwiseVoteTable disconnected{{"a", "b", "c", "d"},
                                 {{0, 3, 0, 0}, {2, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 4, 0}}};
  EXPECT_THROW(fit_bradley_terry(disconnected), EstimationError);
  PairwiseVoteTable sweep{{"a", "b"}, {{0, 10}, {0, 0}}};
  try {
    fit_bradley_terry(sweep);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
  BradleyTerryOptions tight;
  tight.max_iter = 2;
  EXPECT_THROW(fit_bradley_terry(survey_three_way(), tight), IterationLimitError);
}

TEST(BradleyTerry, CsvIngest) {
  std::istringstream in("method_a,method_b,wins_a,wins_b\nLinear,SGC,26,135\nLinear,Ours,17,144\nSGC,Ours,30,131\n");
  const auto t = parse_vote_csv(in);
  ASSERT_EQ(t.methods, (std::vector<std::string>{"Linear", "SGC", "Ours"}));
  EXPECT_EQ(t.wins[1][0], 135);
  EXPECT_EQ(t.wins[0][2], 17);
  std::istringstream bad("a,b,1\n");
  EXPECT_THROW(parse_vote_csv(bad), ConfigError);
}
