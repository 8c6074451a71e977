#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "pbandit/adversarial.hpp"

using namespace pbandit;

namespace {

double tsallis_residual(const std::vector<double>& g, double alpha, double lambda)
{
  const double c = std::pow((1.0 - alpha) / alpha, 1.0 / (alpha - 1.0));
  double sum = 0.0;
  for (double x : g) sum += c * std::pow(lambda - x, 1.0 / (alpha - 1.0));
  return sum - 1.0;
}

double max_gap(const ChoiceProbabilities& a, const ChoiceProbabilities& b)
{
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

} // namespace

TEST(ChoiceProbabilities, RejectsNonSimplex)
{
  EXPECT_THROW(ChoiceProbabilities({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(ChoiceProbabilities({1.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(ChoiceProbabilities({0.25, 0.75}));
}

TEST(Shannon, Examples)
{
  const auto u = choice_prob_shannon(std::vector<double>{0, 0, 0}, 3.7);
  for (double p : u) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  const auto p = choice_prob_shannon(std::vector<double>{1, 0}, 1.0);
  EXPECT_NEAR(p[0], std::numbers::e / (1.0 + std::numbers::e), 1e-15);
  EXPECT_NEAR(p[0], 0.73106, 1e-5);
  for (double c : {-50.0, 3.0, 1e4}) {
    const auto q = choice_prob_shannon(std::vector<double>{c + 1, c}, 1.0);
    EXPECT_NEAR(q[0], p[0], 1e-9);
  }
  // Overflow safety.
  const auto big = choice_prob_shannon(std::vector<double>{1e6, 0}, 1.0);
  EXPECT_GT(big[1], 0.0);
}

TEST(Tsallis, LambdaHandSolution)
{
  EXPECT_NEAR(solve_tsallis_lambda(std::vector<double>{0, 0}, 0.5), std::sqrt(2.0), 1e-12);
  for (double alpha : {0.2, 0.5, 0.8}) {
    const auto p = choice_prob_tsallis(std::vector<double>{0, 0, 0, 0}, 1.0, alpha);
    for (double x : p) EXPECT_NEAR(x, 0.25, 1e-12);
  }
}

TEST(Tsallis, LambdaResidualAndBracket)
{
  const std::vector<double> g{5, 0};
  const double lambda = solve_tsallis_lambda(g, 0.5);
  EXPECT_GT(lambda, 5.0);
  EXPECT_LE(std::abs(tsallis_residual(g, 0.5, lambda)), 1e-12);
  // Scan oracle: the residual changes sign across λ on a fine grid.
  double lo = 5.0 + 1e-9, hi = 5.0 + 1e-9;
  while (tsallis_residual(g, 0.5, hi) > 0.0) hi += 1e-3;
  lo = hi - 1e-3;
  EXPECT_GE(lambda, lo);
  EXPECT_LE(lambda, hi);
  SeededStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> gains(6);
    for (double& x : gains) x = 20.0 * rng.uniform() - 10.0;
    for (double alpha : {0.1, 0.5, 0.9}) {
      const double l = solve_tsallis_lambda(gains, alpha);
      EXPECT_GT(l, *std::max_element(gains.begin(), gains.end()));
      EXPECT_LE(std::abs(tsallis_residual(gains, alpha, l)), 1e-12);
    }
  }
}

TEST(Tsallis, ShannonLimit)
{
  const auto t = choice_prob_tsallis(std::vector<double>{1, 0}, 1.0, 0.999);
  const auto s = choice_prob_shannon(std::vector<double>{1, 0}, 1.0);
  EXPECT_LT(max_gap(t, s), 1e-2);
}

TEST(ChoiceMaps, TranslationInvariance)
{
  SeededStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> g(5), h(5);
    const double c = 100.0 * rng.uniform() - 50.0;
    for (std::size_t i = 0; i < 5; ++i) {
      g[i] = 10.0 * rng.uniform();
      h[i] = g[i] + c;
    }
    EXPECT_LT(max_gap(choice_prob_shannon(g, 2.0), choice_prob_shannon(h, 2.0)), 1e-9);
    EXPECT_LT(max_gap(choice_prob_tsallis(g, 2.0, 0.5), choice_prob_tsallis(h, 2.0, 0.5)), 1e-9);
  }
}

TEST(FtplMc, UniformGains)
{
  SeededStream rng(5);
  const std::int64_t m = 100'000;
  const auto p = choice_prob_ftpl_mc(std::vector<double>{0, 0, 0, 0}, 1.0, PerturbationSpec::gaussian(), m,
                                     default_floor(4), rng);
  for (double x : p) EXPECT_NEAR(x, 0.25, 3.0 / std::sqrt(static_cast<double>(m)));
}

TEST(FtplMc, GumbelLemmaTwoArms)
{
  SeededStream rng(6);
  const auto p = choice_prob_ftpl_mc(std::vector<double>{1, 0}, 1.0, PerturbationSpec::gumbel(), 1'000'000,
                                     default_floor(2), rng);
  EXPECT_NEAR(p[0], 0.731, 0.003);
  EXPECT_NEAR(p[1], 0.269, 0.003);
}

TEST(FtplMc, SingleSampleIsFlooredVertex)
{
  SeededStream rng(7);
  const double rho = 0.01;
  const auto p = choice_prob_ftpl_mc(std::vector<double>{0.3, 0.1, 0.2}, 1.0, PerturbationSpec::gumbel(), 1, rho, rng);
  int top = 0, floored = 0;
  for (double x : p) {
    top += std::abs(x - (1.0 - 2.0 * rho)) < 1e-12;
    floored += std::abs(x - rho) < 1e-12;
  }
  EXPECT_EQ(top, 1);
  EXPECT_EQ(floored, 2);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
}

TEST(Ipw, Examples)
{
  const ChoiceProbabilities p({0.5, 0.4, 0.1});
  const auto g = ipw_estimate(0.8, 1, p);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_NEAR(g[1], 2.0, 1e-15);
  EXPECT_EQ(g[2], 0.0);
  for (double x : ipw_estimate(0.0, 2, p)) EXPECT_EQ(x, 0.0);
}

TEST(Ipw, Unbiasedness)
{
  // Dyadic inputs make every product and quotient exact.
  const ChoiceProbabilities p({0.5, 0.25, 0.25});
  const std::vector<double> rewards{0.75, 0.5, 0.125};
  std::vector<double> expectation(3, 0.0);
  for (std::size_t a = 0; a < 3; ++a) {
    const auto est = ipw_estimate(rewards[a], a, p);
    for (std::size_t i = 0; i < 3; ++i) expectation[i] += p[a] * est[i];
  }
  EXPECT_EQ(expectation, rewards);
}

TEST(TuneEta, Examples)
{
  EXPECT_DOUBLE_EQ(tune_eta(2, 5, 0.3, 3.0), 1.0);
  EXPECT_NEAR(tune_eta(10, 1000, 1.0, std::log(10.0) + euler_gamma), 58.93, 0.01);
  EXPECT_NEAR(tune_eta(10, 2000, 1.0, 2.0) / tune_eta(10, 1000, 1.0, 2.0), std::sqrt(2.0), 1e-12);
  EXPECT_THROW(tune_eta(10, 1000, 0.0, 1.0), ConfigError);
}

TEST(TuneEtaTsallis, MinimizesItsBound)
{
  const std::size_t k = 10;
  const std::int64_t horizon = 10'000;
  const double alpha = 0.5;
  const double eta = tune_eta_tsallis(k, horizon, alpha);
  auto bound = [&](double e) {
    const double kk = static_cast<double>(k);
    return (std::pow(kk, 1.0 - alpha) - 1.0) / (1.0 - alpha) * e +
           std::pow(kk, alpha) * static_cast<double>(horizon) / (2.0 * alpha * e);
  };
  EXPECT_LT(bound(eta), bound(eta * 1.01));
  EXPECT_LT(bound(eta), bound(eta * 0.99));
}

TEST(RewardMatrix, GeneratorsAndCsv)
{
  EXPECT_THROW(RewardMatrix(2, 2, {0.1, 0.2, 1.5, 0.0}), ConfigError);
  const auto sb = RewardMatrix::single_best_arm(4, 3, 2);
  EXPECT_EQ(sb.best_column_sum(), 4.0);
  EXPECT_EQ(sb(1, 2), 1.0);
  std::istringstream csv("0.1,0.9\n0.5, 0.5\r\n\n1,0\n");
  const auto m = RewardMatrix::from_csv(csv);
  EXPECT_EQ(m.rounds(), 3u);
  EXPECT_EQ(m.arms(), 2u);
  EXPECT_DOUBLE_EQ(m.best_column_sum(), 1.6);
  std::istringstream ragged("0.1,0.2\n0.3\n");
  EXPECT_THROW(RewardMatrix::from_csv(ragged), ConfigError);
  std::istringstream bad("0.1,abc\n");
  EXPECT_THROW(RewardMatrix::from_csv(bad), ConfigError);
  EXPECT_THROW(RewardMatrix::from_csv_file("/nonexistent/rewards.csv"), std::runtime_error);
  const auto iid = RewardMatrix::iid_uniform(10, 3, 5);
  const auto iid2 = RewardMatrix::iid_uniform(10, 3, 5);
  for (std::size_t t = 0; t < 10; ++t)
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(iid(t, i), iid2(t, i));
}

TEST(Gbpa, ConstantRewardsGiveZeroRegret)
{
  const auto rewards = RewardMatrix::constant(500, 4, 0.6);
  for (const auto& pot : {PotentialSpec::shannon(5.0), PotentialSpec::tsallis(5.0),
                          PotentialSpec::ftpl(5.0, PerturbationSpec::gumbel(), 20)}) {
    double sum = 0.0;
    for (int e = 0; e < 20; ++e) sum += run_gbpa(rewards, pot, e).regret;
    EXPECT_NEAR(sum / 20.0, 0.0, 1e-9) << pot.label();
  }
}

TEST(Gbpa, StateAccumulatesEstimates)
{
  const auto rewards = RewardMatrix::iid_uniform(300, 3, 1);
  const auto r = run_gbpa(rewards, PotentialSpec::shannon(10.0), 3);
  EXPECT_EQ(r.state.t, 300);
  EXPECT_EQ(r.state.chosen.size(), 300u);
  double realized = 0.0;
  for (std::size_t t = 0; t < 300; ++t) realized += rewards(t, r.state.chosen[t]);
  EXPECT_NEAR(realized, r.state.realized_reward, 1e-9);
  EXPECT_NEAR(r.regret, rewards.best_column_sum() - realized, 1e-9);
  // Reproducible per seed.
  EXPECT_EQ(run_gbpa(rewards, PotentialSpec::shannon(10.0), 3).state.chosen, r.state.chosen);
}

TEST(Gbpa, ShannonSublinearOnSingleBestArm)
{
  auto mean_regret = [](std::int64_t horizon) {
    const auto rewards = RewardMatrix::single_best_arm(static_cast<std::size_t>(horizon), 10);
    const double eta = tune_eta(10, horizon, 1.0, std::log(10.0) + euler_gamma);
    double sum = 0.0;
    for (int e = 0; e < 20; ++e) sum += run_gbpa(rewards, PotentialSpec::shannon(eta), e).regret;
    return sum / 20.0;
  };
  const double r3 = mean_regret(1000);
  const double r4 = mean_regret(10'000);
  EXPECT_LT(r4, 10'000 / 2.0);
  EXPECT_LT(r4 / 10'000.0, r3 / 1000.0);
}

TEST(PotentialSpec, Validation)
{
  EXPECT_THROW(PotentialSpec::shannon(0.0), ConfigError);
  EXPECT_THROW(PotentialSpec::tsallis(1.0, 1.0), ConfigError);
  EXPECT_THROW(PotentialSpec::ftpl(1.0, PerturbationSpec::gumbel(), 0), ConfigError);
  EXPECT_EQ(PotentialSpec::ftpl(1.0, PerturbationSpec::gumbel(), 5).label(), "FTPL-Gumbel");
}
