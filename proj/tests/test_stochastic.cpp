#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "pbandit/stochastic.hpp"

using namespace pbandit;

namespace {

LearnerState make_state(std::vector<double> means, std::vector<std::int64_t> counts)
{
  LearnerState s(means.size());
  s.means_hat = std::move(means);
  s.counts = std::move(counts);
  s.t = std::accumulate(s.counts.begin(), s.counts.end(), std::int64_t{0});
  return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

TEST(Ucb1, Examples)
{
  EXPECT_EQ(select_ucb1(make_state({0, 0}, {1, 1}), 100), 0u);
  // Indices 1 + √(2 log 100 / 4) = 2.517 and √(2 log 100) = 3.035.
  EXPECT_EQ(select_ucb1(make_state({1, 0}, {4, 1}), 100), 1u);
  EXPECT_EQ(select_ucb1(make_state({0, 3}, {0, 5}), 100), 0u);
  EXPECT_EQ(select_ucb1(make_state({5, 0, 0}, {3, 0, 0}), 100), 1u);
}

TEST(Thompson, SymmetricStateIsFair)
{
  for (auto counts : {std::vector<std::int64_t>{3, 3}, std::vector<std::int64_t>{0, 0}}) {
    SeededStream rng(1);
    const auto s = make_state({0.2, 0.2}, counts);
    int first = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i) first += select_thompson_gaussian(s, rng) == 0;
    EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.005);
  }
}

TEST(Thompson, GaussianDifferenceProbability)
{
  SeededStream rng(2);
  const auto s = make_state({1, 0}, {4, 4});
  int second = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) second += select_thompson_gaussian(s, rng) == 1;
  EXPECT_NEAR(static_cast<double>(second) / n, normal_cdf(-std::sqrt(2.0)), 0.003);
}

TEST(FtplUnbounded, CoupledWithThompson)
{
  const auto spec = PerturbationSpec::gaussian(1.0);
  SeededStream a(77), b(77), rewards(78);
  LearnerState sa(3), sb(3);
  const std::vector<double> means{0.1, 0.5, 0.4};
  for (int t = 0; t < 10'000; ++t) {
    const auto x = select_thompson_gaussian(sa, a);
    const auto y = select_ftpl_unbounded(sb, spec, b);
    ASSERT_EQ(x, y) << "round " << t;
    const double r = means[x] + rewards.normal();
    update(sa, x, r);
    update(sb, y, r);
  }
}

TEST(FtplUnbounded, RejectsBoundedSpec)
{
  SeededStream rng(1);
  EXPECT_THROW(select_ftpl_unbounded(make_state({0, 0}, {1, 1}), PerturbationSpec::uniform(), rng), ConfigError);
  EXPECT_THROW(PolicyConfig::ftpl_unbounded(PerturbationSpec::uniform()), ConfigError);
  EXPECT_THROW(PolicyConfig::ftpl_unbounded(PerturbationSpec::gumbel()), UnsupportedError);
  EXPECT_THROW(select_ftpl_bounded(make_state({0, 0}, {1, 1}), PerturbationSpec::gaussian(), 100, 0.25, rng),
               ConfigError);
  EXPECT_THROW(PolicyConfig::ftpl_bounded(PerturbationSpec::uniform(), 0.0), ConfigError);
}

TEST(FtplUnbounded, SymmetricStateIsFair)
{
  SeededStream rng(4);
  const auto s = make_state({0, 0}, {2, 2});
  int first = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) first += select_ftpl_unbounded(s, PerturbationSpec::double_exponential(1.0), rng) == 0;
  EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.005);
}

TEST(BoundedPerturbation, FailureStateWithoutWidening)
{
  const auto s = make_state({-1.0, 1.0 / 3.0}, {1, 9});
  const auto uni = PerturbationSpec::uniform();
  // Unwidened FTPL scale 1/√T_i.
  const std::vector<double> widths{1.0, 1.0 / 3.0};
  EXPECT_TRUE(selection_impossible(s, 0, widths, uni));
  // Sampling agrees.
  SeededStream rng(3);
  std::vector<double> scratch;
  for (int i = 0; i < 10'000; ++i) {
    ASSERT_EQ(detail::perturbed_leader(s, uni, detail::inv_sqrt_pulls, rng, scratch), 1u);
  }
}

TEST(BoundedPerturbation, WideningRestoresExploration)
{
  const auto s = make_state({-1.0, 1.0 / 3.0}, {1, 9});
  const auto uni = PerturbationSpec::uniform();
  const std::vector<double> widths{bounded_width(1, 10'000, 0.25), bounded_width(9, 10'000, 0.25)};
  EXPECT_NEAR(widths[0], std::sqrt(2.25 * std::log(1e4)), 1e-12);
  EXPECT_FALSE(selection_impossible(s, 0, widths, uni));
  SeededStream rng(5);
  int first = 0;
  for (int i = 0; i < 100'000; ++i) first += select_ftpl_bounded(s, uni, 10'000, 0.25, rng) == 0;
  EXPECT_GT(first, 0);
}

TEST(BoundedPerturbation, RademacherPicksConfidenceBounds)
{
  // Replaying the stream recovers Z; each index must be exactly μ̂_i ± w_i.
  const auto s = make_state({0.0, 0.05}, {4, 1});
  const double w0 = bounded_width(4, 100, 0.25);
  const double w1 = bounded_width(1, 100, 0.25);
  SeededStream rng(6);
  for (int i = 0; i < 1000; ++i) {
    SeededStream replay = rng;
    const double z0 = sample(PerturbationSpec::rademacher(), replay);
    const double z1 = sample(PerturbationSpec::rademacher(), replay);
    const double theta0 = z0 * w0;
    const double theta1 = 0.05 + z1 * w1;
    ASSERT_TRUE(std::abs(z0) == 1.0 && std::abs(z1) == 1.0);
    ASSERT_EQ(select_ftpl_bounded(s, PerturbationSpec::rademacher(), 100, 0.25, rng), theta0 > theta1 ? 0u : 1u);
  }
}

TEST(BoundedPerturbation, SymmetricStateIsFair)
{
  SeededStream rng(8);
  const auto s = make_state({0.0, 0.0}, {3, 3});
  int first = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) first += select_ftpl_bounded(s, PerturbationSpec::rademacher(), 100, 0.25, rng) == 0;
  EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.005);
}

TEST(Update, Arithmetic)
{
  LearnerState s(1);
  update(s, 0, 1.0);
  EXPECT_EQ(s.counts[0], 1);
  EXPECT_EQ(s.means_hat[0], 1.0);
  LearnerState u = make_state({0.5}, {2});
  update(u, 0, 1.0);
  EXPECT_EQ(u.counts[0], 3);
  EXPECT_NEAR(u.means_hat[0], 2.0 / 3.0, 1e-15);
  for (auto order : {std::vector<double>{0, 1, 1}, std::vector<double>{1, 0, 1}, std::vector<double>{1, 1, 0}}) {
    LearnerState v(1);
    for (double r : order) update(v, 0, r);
    EXPECT_NEAR(v.means_hat[0], 2.0 / 3.0, 1e-15);
    EXPECT_EQ(v.t, 3);
  }
}

TEST(ShiftInvariance, CommonTranslationKeepsSelections)
{
  const auto base = make_state({0.1, 0.4, 0.3, 0.2}, {5, 9, 2, 7});
  auto shifted = base;
  for (double& m : shifted.means_hat) m += 12.5;
  SeededStream a(9), b(9), c(10), d(10);
  for (int i = 0; i < 2000; ++i) {
    ASSERT_EQ(select_thompson_gaussian(base, a), select_thompson_gaussian(shifted, b));
    ASSERT_EQ(select_ftpl_unbounded(base, PerturbationSpec::double_exponential(1.0), c),
              select_ftpl_unbounded(shifted, PerturbationSpec::double_exponential(1.0), d));
  }
}

TEST(RunEpisode, SingleArmHasZeroRegret)
{
  const BanditInstance inst({0.4}, RewardModel::GaussianShift, 500);
  const RegretTrace tr = run_episode(inst, PolicyConfig::thompson_gaussian(), 1);
  for (double r : tr.cumulative) EXPECT_EQ(r, 0.0);
}

TEST(RunEpisode, FixedArmRegretIsLinear)
{
  const BanditInstance inst({1.0, 0.0}, RewardModel::GaussianShift, 300);
  const RegretTrace tr = run_episode(inst, PolicyConfig::fixed_arm(1), 1);
  for (std::int64_t t = 1; t <= 300; ++t) EXPECT_EQ(tr.at(t), static_cast<double>(t));
}

TEST(RunEpisode, DecompositionAndMonotonicity)
{
  const BanditInstance inst({0.9, 0.5, 0.45, 0.1}, RewardModel::GaussianMixtureShift, 3000);
  for (const auto& cfg : {PolicyConfig::ucb1(), PolicyConfig::thompson_gaussian(),
                          PolicyConfig::ftpl_unbounded(PerturbationSpec::double_exponential(1.0)),
                          PolicyConfig::ftpl_bounded(PerturbationSpec::rademacher(), 0.25)}) {
    const RegretTrace tr = run_episode(inst, cfg, 17);
    double expected = 0.0;
    for (std::size_t i = 0; i < inst.arms(); ++i) expected += inst.gaps()[i] * static_cast<double>(tr.final_counts[i]);
    EXPECT_EQ(tr.final_regret(), expected) << cfg.label();
    for (std::size_t t = 1; t < tr.cumulative.size(); ++t) ASSERT_GE(tr.cumulative[t], tr.cumulative[t - 1]);
    EXPECT_EQ(std::accumulate(tr.final_counts.begin(), tr.final_counts.end(), std::int64_t{0}), 3000);
    // Bit-reproducible.
    EXPECT_EQ(run_episode(inst, cfg, 17).cumulative, tr.cumulative);
  }
}

TEST(RunEpisode, AverageRegretDecreases)
{
  SeededStream means_rng(31);
  const std::int64_t horizon = 10'000;
  double early = 0.0, late = 0.0;
  const int episodes = 50;
  for (int e = 0; e < episodes; ++e) {
    std::vector<double> mu(10);
    for (double& m : mu) m = means_rng.uniform();
    const BanditInstance inst(mu, RewardModel::GaussianShift, horizon);
    const RegretTrace tr = run_episode(inst, PolicyConfig::ftpl_unbounded(PerturbationSpec::gaussian(1.0)), e);
    early += tr.at(horizon / 10) / (horizon / 10);
    late += tr.at(horizon) / horizon;
  }
  EXPECT_LT(late, early);
}

TEST(LowerBoundInstance, Construction)
{
  const BanditInstance a = make_lower_bound_instance(10, 10'000, 2.0);
  EXPECT_NEAR(a.means()[0], std::sqrt(10.0 / 1e4) * std::sqrt(std::log(10.0)), 1e-15);
  EXPECT_NEAR(a.means()[0], 0.04800, 5e-5);
  const BanditInstance b = make_lower_bound_instance(2, 4, 1.0);
  EXPECT_NEAR(b.means()[0], std::sqrt(0.5) * std::log(2.0), 1e-15);
  EXPECT_NEAR(b.means()[0], 0.4901, 1e-4);
  for (std::size_t i = 1; i < a.arms(); ++i) EXPECT_EQ(a.means()[i], 0.0);
  EXPECT_EQ(a.reward_model(), RewardModel::PointMass);
  EXPECT_THROW(make_lower_bound_instance(1, 100, 1.0), ConfigError);
  EXPECT_THROW(make_lower_bound_instance(10, 5, 1.0), ConfigError);
  EXPECT_THROW(make_lower_bound_instance(64, 100, 1.0), ConfigError);
}

TEST(PolicyConfig, Labels)
{
  EXPECT_EQ(PolicyConfig::ucb1(0.5).label(), "UCB1");
  EXPECT_EQ(PolicyConfig::ucb1(0.5).parameter(), 0.5);
  EXPECT_EQ(PolicyConfig::ftpl_unbounded(PerturbationSpec::gaussian(2.0)).parameter(), 2.0);
  EXPECT_EQ(PolicyConfig::ftpl_bounded(PerturbationSpec::uniform(), 0.1).label(), "RCB-Uniform");
  EXPECT_THROW(PolicyConfig::ucb1(0.0), ConfigError);
}
