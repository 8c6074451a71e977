#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pbandit/harness/checks.hpp"
#include "pbandit/harness/config.hpp"
#include "pbandit/harness/experiment.hpp"
#include "pbandit/harness/parallel.hpp"
#include "pbandit/harness/result.hpp"

using namespace pbandit;
using namespace pbandit::harness;
using nlohmann::json;

namespace {

ExperimentConfig small_stochastic()
{
  return config_from_json(json::parse(R"({
    "mode": "stochastic", "arms": 5, "horizon": 1000, "episodes": 12,
    "reward_model": "gaussian_mixture", "checkpoints": [10, 100, 1000], "seed": 99,
    "policies": [
      {"policy": "ucb1", "grid": [0.5, 1]},
      {"policy": "thompson"},
      {"policy": "ftpl", "perturbation": "gaussian", "grid": [1]},
      {"policy": "rcb", "perturbation": "rademacher", "grid": [0.25]}
    ]})"));
}

ExperimentConfig small_adversarial()
{
  return config_from_json(json::parse(R"({
    "mode": "adversarial", "arms": 4, "horizon": 400, "episodes": 6,
    "adversary": {"kind": "iid_uniform"}, "checkpoints": [40, 400], "seed": 5,
    "potentials": [
      {"potential": "shannon", "grid": [5, 20]},
      {"potential": "tsallis", "alpha": 0.5, "grid": "tuned"},
      {"potential": "ftpl", "perturbation": {"name": "gumbel"}, "mc_samples": 10, "grid": "tuned"}
    ]})"));
}

std::string csv_of(const AggregateResult& r)
{
  std::ostringstream os;
  emit_csv(r, os);
  return os.str();
}

// Minimal XML well-formedness check: balanced tags and quoted attributes.
bool well_formed_xml(const std::string& doc)
{
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = doc.find('<', pos)) != std::string::npos) {
    const std::size_t end = doc.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = doc.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?') continue;
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty();
}

} // namespace

TEST(Parallel, CoversEveryIndexAndRethrows)
{
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Config, ParsesAndValidates)
{
  const auto c = small_stochastic();
  EXPECT_EQ(c.arms, 5u);
  EXPECT_EQ(c.reward_model, RewardModel::GaussianMixtureShift);
  EXPECT_EQ(c.policies.size(), 4u);
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "stochastic", "policies": []})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "stochastic", "episodes": 0,
      "policies": [{"policy": "ucb1", "grid": [1]}]})")),
               ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "stochastic",
      "policies": [{"policy": "ucb1", "grid": []}]})")),
               ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "stochastic", "horizon": 50,
      "policies": [{"policy": "ucb1", "grid": [1]}]})")),
               ConfigError); // default checkpoints exceed the horizon
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "warp"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "evt", "bogus": 1})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"mode": "stochastic",
      "policies": [{"policy": "ftpl", "perturbation": "uniform", "grid": [1]}]})")),
               ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Experiment, SingleEpisodeFixedPolicyMatchesTrace)
{
  auto c = config_from_json(json::parse(R"({
    "mode": "stochastic", "arms": 3, "horizon": 200, "episodes": 1, "checkpoints": [1, 50, 200],
    "means": [0.9, 0.2, 0.5], "seed": 4, "policies": [{"policy": "ucb1", "grid": [1]}]})"));
  const auto r = run_stochastic(c);
  const BanditInstance inst = episode_instance(c, episode_seed(c.seed, 0));
  const RegretTrace tr = run_episode(inst, PolicyConfig::ucb1(1.0), episode_seed(c.seed, 0));
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.mean_avg_regret, tr.at(row.t) / static_cast<double>(row.t));
    EXPECT_EQ(row.stderr_, 0.0);
    EXPECT_EQ(row.episodes, 1);
  }
}

TEST(Experiment, DeterministicAcrossRunsAndThreads)
{
  const auto c = small_stochastic();
  const std::string one = csv_of(run_stochastic(c, 1));
  EXPECT_EQ(one, csv_of(run_stochastic(c, 1)));
  EXPECT_EQ(one, csv_of(run_stochastic(c, 4)));
  const auto a = small_adversarial();
  const std::string adv = csv_of(run_adversarial(a, 1));
  EXPECT_EQ(adv, csv_of(run_adversarial(a, 3)));
}

TEST(Experiment, CouplingAcrossPolicies)
{
  // Thompson and FTPL-Gaussian(1) are the same algorithm; coupled episodes make their rows identical.
  const auto r = run_stochastic(small_stochastic());
  const auto th = r.series_rows("Thompson", 1.0);
  const auto ft = r.series_rows("FTPL-Gaussian", 1.0);
  ASSERT_EQ(th.size(), ft.size());
  for (std::size_t i = 0; i < th.size(); ++i) EXPECT_EQ(th[i].mean_avg_regret, ft[i].mean_avg_regret);
}

TEST(Experiment, CheckpointsSortedAndCumulativeMonotone)
{
  const auto c = small_stochastic();
  const auto r = run_stochastic(c);
  for (const auto& [policy, param] : r.series()) {
    const auto rows = r.series_rows(policy, param);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      EXPECT_LT(rows[i - 1].t, rows[i].t);
      EXPECT_GE(rows[i].mean_avg_regret * rows[i].t, rows[i - 1].mean_avg_regret * rows[i - 1].t - 1e-9);
    }
  }
}

TEST(Experiment, AdversarialTunedEta)
{
  const auto a = small_adversarial();
  const auto pots = expand_potentials(a);
  ASSERT_EQ(pots.size(), 4u);
  EXPECT_EQ(pots[0].eta, 5.0);
  EXPECT_NEAR(pots[2].eta, tune_eta_tsallis(4, 400, 0.5), 1e-12);
  EXPECT_NEAR(pots[3].eta, tune_eta(4, 400, 1.0, std::log(4.0) + euler_gamma), 1e-12);
  auto bad = a;
  bad.adversary.kind = "csv";
  bad.adversary.path = "/nonexistent/rewards.csv";
  EXPECT_THROW(run_adversarial(bad), std::runtime_error);
}

TEST(GridSearch, ArgminTiesAndFlags)
{
  AggregateResult r;
  r.rows = {{"A", 2.0, 10, 0.5, 0.01, 5, 1}, {"A", 1.0, 10, 0.5, 0.01, 5, 1}, {"A", 3.0, 10, 0.9, 0.01, 5, 1},
            {"B", 0.5, 10, 0.3, 0.0, 5, 1}};
  const auto best = grid_search(r);
  ASSERT_EQ(best.size(), 2u);
  EXPECT_EQ(best[0].policy, "A");
  EXPECT_EQ(best[0].param, 1.0);
  EXPECT_TRUE(best[0].tie_within_stderr);
  EXPECT_EQ(best[0].grid_size, 3u);
  EXPECT_EQ(best[1].param, 0.5);
  EXPECT_FALSE(best[1].tie_within_stderr);
}

TEST(GridSearch, ExhaustiveOnSigmaGrid)
{
  auto c = config_from_json(json::parse(R"({
    "mode": "stochastic", "arms": 5, "horizon": 500, "episodes": 8, "checkpoints": [500], "seed": 2,
    "policies": [{"policy": "ftpl", "perturbation": "gaussian", "grid": [0.25, 0.5, 1, 2]}]})"));
  const auto r = run_stochastic(c);
  const auto best = grid_search(r);
  ASSERT_EQ(best.size(), 1u);
  double lowest = 1e300;
  for (const auto& row : r.rows) lowest = std::min(lowest, row.mean_avg_regret);
  EXPECT_EQ(best[0].final_avg_regret, lowest);
  EXPECT_EQ(r.rows.size(), 4u);
}

TEST(Output, CsvHeaderRowsAndRoundTrip)
{
  AggregateResult one;
  one.rows = {{"UCB1", 0.5, 100, 0.123456789012345, 0.001, 200, 42}};
  const std::string s = csv_of(one);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  EXPECT_EQ(s.substr(0, s.find('\n')), "policy,param,t,mean_avg_regret,stderr,episodes,seed");
  const auto r = run_stochastic(small_stochastic());
  std::istringstream in(csv_of(r));
  EXPECT_EQ(parse_csv(in), r);
  EXPECT_THROW(emit_csv(r, std::string("/nonexistent/dir/out.csv")), std::runtime_error);
}

TEST(Output, SvgStructure)
{
  const auto r = run_stochastic(small_stochastic());
  std::ostringstream os;
  emit_svg_lineplot(r, os, "a <b> & \"c\"");
  const std::string svg = os.str();
  EXPECT_TRUE(well_formed_xml(svg));
  EXPECT_NE(svg.find("xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_NE(svg.find(">t</text>"), std::string::npos);
  EXPECT_NE(svg.find(">R(t)/t</text>"), std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t p = 0; (p = svg.find("<polyline", p)) != std::string::npos; ++p) ++polylines;
  EXPECT_EQ(polylines, r.series().size());
  // Every polyline has one point per checkpoint.
  const std::regex points("points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), points); it != std::sregex_iterator(); ++it) {
    const std::string pts = (*it)[1];
    EXPECT_EQ(std::count(pts.begin(), pts.end(), ',') , 3);
  }
  EXPECT_THROW(emit_svg_lineplot(AggregateResult{}, os), std::invalid_argument);
}

TEST(Checks, TheoryBatteryIsDeterministic)
{
  const auto a = theory_checks(3);
  const auto b = theory_checks(3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].value, b[i].value);
  }
  for (const auto& l : hazard_checks()) EXPECT_TRUE(l.pass) << l.name;
}
