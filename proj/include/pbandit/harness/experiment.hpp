#ifndef PBANDIT_HARNESS_EXPERIMENT_HPP
#define PBANDIT_HARNESS_EXPERIMENT_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "pbandit/adversarial.hpp"
#include "pbandit/evt.hpp"
#include "pbandit/format.hpp"
#include "pbandit/harness/config.hpp"
#include "pbandit/harness/parallel.hpp"
#include "pbandit/harness/result.hpp"
#include "pbandit/random.hpp"
#include "pbandit/stochastic.hpp"

namespace pbandit::harness {

// Substream tags below the episode seed.
inline constexpr std::uint64_t episode_tag = 0x45;
inline constexpr std::uint64_t means_tag = 3;

inline std::uint64_t episode_seed(std::uint64_t master, std::int64_t episode)
{
  return derive_seed(master, {episode_tag, static_cast<std::uint64_t>(episode)});
}

/// Instance of one episode: fixed means if configured, else K draws from U[0, 1].
inline BanditInstance episode_instance(const ExperimentConfig& config, std::uint64_t seed)
{
  if (config.means) {
    return BanditInstance(*config.means, config.reward_model, config.horizon);
  }
  SeededStream rng(seed, {means_tag});
  std::vector<double> means(config.arms);
  for (double& m : means) {
    m = rng.uniform();
  }
  return BanditInstance(std::move(means), config.reward_model, config.horizon);
}

namespace detail {

// values[series][checkpoint][episode] → rows, reduced in episode order.
inline AggregateResult reduce(const std::vector<std::string>& labels, const std::vector<double>& params,
                              const std::vector<std::int64_t>& checkpoints,
                              const std::vector<std::vector<std::vector<double>>>& values, std::int64_t episodes,
                              std::uint64_t seed)
{
  AggregateResult out;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      const auto [mean, se] = mean_and_stderr(values[s][c]);
      out.rows.push_back({labels[s], params[s], checkpoints[c], mean, se, episodes, seed});
    }
  }
  return out;
}

inline std::vector<std::vector<std::vector<double>>> make_slots(std::size_t series, std::size_t checkpoints,
                                                                 std::int64_t episodes)
{
  return std::vector<std::vector<std::vector<double>>>(
      series, std::vector<std::vector<double>>(checkpoints, std::vector<double>(static_cast<std::size_t>(episodes))));
}

} // namespace detail

/**
 * Stochastic experiment. Every policy in an episode shares the episode seed,
 * hence the same means and the same per-arm reward streams.
 */
inline AggregateResult run_stochastic(const ExperimentConfig& config, unsigned threads = 1)
{
  config.validate();
  std::vector<PolicyConfig> policies;
  for (const auto& g : config.policies) {
    for (auto& p : g.expand()) {
      policies.push_back(std::move(p));
    }
  }
  std::vector<std::string> labels;
  std::vector<double> params;
  for (const auto& p : policies) {
    labels.push_back(p.label());
    params.push_back(p.parameter());
  }
  auto values = detail::make_slots(policies.size(), config.checkpoints.size(), config.episodes);
  parallel_for(static_cast<std::size_t>(config.episodes), threads, [&](std::size_t e) {
    const std::uint64_t seed = episode_seed(config.seed, static_cast<std::int64_t>(e));
    const BanditInstance instance = episode_instance(config, seed);
    for (std::size_t s = 0; s < policies.size(); ++s) {
      const RegretTrace trace = run_episode(instance, policies[s], seed);
      for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
        const std::int64_t t = config.checkpoints[c];
        values[s][c][e] = trace.at(t) / static_cast<double>(t);
      }
    }
  });
  return detail::reduce(labels, params, config.checkpoints, values, config.episodes, config.seed);
}

/// E[M_K] used for tuning: exact for Gumbel, the block-maximum asymptotic otherwise.
inline double tuning_block_max(const PerturbationSpec& spec, std::size_t arms)
{
  if (spec.kind() == PerturbationKind::Gumbel) {
    return spec.location() + spec.parameter() * (std::log(static_cast<double>(arms)) + euler_gamma);
  }
  return asymptotic_block_max(spec, static_cast<std::int64_t>(arms));
}

/// Default η for a potential when its grid is left empty.
inline double tuned_eta(const PotentialGrid& g, std::size_t arms, std::int64_t horizon)
{
  if (g.potential == "tsallis") {
    return tune_eta_tsallis(arms, horizon, g.alpha);
  }
  const PerturbationSpec spec = g.potential == "shannon" ? PerturbationSpec::gumbel() : *g.perturbation;
  return tune_eta(arms, horizon, sup_hazard(spec).value, tuning_block_max(spec, arms));
}

inline std::vector<PotentialSpec> expand_potentials(const ExperimentConfig& config)
{
  std::vector<PotentialSpec> out;
  for (const auto& g : config.potentials) {
    std::vector<double> etas = g.grid;
    if (etas.empty()) {
      etas.push_back(tuned_eta(g, config.arms, config.horizon));
    }
    for (double eta : etas) {
      if (g.potential == "shannon") {
        out.push_back(PotentialSpec::shannon(eta));
      } else if (g.potential == "tsallis") {
        out.push_back(PotentialSpec::tsallis(eta, g.alpha));
      } else {
        out.push_back(PotentialSpec::ftpl(eta, *g.perturbation, g.mc_samples));
      }
    }
  }
  return out;
}

inline RewardMatrix episode_rewards(const ExperimentConfig& config, std::uint64_t seed)
{
  const auto rounds = static_cast<std::size_t>(config.horizon);
  const auto& a = config.adversary;
  if (a.kind == "constant") return RewardMatrix::constant(rounds, config.arms, a.value);
  if (a.kind == "single_best_arm") return RewardMatrix::single_best_arm(rounds, config.arms, a.best);
  if (a.kind == "iid_uniform") return RewardMatrix::iid_uniform(rounds, config.arms, derive_seed(seed, {means_tag}));
  RewardMatrix m = RewardMatrix::from_csv_file(a.path);
  if (m.rounds() != rounds || m.arms() != config.arms) {
    throw ConfigError("reward matrix '" + a.path + "' is " + std::to_string(m.rounds()) + "x" +
                      std::to_string(m.arms()) + ", config expects " + std::to_string(rounds) + "x" +
                      std::to_string(config.arms));
  }
  return m;
}

/// Adversarial experiment; rows carry η as the parameter. Potentials are paired per episode.
inline AggregateResult run_adversarial(const ExperimentConfig& config, unsigned threads = 1)
{
  config.validate();
  const std::vector<PotentialSpec> potentials = expand_potentials(config);
  std::vector<std::string> labels;
  std::vector<double> params;
  for (const auto& p : potentials) {
    labels.push_back(p.label());
    params.push_back(p.eta);
  }
  // Fixed adversaries are built once; a bad CSV path fails before any work starts.
  std::optional<RewardMatrix> fixed;
  if (config.adversary.kind != "iid_uniform") {
    fixed = episode_rewards(config, 0);
  }
  auto values = detail::make_slots(potentials.size(), config.checkpoints.size(), config.episodes);
  parallel_for(static_cast<std::size_t>(config.episodes), threads, [&](std::size_t e) {
    const std::uint64_t seed = episode_seed(config.seed, static_cast<std::int64_t>(e));
    const RewardMatrix rewards = fixed ? *fixed : episode_rewards(config, seed);
    for (std::size_t s = 0; s < potentials.size(); ++s) {
      const GbpaResult r = run_gbpa(rewards, potentials[s], seed);
      for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
        const std::int64_t t = config.checkpoints[c];
        values[s][c][e] = r.regret_trace[static_cast<std::size_t>(t - 1)] / static_cast<double>(t);
      }
    }
  });
  return detail::reduce(labels, params, config.checkpoints, values, config.episodes, config.seed);
}

inline AggregateResult run_experiment(const ExperimentConfig& config, unsigned threads = 1)
{
  switch (config.mode) {
  case Mode::Stochastic: return run_stochastic(config, threads);
  case Mode::Adversarial: return run_adversarial(config, threads);
  default: throw ConfigError("run_experiment handles stochastic and adversarial modes only");
  }
}

struct GridChoice {
  std::string policy;
  double param;
  double final_avg_regret;
  double stderr_;
  std::size_t grid_size;
  bool tie_within_stderr; // another grid point is within the combined standard errors
};

/// Per policy family: argmin of final R(T)/T, ties broken toward the smaller parameter.
inline std::vector<GridChoice> grid_search(const AggregateResult& result)
{
  std::vector<std::string> families;
  std::map<std::string, std::vector<AggregateRow>> finals;
  for (const auto& [policy, param] : result.series()) {
    if (finals.find(policy) == finals.end()) {
      families.push_back(policy);
    }
    finals[policy].push_back(result.final_row(policy, param));
  }
  std::vector<GridChoice> out;
  for (const auto& name : families) {
    const auto& rows = finals[name];
    const AggregateRow* best = &rows.front();
    for (const auto& r : rows) {
      if (r.mean_avg_regret < best->mean_avg_regret ||
          (r.mean_avg_regret == best->mean_avg_regret && r.param < best->param)) {
        best = &r;
      }
    }
    bool tie = false;
    for (const auto& r : rows) {
      if (&r != best && std::abs(r.mean_avg_regret - best->mean_avg_regret) <= r.stderr_ + best->stderr_) {
        tie = true;
      }
    }
    out.push_back({name, best->param, best->mean_avg_regret, best->stderr_, rows.size(), tie});
  }
  return out;
}

inline void write_grid_csv(std::ostream& os, const std::vector<GridChoice>& choices)
{
  os << "policy,best_param,final_avg_regret,stderr,grid_size,tie_within_stderr\n";
  for (const auto& c : choices) {
    os << c.policy << ',' << format_double(c.param) << ',' << format_double(c.final_avg_regret) << ','
       << format_double(c.stderr_) << ',' << c.grid_size << ',' << (c.tie_within_stderr ? "true" : "false") << '\n';
  }
}

} // namespace pbandit::harness

#endif // PBANDIT_HARNESS_EXPERIMENT_HPP
