#ifndef PBANDIT_STOCHASTIC_HPP
#define PBANDIT_STOCHASTIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pbandit/errors.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/random.hpp"
#include "pbandit/reward_model.hpp"

namespace pbandit {

/// Stochastic K-armed environment with a fixed horizon.
class BanditInstance {
public:
  BanditInstance(std::vector<double> means, RewardModel model, std::int64_t horizon)
      : means_(std::move(means)), model_(model), horizon_(horizon)
  {
    if (means_.empty()) {
      throw ConfigError("BanditInstance: at least one arm required");
    }
    if (horizon_ < 1) {
      throw ConfigError("BanditInstance: horizon must be positive");
    }
    for (double m : means_) {
      if (!std::isfinite(m)) {
        throw ConfigError("BanditInstance: arm means must be finite");
      }
    }
    const double best = *std::max_element(means_.begin(), means_.end());
    gaps_.reserve(means_.size());
    for (double m : means_) {
      gaps_.push_back(best - m);
    }
  }

  std::size_t arms() const noexcept { return means_.size(); }
  std::int64_t horizon() const noexcept { return horizon_; }
  RewardModel reward_model() const noexcept { return model_; }
  const std::vector<double>& means() const noexcept { return means_; }
  /// Δ_i = max_j μ_j - μ_i.
  const std::vector<double>& gaps() const noexcept { return gaps_; }

private:
  std::vector<double> means_;
  std::vector<double> gaps_;
  RewardModel model_;
  std::int64_t horizon_;
};

/// Pull counts and running means after t rounds. Unpulled arms hold μ̂ = 0.
struct LearnerState {
  explicit LearnerState(std::size_t arms) : counts(arms, 0), means_hat(arms, 0.0) {}

  std::size_t arms() const noexcept { return counts.size(); }

  std::int64_t t = 0;
  std::vector<std::int64_t> counts;
  std::vector<double> means_hat;
};

/// Incorporate one observed reward: μ̂ ← (μ̂·T + X) / (T + 1), T ← T + 1.
inline void update(LearnerState& state, std::size_t arm, double reward)
{
  const auto n = static_cast<double>(state.counts[arm]);
  state.means_hat[arm] = (state.means_hat[arm] * n + reward) / (n + 1.0);
  ++state.counts[arm];
  ++state.t;
}

inline LearnerState updated(LearnerState state, std::size_t arm, double reward)
{
  update(state, arm, reward);
  return state;
}

/// Per-round cumulative pseudo-regret of one episode.
struct RegretTrace {
  std::int64_t horizon = 0;
  std::vector<double> cumulative; // cumulative[t-1] = Σ_{s≤t} Δ_{A_s}
  std::vector<std::int64_t> final_counts;

  double final_regret() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  /// Cumulative regret after round t (1-based).
  double at(std::int64_t t) const { return cumulative.at(static_cast<std::size_t>(t - 1)); }
};

enum class PolicyKind { UCB1, ThompsonGaussian, FTPLUnbounded, FTPLBounded, FixedArm };

/**
 * A stochastic policy and its tunable parameter.
 *
 * UCB1 carries a confidence multiplier c on the √(2 log T / T_i) bonus
 * (c = 1 is textbook UCB1); it is the knob tuned by grid search.
 * FTPLBounded carries the widening ε of the √((2+ε) log T / T_i) scale.
 */
class PolicyConfig {
public:
  static PolicyConfig ucb1(double confidence = 1.0)
  {
    if (!(confidence > 0.0)) {
      throw ConfigError("UCB1 confidence multiplier must be positive");
    }
    PolicyConfig p(PolicyKind::UCB1);
    p.confidence_ = confidence;
    return p;
  }

  static PolicyConfig thompson_gaussian() { return PolicyConfig(PolicyKind::ThompsonGaussian); }

  static PolicyConfig ftpl_unbounded(const PerturbationSpec& spec)
  {
    if (spec.bounded_support()) {
      throw ConfigError("FTPL via unbounded perturbation given bounded-support " + spec.name());
    }
    (void)tail_metadata(spec); // throws UnsupportedError outside the sub-Weibull catalogue
    PolicyConfig p(PolicyKind::FTPLUnbounded);
    p.spec_ = spec;
    return p;
  }

  static PolicyConfig ftpl_bounded(const PerturbationSpec& spec, double epsilon = 0.25)
  {
    if (!spec.bounded_support()) {
      throw ConfigError("FTPL via bounded perturbation given unbounded " + spec.name());
    }
    if (!(epsilon > 0.0)) {
      throw ConfigError("FTPL bounded widening epsilon must be positive");
    }
    PolicyConfig p(PolicyKind::FTPLBounded);
    p.spec_ = spec;
    p.epsilon_ = epsilon;
    return p;
  }

  /// Degenerate policy that always plays `arm`; for testing the regret bookkeeping.
  static PolicyConfig fixed_arm(std::size_t arm)
  {
    PolicyConfig p(PolicyKind::FixedArm);
    p.fixed_arm_ = arm;
    return p;
  }

  PolicyKind kind() const noexcept { return kind_; }
  const PerturbationSpec& spec() const { return spec_.value(); }
  double epsilon() const noexcept { return epsilon_; }
  double confidence() const noexcept { return confidence_; }
  std::size_t arm() const noexcept { return fixed_arm_; }

  /// Family label used in reports.
  std::string label() const
  {
    switch (kind_) {
    case PolicyKind::UCB1: return "UCB1";
    case PolicyKind::ThompsonGaussian: return "Thompson";
    case PolicyKind::FTPLUnbounded: return "FTPL-" + spec_->name();
    case PolicyKind::FTPLBounded: return "RCB-" + spec_->name();
    case PolicyKind::FixedArm: return "Fixed";
    }
    return "?";
  }

  /// The tuned scalar: c, σ, ε or the fixed arm index.
  double parameter() const
  {
    switch (kind_) {
    case PolicyKind::UCB1: return confidence_;
    case PolicyKind::ThompsonGaussian: return 1.0;
    case PolicyKind::FTPLUnbounded: return spec_->parameter();
    case PolicyKind::FTPLBounded: return epsilon_;
    case PolicyKind::FixedArm: return static_cast<double>(fixed_arm_);
    }
    return 0.0;
  }

private:
  explicit PolicyConfig(PolicyKind k) : kind_(k) {}

  PolicyKind kind_;
  std::optional<PerturbationSpec> spec_;
  double epsilon_ = 0.25;
  double confidence_ = 1.0;
  std::size_t fixed_arm_ = 0;
};

namespace detail {

// Argmax with uniformly random tie-breaking. Randomness is consumed only when
// a tie actually occurs, so tie-free runs use no extra draws.
template <class Values>
std::size_t argmax_random_ties(const Values& values, SeededStream& rng)
{
  std::size_t best = 0;
  std::uint64_t ties = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
      ties = 1;
    } else if (values[i] == values[best]) {
      ++ties;
      if (rng.below(ties) == 0) {
        best = i;
      }
    }
  }
  return best;
}

inline double inv_sqrt_pulls(std::int64_t n) { return 1.0 / std::sqrt(static_cast<double>(std::max<std::int64_t>(n, 1))); }

// argmax_i μ̂_i + scale_i · Z_i with Z_i drawn in arm order.
template <class Scale>
std::size_t perturbed_leader(const LearnerState& state, const PerturbationSpec& spec, Scale scale, SeededStream& rng,
                             std::vector<double>& scratch)
{
  scratch.resize(state.arms());
  for (std::size_t i = 0; i < state.arms(); ++i) {
    scratch[i] = state.means_hat[i] + scale(state.counts[i]) * sample(spec, rng);
  }
  return argmax_random_ties(scratch, rng);
}

} // namespace detail

/// UCB1 with the full-horizon log T. Unpulled arms come first, lowest index first.
inline std::size_t select_ucb1(const LearnerState& state, std::int64_t horizon, double confidence = 1.0)
{
  const double log_t = std::log(static_cast<double>(horizon));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.arms(); ++i) {
    if (state.counts[i] == 0) {
      return i;
    }
    const double index =
        state.means_hat[i] + confidence * std::sqrt(2.0 * log_t / static_cast<double>(state.counts[i]));
    if (index > best_index) {
      best_index = index;
      best = i;
    }
  }
  return best;
}

/// Gaussian Thompson sampling: θ_i ~ N(μ̂_i, 1 / (1 ∨ T_i)).
inline std::size_t select_thompson_gaussian(const LearnerState& state, SeededStream& rng)
{
  std::vector<double> theta(state.arms());
  for (std::size_t i = 0; i < state.arms(); ++i) {
    const double variance = 1.0 / static_cast<double>(std::max<std::int64_t>(state.counts[i], 1));
    theta[i] = state.means_hat[i] + std::sqrt(variance) * rng.normal();
  }
  return detail::argmax_random_ties(theta, rng);
}

/// FTPL with an unbounded perturbation: θ_i = μ̂_i + Z_i / √(1 ∨ T_i).
inline std::size_t select_ftpl_unbounded(const LearnerState& state, const PerturbationSpec& spec, SeededStream& rng)
{
  if (spec.bounded_support()) {
    throw ConfigError("select_ftpl_unbounded: " + spec.name() + " has bounded support");
  }
  std::vector<double> scratch;
  return detail::perturbed_leader(state, spec, detail::inv_sqrt_pulls, rng, scratch);
}

/// Confidence width √((2+ε) log T / (1 ∨ n)) used by the bounded-perturbation policy.
inline double bounded_width(std::int64_t pulls, std::int64_t horizon, double epsilon)
{
  return std::sqrt((2.0 + epsilon) * std::log(static_cast<double>(horizon)) /
                   static_cast<double>(std::max<std::int64_t>(pulls, 1)));
}

/// FTPL with a bounded perturbation (RCB for Uniform / Rademacher):
/// θ_i = μ̂_i + √((2+ε) log T / (1 ∨ T_i)) · Z_i.
inline std::size_t select_ftpl_bounded(const LearnerState& state, const PerturbationSpec& spec, std::int64_t horizon,
                                       double epsilon, SeededStream& rng)
{
  if (!spec.bounded_support()) {
    throw ConfigError("select_ftpl_bounded: " + spec.name() + " has unbounded support");
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("select_ftpl_bounded: epsilon must be positive");
  }
  std::vector<double> scratch;
  return detail::perturbed_leader(
      state, spec, [&](std::int64_t n) { return bounded_width(n, horizon, epsilon); }, rng, scratch);
}

/// Perturbed-index range [μ̂ + w·lo, μ̂ + w·hi] of one arm under a bounded perturbation on [-1, 1].
struct IndexRange {
  double lo;
  double hi;
};

/// Decide by interval arithmetic whether `arm` can never be the perturbed leader
/// when arm i is perturbed by width[i] · Z with Z supported on [-1, 1].
/// A boundary touch counts as impossible only for a continuous perturbation.
inline bool selection_impossible(const LearnerState& state, std::size_t arm, const std::vector<double>& widths,
                                 const PerturbationSpec& spec)
{
  if (!spec.bounded_support()) {
    return false;
  }
  const double hi = state.means_hat[arm] + widths[arm];
  double others_lo = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < state.arms(); ++j) {
    if (j != arm) {
      others_lo = std::max(others_lo, state.means_hat[j] - widths[j]);
    }
  }
  const bool atomic = spec.kind() == PerturbationKind::Rademacher;
  return atomic ? hi < others_lo : hi <= others_lo;
}

/// Stateful wrapper binding a PolicyConfig to the selection functions.
class Policy {
public:
  Policy(PolicyConfig config, std::int64_t horizon) : config_(std::move(config)), horizon_(horizon) {}

  std::size_t select(const LearnerState& state, SeededStream& rng)
  {
    switch (config_.kind()) {
    case PolicyKind::UCB1: return select_ucb1(state, horizon_, config_.confidence());
    case PolicyKind::ThompsonGaussian: return select_thompson_gaussian(state, rng);
    case PolicyKind::FTPLUnbounded:
      return detail::perturbed_leader(state, config_.spec(), detail::inv_sqrt_pulls, rng, scratch_);
    case PolicyKind::FTPLBounded: {
      const double eps = config_.epsilon();
      const std::int64_t horizon = horizon_;
      return detail::perturbed_leader(
          state, config_.spec(), [=](std::int64_t n) { return bounded_width(n, horizon, eps); }, rng, scratch_);
    }
    case PolicyKind::FixedArm: return config_.arm();
    }
    return 0;
  }

private:
  PolicyConfig config_;
  std::int64_t horizon_;
  std::vector<double> scratch_;
};

// Substream tags.
inline constexpr std::uint64_t policy_stream_tag = 1;
inline constexpr std::uint64_t reward_stream_tag = 2;

/**
 * Simulate one episode and record cumulative pseudo-regret.
 *
 * Arm i draws its rewards from its own substream (seed, reward tag, i), so the
 * n-th pull of an arm yields the same reward under every policy run with the
 * same seed. The trace value at t is Σ_i Δ_i · T_i(t), evaluated in a fixed
 * order so the final value equals the regret decomposition bit for bit.
 */
inline RegretTrace run_episode(const BanditInstance& instance, const PolicyConfig& config, std::uint64_t seed)
{
  const std::size_t k = instance.arms();
  if (config.kind() == PolicyKind::FixedArm && config.arm() >= k) {
    throw ConfigError("run_episode: fixed arm index out of range");
  }
  SeededStream policy_rng(seed, {policy_stream_tag});
  std::vector<SeededStream> reward_rng;
  reward_rng.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    reward_rng.emplace_back(seed, std::initializer_list<std::uint64_t>{reward_stream_tag, i});
  }

  Policy policy(config, instance.horizon());
  LearnerState state(k);
  const auto& gaps = instance.gaps();
  RegretTrace trace;
  trace.horizon = instance.horizon();
  trace.cumulative.reserve(static_cast<std::size_t>(instance.horizon()));
  for (std::int64_t t = 1; t <= instance.horizon(); ++t) {
    const std::size_t arm = policy.select(state, policy_rng);
    const double reward = sample_reward(instance.reward_model(), instance.means()[arm], reward_rng[arm]);
    update(state, arm, reward);
    double regret = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      regret += gaps[i] * static_cast<double>(state.counts[i]);
    }
    trace.cumulative.push_back(regret);
  }
  trace.final_counts = state.counts;
  return trace;
}

/// Two-point instance used by the regret lower bound: μ_1 = √(K/T)(log K)^{1/q},
/// all other means 0, deterministic rewards.
inline BanditInstance make_lower_bound_instance(std::size_t arms, std::int64_t horizon, double q)
{
  if (arms < 2) {
    throw ConfigError("make_lower_bound_instance: K must be at least 2");
  }
  if (horizon < static_cast<std::int64_t>(arms)) {
    throw ConfigError("make_lower_bound_instance: T must be at least K");
  }
  if (!(q > 0.0)) {
    throw ConfigError("make_lower_bound_instance: q must be positive");
  }
  const double k = static_cast<double>(arms);
  const double gap = std::sqrt(k / static_cast<double>(horizon)) * std::pow(std::log(k), 1.0 / q);
  if (gap >= 1.0) {
    throw ConfigError("make_lower_bound_instance: gap >= 1, horizon too small for K");
  }
  std::vector<double> means(arms, 0.0);
  means[0] = gap;
  return BanditInstance(std::move(means), RewardModel::PointMass, horizon);
}

} // namespace pbandit

#endif // PBANDIT_STOCHASTIC_HPP
