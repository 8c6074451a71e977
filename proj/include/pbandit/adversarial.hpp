#ifndef PBANDIT_ADVERSARIAL_HPP
#define PBANDIT_ADVERSARIAL_HPP

#include <algorithm>
#include <limits>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbandit/errors.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/random.hpp"

namespace pbandit {

/// Oblivious adversary: a T×K matrix of rewards in [0, 1], fixed before play.
class RewardMatrix {
public:
  RewardMatrix(std::size_t rounds, std::size_t arms, std::vector<double> values)
      : rounds_(rounds), arms_(arms), values_(std::move(values))
  {
    if (rounds_ == 0 || arms_ == 0) {
      throw ConfigError("RewardMatrix: dimensions must be positive");
    }
    if (values_.size() != rounds_ * arms_) {
      throw ConfigError("RewardMatrix: value count does not match T*K");
    }
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("RewardMatrix: rewards must lie in [0, 1]");
      }
    }
  }

  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t arms() const noexcept { return arms_; }
  /// Reward of arm i in round t (both 0-based).
  double operator()(std::size_t t, std::size_t i) const { return values_[t * arms_ + i]; }
  std::span<const double> row(std::size_t t) const { return {values_.data() + t * arms_, arms_}; }

  /// max_i Σ_t g_{t,i}.
  double best_column_sum() const
  {
    std::vector<double> sums(arms_, 0.0);
    for (std::size_t t = 0; t < rounds_; ++t) {
      for (std::size_t i = 0; i < arms_; ++i) {
        sums[i] += (*this)(t, i);
      }
    }
    return *std::max_element(sums.begin(), sums.end());
  }

  static RewardMatrix constant(std::size_t rounds, std::size_t arms, double value)
  {
    return {rounds, arms, std::vector<double>(rounds * arms, value)};
  }

  /// Arm `best` always pays 1, every other arm pays 0.
  static RewardMatrix single_best_arm(std::size_t rounds, std::size_t arms, std::size_t best = 0)
  {
    if (best >= arms) {
      throw ConfigError("single_best_arm: best arm index out of range");
    }
    std::vector<double> v(rounds * arms, 0.0);
    for (std::size_t t = 0; t < rounds; ++t) {
      v[t * arms + best] = 1.0;
    }
    return {rounds, arms, std::move(v)};
  }

  /// I.i.d. U[0, 1] entries from a seeded stream.
  static RewardMatrix iid_uniform(std::size_t rounds, std::size_t arms, std::uint64_t seed)
  {
    SeededStream rng(seed);
    std::vector<double> v(rounds * arms);
    for (double& x : v) {
      x = rng.uniform();
    }
    return {rounds, arms, std::move(v)};
  }

  /// Parse T lines of K comma-separated decimals.
  static RewardMatrix from_csv(std::istream& in)
  {
    std::vector<double> values;
    std::size_t arms = 0;
    std::size_t rounds = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.find_first_not_of(" \t") == std::string::npos) {
        continue;
      }
      std::size_t count = 0;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos) {
          end = line.size();
        }
        std::string_view cell(line.data() + pos, end - pos);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
          throw ConfigError("reward CSV line " + std::to_string(line_no) + ": cannot parse '" + std::string(cell) +
                            "'");
        }
        values.push_back(v);
        ++count;
        pos = end + 1;
      }
      if (arms == 0) {
        arms = count;
      } else if (count != arms) {
        throw ConfigError("reward CSV line " + std::to_string(line_no) + ": expected " + std::to_string(arms) +
                          " columns, found " + std::to_string(count));
      }
      ++rounds;
    }
    if (rounds == 0) {
      throw ConfigError("reward CSV is empty");
    }
    return {rounds, arms, std::move(values)};
  }

  static RewardMatrix from_csv_file(const std::string& path)
  {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open reward matrix '" + path + "'");
    }
    return from_csv(in);
  }

private:
  std::size_t rounds_;
  std::size_t arms_;
  std::vector<double> values_;
};

/// A point of the open simplex: strictly positive entries summing to 1 (within 1e-9).
class ChoiceProbabilities {
public:
  explicit ChoiceProbabilities(std::vector<double> p) : p_(std::move(p))
  {
    if (p_.empty()) {
      throw std::invalid_argument("ChoiceProbabilities: empty vector");
    }
    double sum = 0.0;
    for (double v : p_) {
      if (!(v > 0.0)) {
        throw std::invalid_argument("ChoiceProbabilities: entries must be strictly positive");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("ChoiceProbabilities: entries must sum to 1");
    }
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

  /// Inverse-CDF draw of an arm.
  std::size_t sample(SeededStream& rng) const
  {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
      acc += p_[i];
      if (u < acc) {
        return i;
      }
    }
    return p_.size() - 1;
  }

private:
  std::vector<double> p_;
};

/// Exponential weights: p_i ∝ exp(G_i / η).
inline ChoiceProbabilities choice_prob_shannon(std::span<const double> gains, double eta)
{
  if (!(eta > 0.0)) {
    throw ConfigError("choice_prob_shannon: eta must be positive");
  }
  const double top = *std::max_element(gains.begin(), gains.end());
  std::vector<double> p(gains.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    // Clamp at the smallest normal double so far-behind arms keep positive mass.
    p[i] = std::max(std::exp((gains[i] - top) / eta), std::numeric_limits<double>::min());
    sum += p[i];
  }
  for (double& v : p) {
    v /= sum;
  }
  return ChoiceProbabilities(std::move(p));
}

namespace detail {

// Tsallis normalization in terms of d = λ - max G:
//   Σ_i exp(log c + β log(d + gap_i)) - 1, β = 1/(α-1), c = ((1-α)/α)^β, gap_i = max G - G_i.
// Strictly decreasing in d.
struct TsallisNormalization {
  std::span<const double> gains;
  double top;
  double alpha;
  double beta;
  double log_c;

  TsallisNormalization(std::span<const double> g, double a)
      : gains(g), top(*std::max_element(g.begin(), g.end())), alpha(a), beta(1.0 / (a - 1.0)),
        log_c(beta * std::log((1.0 - a) / a))
  {
  }

  double component(double d, std::size_t i) const { return std::exp(log_c + beta * std::log(d + (top - gains[i]))); }

  double residual(double d) const
  {
    double s = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
      s += component(d, i);
    }
    return s - 1.0;
  }
};

inline double solve_tsallis_offset(const TsallisNormalization& f, std::size_t arms)
{
  // The top arm alone reaches 1 at d = α/(1-α); all K arms tied at the top
  // bring the sum down to 1 at d = K^{1-α} α/(1-α).
  const double base = f.alpha / (1.0 - f.alpha);
  double lo = base;
  double hi = base * std::pow(static_cast<double>(arms), 1.0 - f.alpha);
  if (f.residual(hi) >= 0.0) {
    return hi;
  }
  if (f.residual(lo) <= 0.0) {
    return lo;
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (f.residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double rlo = std::abs(f.residual(lo));
  const double rhi = std::abs(f.residual(hi));
  return rlo <= rhi ? lo : hi;
}

} // namespace detail

/// Normalizing multiplier λ(G) > max G of the Tsallis choice map (η = 1):
/// Σ_i ((1-α)/α)^{1/(α-1)} (λ - G_i)^{1/(α-1)} = 1. Solved by bisection.
inline double solve_tsallis_lambda(std::span<const double> gains, double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("solve_tsallis_lambda: alpha must lie in (0, 1)");
  }
  for (double g : gains) {
    if (!std::isfinite(g)) {
      throw ConfigError("solve_tsallis_lambda: gains must be finite");
    }
  }
  const detail::TsallisNormalization f(gains, alpha);
  const double d = detail::solve_tsallis_offset(f, gains.size());
  if (!(std::abs(f.residual(d)) <= 1e-12)) {
    throw NumericError("solve_tsallis_lambda: bisection failed to reach residual 1e-12");
  }
  return f.top + d;
}

/// FTRL with the Tsallis entropy regularizer at learning rate η (G is scaled by 1/η).
inline ChoiceProbabilities choice_prob_tsallis(std::span<const double> gains, double eta, double alpha)
{
  if (!(eta > 0.0)) {
    throw ConfigError("choice_prob_tsallis: eta must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("choice_prob_tsallis: alpha must lie in (0, 1)");
  }
  std::vector<double> scaled(gains.begin(), gains.end());
  for (double& g : scaled) {
    g /= eta;
  }
  const detail::TsallisNormalization f(scaled, alpha);
  const double d = detail::solve_tsallis_offset(f, scaled.size());
  if (!(std::abs(f.residual(d)) <= 1e-12)) {
    throw NumericError("choice_prob_tsallis: bisection failed to reach residual 1e-12");
  }
  std::vector<double> p(scaled.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = f.component(d, i);
    sum += p[i];
  }
  for (double& v : p) {
    v /= sum;
  }
  return ChoiceProbabilities(std::move(p));
}

/// Default probability floor for Monte-Carlo FTPL gradients.
inline double default_floor(std::size_t arms) { return 1e-4 / static_cast<double>(arms); }

/**
 * Monte-Carlo gradient of the stochastically smoothed max: the argmax
 * frequency of G_i + η Z_i over M i.i.d. perturbation vectors, floored by
 * mixing with the uniform vector, p = (1 - Kρ)·freq + ρ, so every entry is
 * at least ρ and a single-sample vertex maps to (1-(K-1)ρ, ρ, ..., ρ).
 */
inline ChoiceProbabilities choice_prob_ftpl_mc(std::span<const double> gains, double eta,
                                               const PerturbationSpec& spec, std::int64_t samples, double floor,
                                               SeededStream& rng)
{
  const std::size_t k = gains.size();
  if (!(eta > 0.0)) {
    throw ConfigError("choice_prob_ftpl_mc: eta must be positive");
  }
  if (samples < 1) {
    throw ConfigError("choice_prob_ftpl_mc: need at least one sample");
  }
  if (!(floor > 0.0 && floor < 1.0 / static_cast<double>(k))) {
    throw ConfigError("choice_prob_ftpl_mc: floor must lie in (0, 1/K)");
  }
  std::vector<std::int64_t> wins(k, 0);
  for (std::int64_t m = 0; m < samples; ++m) {
    std::size_t best = 0;
    double best_value = gains[0] + eta * sample(spec, rng);
    std::uint64_t ties = 1;
    for (std::size_t i = 1; i < k; ++i) {
      const double v = gains[i] + eta * sample(spec, rng);
      if (v > best_value) {
        best_value = v;
        best = i;
        ties = 1;
      } else if (v == best_value && rng.below(++ties) == 0) {
        best = i;
      }
    }
    ++wins[best];
  }
  const double keep = 1.0 - static_cast<double>(k) * floor;
  std::vector<double> p(k);
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = keep * static_cast<double>(wins[i]) / static_cast<double>(samples) + floor;
  }
  return ChoiceProbabilities(std::move(p));
}

/// Inverse-probability-weighted reward estimate (observed / p_arm) e_arm.
inline std::vector<double> ipw_estimate(double observed, std::size_t arm, const ChoiceProbabilities& p)
{
  if (arm >= p.size()) {
    throw std::out_of_range("ipw_estimate: arm index out of range");
  }
  std::vector<double> g(p.size(), 0.0);
  g[arm] = observed / p[arm];
  return g;
}

enum class PotentialKind { Shannon, Tsallis, FTPL };

/// Smoothed potential whose gradient drives GBPA.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Shannon;
  double eta = 1.0;
  double alpha = 0.5;                         // Tsallis
  std::optional<PerturbationSpec> perturbation; // FTPL
  std::int64_t mc_samples = 1000;             // FTPL
  std::optional<double> floor;                // FTPL; default 1e-4 / K

  static PotentialSpec shannon(double eta)
  {
    check_eta(eta);
    PotentialSpec p;
    p.kind = PotentialKind::Shannon;
    p.eta = eta;
    return p;
  }

  static PotentialSpec tsallis(double eta, double alpha = 0.5)
  {
    check_eta(eta);
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("Tsallis alpha must lie in (0, 1)");
    }
    PotentialSpec p;
    p.kind = PotentialKind::Tsallis;
    p.eta = eta;
    p.alpha = alpha;
    return p;
  }

  static PotentialSpec ftpl(double eta, const PerturbationSpec& spec, std::int64_t samples,
                            std::optional<double> floor = std::nullopt)
  {
    check_eta(eta);
    if (samples < 1) {
      throw ConfigError("FTPL potential needs at least one Monte-Carlo sample");
    }
    if (floor && !(*floor > 0.0)) {
      throw ConfigError("FTPL probability floor must be positive");
    }
    PotentialSpec p;
    p.kind = PotentialKind::FTPL;
    p.eta = eta;
    p.perturbation = spec;
    p.mc_samples = samples;
    p.floor = floor;
    return p;
  }

  std::string label() const
  {
    switch (kind) {
    case PotentialKind::Shannon: return "Shannon";
    case PotentialKind::Tsallis: return "Tsallis";
    case PotentialKind::FTPL: return "FTPL-" + perturbation->name();
    }
    return "?";
  }

private:
  static void check_eta(double eta)
  {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw ConfigError("potential eta must be finite and positive");
    }
  }
};

/// ∇Φ̃(G) for a potential. `rng` is only consumed by the FTPL potential.
inline ChoiceProbabilities choice_probabilities(const PotentialSpec& potential, std::span<const double> gains,
                                               SeededStream& rng)
{
  switch (potential.kind) {
  case PotentialKind::Shannon: return choice_prob_shannon(gains, potential.eta);
  case PotentialKind::Tsallis: return choice_prob_tsallis(gains, potential.eta, potential.alpha);
  case PotentialKind::FTPL:
    return choice_prob_ftpl_mc(gains, potential.eta, *potential.perturbation, potential.mc_samples,
                               potential.floor.value_or(default_floor(gains.size())), rng);
  }
  throw ConfigError("unknown potential");
}

struct GbpaState {
  explicit GbpaState(std::size_t arms) : gains_hat(arms, 0.0) {}

  std::int64_t t = 0;
  std::vector<double> gains_hat; // Ĝ_t
  double realized_reward = 0.0;
  std::vector<std::size_t> chosen;
};

struct GbpaResult {
  double regret; // max_i Σ_t g_{t,i} - Σ_t g_{t,A_t}
  GbpaState state;
  std::vector<double> regret_trace; // regret against the best column of the first t rounds
};

/// Gradient-based prediction algorithm with bandit feedback and IPW estimates.
inline GbpaResult run_gbpa(const RewardMatrix& rewards, const PotentialSpec& potential, std::uint64_t seed)
{
  const std::size_t k = rewards.arms();
  SeededStream choice_rng(seed, {1});
  SeededStream gradient_rng(seed, {2});
  GbpaState state(k);
  state.chosen.reserve(rewards.rounds());
  std::vector<double> column(k, 0.0);
  std::vector<double> trace;
  trace.reserve(rewards.rounds());
  for (std::size_t t = 0; t < rewards.rounds(); ++t) {
    const ChoiceProbabilities p = choice_probabilities(potential, state.gains_hat, gradient_rng);
    const std::size_t arm = p.sample(choice_rng);
    const double g = rewards(t, arm);
    state.gains_hat[arm] += g / p[arm];
    state.realized_reward += g;
    state.chosen.push_back(arm);
    ++state.t;
    const auto row = rewards.row(t);
    for (std::size_t i = 0; i < k; ++i) {
      column[i] += row[i];
    }
    trace.push_back(*std::max_element(column.begin(), column.end()) - state.realized_reward);
  }
  const double regret = trace.back();
  return {regret, std::move(state), std::move(trace)};
}

/// Learning rate minimizing η·E[M_K] + K·sup h·T / η.
inline double tune_eta(std::size_t arms, std::int64_t horizon, double sup_h, double expected_block_max)
{
  if (!(sup_h > 0.0) || !(expected_block_max > 0.0) || arms == 0 || horizon <= 0) {
    throw ConfigError("tune_eta: all inputs must be positive");
  }
  return std::sqrt(static_cast<double>(arms) * sup_h * static_cast<double>(horizon) / expected_block_max);
}

/**
 * Learning rate for the Tsallis(α) potential minimizing its FTRL bound
 * (K^{1-α} - 1)/(1-α)·η + K^α·T/(2αη) with gains scaled by 1/η.
 */
inline double tune_eta_tsallis(std::size_t arms, std::int64_t horizon, double alpha)
{
  if (arms < 2 || horizon <= 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("tune_eta_tsallis: need K >= 2, T > 0 and alpha in (0, 1)");
  }
  const double k = static_cast<double>(arms);
  const double range = (std::pow(k, 1.0 - alpha) - 1.0) / (1.0 - alpha);
  return std::sqrt(std::pow(k, alpha) * static_cast<double>(horizon) / (2.0 * alpha * range));
}

/// Upper bound 2√(K·T·sup h·E[M_K]) on GBPA regret with a bounded-hazard perturbation.
inline double gbpa_regret_bound(std::size_t arms, std::int64_t horizon, double sup_h, double expected_block_max)
{
  return 2.0 * std::sqrt(static_cast<double>(arms) * static_cast<double>(horizon) * sup_h * expected_block_max);
}

} // namespace pbandit

#endif // PBANDIT_ADVERSARIAL_HPP
