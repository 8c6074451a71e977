#ifndef PBANDIT_REWARD_MODEL_HPP
#define PBANDIT_REWARD_MODEL_HPP

#include <string>

#include "pbandit/errors.hpp"
#include "pbandit/random.hpp"

namespace pbandit {

/// Noise added to an arm mean. Every kind has mean zero, so a reward drawn
/// for an arm with mean μ has expectation exactly μ.
enum class RewardModel {
  UniformShift,         // μ + U[-1, 1]
  RademacherShift,      // μ ± 1
  GaussianShift,        // μ + N(0, 1)
  GaussianMixtureShift, // μ + W·N(-1, 1) + (1-W)·N(1, 1), W ~ Bernoulli(1/2)
  PointMass,            // μ
};

inline double sample_reward(RewardModel model, double mean, SeededStream& rng)
{
  switch (model) {
  case RewardModel::UniformShift: return mean + 2.0 * rng.uniform() - 1.0;
  case RewardModel::RademacherShift: return mean + (rng.uniform() < 0.5 ? -1.0 : 1.0);
  case RewardModel::GaussianShift: return mean + rng.normal();
  case RewardModel::GaussianMixtureShift: {
    const double centre = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return mean + centre + rng.normal();
  }
  case RewardModel::PointMass: return mean;
  }
  return mean;
}

inline std::string to_string(RewardModel model)
{
  switch (model) {
  case RewardModel::UniformShift: return "uniform";
  case RewardModel::RademacherShift: return "rademacher";
  case RewardModel::GaussianShift: return "gaussian";
  case RewardModel::GaussianMixtureShift: return "gaussian_mixture";
  case RewardModel::PointMass: return "point_mass";
  }
  return "?";
}

inline RewardModel reward_model_from_string(const std::string& name)
{
  if (name == "uniform") return RewardModel::UniformShift;
  if (name == "rademacher") return RewardModel::RademacherShift;
  if (name == "gaussian") return RewardModel::GaussianShift;
  if (name == "gaussian_mixture") return RewardModel::GaussianMixtureShift;
  if (name == "point_mass") return RewardModel::PointMass;
  throw ConfigError("unknown reward model '" + name + "'");
}

} // namespace pbandit

#endif // PBANDIT_REWARD_MODEL_HPP
