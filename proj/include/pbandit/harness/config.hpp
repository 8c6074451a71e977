#ifndef PBANDIT_HARNESS_CONFIG_HPP
#define PBANDIT_HARNESS_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbandit/adversarial.hpp"
#include "pbandit/errors.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/reward_model.hpp"
#include "pbandit/stochastic.hpp"

namespace pbandit::harness {

enum class Mode { Stochastic, Adversarial, Evt, Theory };

inline Mode mode_from_string(const std::string& s)
{
  if (s == "stochastic") return Mode::Stochastic;
  if (s == "adversarial") return Mode::Adversarial;
  if (s == "evt") return Mode::Evt;
  if (s == "theory") return Mode::Theory;
  throw ConfigError("unknown mode '" + s + "'");
}

inline std::string to_string(Mode m)
{
  switch (m) {
  case Mode::Stochastic: return "stochastic";
  case Mode::Adversarial: return "adversarial";
  case Mode::Evt: return "evt";
  case Mode::Theory: return "theory";
  }
  return "?";
}

/// One stochastic policy family and the grid of its tuned scalar.
struct PolicyGrid {
  std::string policy;                      // ucb1 | thompson | ftpl | rcb
  std::string perturbation;                // family name for ftpl / rcb
  std::vector<double> grid;                // c, σ or ε; ignored by thompson

  std::vector<PolicyConfig> expand() const
  {
    std::vector<PolicyConfig> out;
    if (policy == "thompson") {
      out.push_back(PolicyConfig::thompson_gaussian());
      return out;
    }
    for (double v : grid) {
      if (policy == "ucb1") {
        out.push_back(PolicyConfig::ucb1(v));
      } else if (policy == "ftpl") {
        if (perturbation == "gaussian") {
          out.push_back(PolicyConfig::ftpl_unbounded(PerturbationSpec::gaussian(v)));
        } else if (perturbation == "double_exponential") {
          out.push_back(PolicyConfig::ftpl_unbounded(PerturbationSpec::double_exponential(v)));
        } else {
          throw ConfigError("ftpl policy needs perturbation gaussian or double_exponential, got '" + perturbation +
                            "'");
        }
      } else if (policy == "rcb") {
        if (perturbation == "uniform") {
          out.push_back(PolicyConfig::ftpl_bounded(PerturbationSpec::uniform(), v));
        } else if (perturbation == "rademacher") {
          out.push_back(PolicyConfig::ftpl_bounded(PerturbationSpec::rademacher(), v));
        } else {
          throw ConfigError("rcb policy needs perturbation uniform or rademacher, got '" + perturbation + "'");
        }
      } else {
        throw ConfigError("unknown policy '" + policy + "'");
      }
    }
    return out;
  }
};

/// One GBPA potential and its learning-rate grid. An empty grid means "tuned".
struct PotentialGrid {
  std::string potential;                   // shannon | tsallis | ftpl
  double alpha = 0.5;                      // tsallis
  std::optional<PerturbationSpec> perturbation; // ftpl
  std::int64_t mc_samples = 100;           // ftpl
  std::vector<double> grid;
};

struct AdversarySpec {
  std::string kind = "single_best_arm"; // constant | single_best_arm | iid_uniform | csv
  double value = 0.5;                   // constant
  std::size_t best = 0;                 // single_best_arm
  std::string path;                     // csv
};

struct ExperimentConfig {
  Mode mode = Mode::Stochastic;
  std::size_t arms = 10;
  std::int64_t horizon = 10000;
  std::int64_t episodes = 200;
  RewardModel reward_model = RewardModel::GaussianShift;
  std::optional<std::vector<double>> means; // fixed means instead of U[0,1] draws
  AdversarySpec adversary;
  std::vector<PolicyGrid> policies;
  std::vector<PotentialGrid> potentials;
  std::vector<std::int64_t> checkpoints{100, 1000, 5000, 10000};
  std::vector<std::int64_t> block_sizes{1000};
  std::int64_t n_blocks = 100000;
  std::uint64_t seed = 1;
  std::string output = "out";

  void validate() const
  {
    if (mode == Mode::Stochastic || mode == Mode::Adversarial) {
      if (episodes < 1) throw ConfigError("episodes must be at least 1");
      if (horizon < 1) throw ConfigError("horizon must be at least 1");
      if (arms < 1) throw ConfigError("arms must be at least 1");
      if (checkpoints.empty()) throw ConfigError("checkpoint list is empty");
      for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || checkpoints[i] > horizon) {
          throw ConfigError("checkpoint " + std::to_string(checkpoints[i]) + " outside [1, horizon]");
        }
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
          throw ConfigError("checkpoints must be strictly increasing");
        }
      }
    }
    if (mode == Mode::Stochastic) {
      if (policies.empty()) throw ConfigError("stochastic config lists no policies");
      for (const auto& p : policies) {
        if (p.policy != "thompson" && p.grid.empty()) {
          throw ConfigError("policy '" + p.policy + "' has an empty grid");
        }
        (void)p.expand();
      }
      if (means && means->size() != arms) throw ConfigError("means length does not match arms");
    }
    if (mode == Mode::Adversarial) {
      if (potentials.empty()) throw ConfigError("adversarial config lists no potentials");
      if (arms < 2) throw ConfigError("adversarial mode needs at least 2 arms");
    }
    if (mode == Mode::Evt) {
      if (block_sizes.empty()) throw ConfigError("block_sizes is empty");
      if (n_blocks < 100) throw ConfigError("n_blocks must be at least 100");
    }
  }
};

namespace detail {

inline PerturbationSpec perturbation_from_json(const nlohmann::json& j)
{
  const std::string name = j.is_string() ? j.get<std::string>() : j.at("name").get<std::string>();
  auto num = [&](const char* key, double fallback) {
    return j.is_object() && j.contains(key) ? j.at(key).get<double>() : fallback;
  };
  if (name == "gaussian") return PerturbationSpec::gaussian(num("sigma", 1.0));
  if (name == "uniform") return PerturbationSpec::uniform();
  if (name == "rademacher") return PerturbationSpec::rademacher();
  if (name == "double_exponential") return PerturbationSpec::double_exponential(num("sigma", 1.0));
  if (name == "gumbel") return PerturbationSpec::gumbel(num("mu", 0.0), num("beta", 1.0));
  if (name == "gamma") return PerturbationSpec::gamma(num("alpha", 2.0));
  if (name == "weibull") return PerturbationSpec::weibull(num("alpha", 1.0));
  if (name == "frechet") return PerturbationSpec::frechet(num("alpha", 2.0));
  if (name == "pareto") return PerturbationSpec::pareto(num("alpha", 2.0));
  throw ConfigError("unknown perturbation '" + name + "'");
}

} // namespace detail

/// Build a config from a parsed JSON document; unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
  static const std::vector<std::string> known{"mode",       "arms",        "horizon",  "episodes",
                                              "reward_model", "means",     "adversary", "policies",
                                              "potentials", "checkpoints", "block_sizes", "n_blocks",
                                              "seed",       "output"};
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("arms")) c.arms = j.at("arms").get<std::size_t>();
    if (j.contains("horizon")) c.horizon = j.at("horizon").get<std::int64_t>();
    if (j.contains("episodes")) c.episodes = j.at("episodes").get<std::int64_t>();
    if (j.contains("reward_model")) c.reward_model = reward_model_from_string(j.at("reward_model").get<std::string>());
    if (j.contains("means")) c.means = j.at("means").get<std::vector<double>>();
    if (j.contains("checkpoints")) c.checkpoints = j.at("checkpoints").get<std::vector<std::int64_t>>();
    if (j.contains("block_sizes")) c.block_sizes = j.at("block_sizes").get<std::vector<std::int64_t>>();
    if (j.contains("n_blocks")) c.n_blocks = j.at("n_blocks").get<std::int64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("adversary")) {
      const auto& a = j.at("adversary");
      c.adversary.kind = a.is_string() ? a.get<std::string>() : a.at("kind").get<std::string>();
      if (a.is_object()) {
        if (a.contains("value")) c.adversary.value = a.at("value").get<double>();
        if (a.contains("best")) c.adversary.best = a.at("best").get<std::size_t>();
        if (a.contains("path")) c.adversary.path = a.at("path").get<std::string>();
      }
      const auto& k = c.adversary.kind;
      if (k != "constant" && k != "single_best_arm" && k != "iid_uniform" && k != "csv") {
        throw ConfigError("unknown adversary '" + k + "'");
      }
    }
    if (j.contains("policies")) {
      for (const auto& p : j.at("policies")) {
        PolicyGrid g;
        g.policy = p.at("policy").get<std::string>();
        if (p.contains("perturbation")) g.perturbation = p.at("perturbation").get<std::string>();
        if (p.contains("grid")) g.grid = p.at("grid").get<std::vector<double>>();
        c.policies.push_back(std::move(g));
      }
    }
    if (j.contains("potentials")) {
      for (const auto& p : j.at("potentials")) {
        PotentialGrid g;
        g.potential = p.at("potential").get<std::string>();
        if (g.potential != "shannon" && g.potential != "tsallis" && g.potential != "ftpl") {
          throw ConfigError("unknown potential '" + g.potential + "'");
        }
        if (p.contains("alpha")) g.alpha = p.at("alpha").get<double>();
        if (p.contains("perturbation")) g.perturbation = detail::perturbation_from_json(p.at("perturbation"));
        if (p.contains("mc_samples")) g.mc_samples = p.at("mc_samples").get<std::int64_t>();
        if (p.contains("grid") && !(p.at("grid").is_string() && p.at("grid").get<std::string>() == "tuned")) {
          g.grid = p.at("grid").get<std::vector<double>>();
        }
        if (g.potential == "ftpl" && !g.perturbation) {
          throw ConfigError("ftpl potential needs a perturbation");
        }
        c.potentials.push_back(std::move(g));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config '" + path + "'");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

} // namespace pbandit::harness

#endif // PBANDIT_HARNESS_CONFIG_HPP
