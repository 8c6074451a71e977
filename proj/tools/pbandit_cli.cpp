// Command-line front end for the bandit experiments and verification tables.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pbandit/evt.hpp"
#include "pbandit/harness/checks.hpp"
#include "pbandit/harness/config.hpp"
#include "pbandit/harness/experiment.hpp"
#include "pbandit/harness/result.hpp"

namespace fs = std::filesystem;
using namespace pbandit;
using namespace pbandit::harness;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
};

ExperimentConfig load(const Options& opt, std::optional<Mode> fallback_mode)
{
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = load_config(opt.config_path);
  } else if (fallback_mode) {
    cfg.mode = *fallback_mode;
  } else {
    throw ConfigError("--config is required for this command");
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.out_dir.empty()) cfg.output = opt.out_dir;
  cfg.validate();
  return cfg;
}

fs::path prepare_dir(const std::string& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed for '" + path.string() + "'");
  }
}

int cmd_experiment(const Options& opt, Mode expected)
{
  const ExperimentConfig cfg = load(opt, std::nullopt);
  if (cfg.mode != expected) {
    throw ConfigError("config mode is '" + to_string(cfg.mode) + "', command expects '" + to_string(expected) + "'");
  }
  const AggregateResult result = run_experiment(cfg, opt.threads);
  const fs::path dir = prepare_dir(cfg.output);
  const std::string stem = to_string(cfg.mode);
  std::ostringstream csv;
  emit_csv(result, csv);
  write_file(dir / (stem + ".csv"), csv.str());
  std::ostringstream svg;
  emit_svg_lineplot(result, svg, stem + " average regret");
  write_file(dir / (stem + ".svg"), svg.str());
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << " (" << result.rows.size() << " rows)\n";
  return 0;
}

int cmd_grid_search(const Options& opt)
{
  const ExperimentConfig cfg = load(opt, std::nullopt);
  const AggregateResult result = run_experiment(cfg, opt.threads);
  const auto choices = grid_search(result);
  const fs::path dir = prepare_dir(cfg.output);
  std::ostringstream all, best;
  emit_csv(result, all);
  write_grid_csv(best, choices);
  write_file(dir / "grid_all.csv", all.str());
  write_file(dir / "grid_best.csv", best.str());
  std::cout << best.str();
  return 0;
}

int cmd_evt(const Options& opt)
{
  const ExperimentConfig cfg = load(opt, Mode::Evt);
  SeededStream rng(cfg.seed);
  const auto reports = verify_table1(cfg.block_sizes, cfg.n_blocks, rng);
  std::ostringstream csv;
  write_block_max_csv(csv, reports);
  write_file(prepare_dir(cfg.output) / "evt_table.csv", csv.str());
  std::cout << csv.str();
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  return ok ? 0 : 1;
}

int cmd_theory(const Options& opt)
{
  const ExperimentConfig cfg = load(opt, Mode::Theory);
  auto lines = hazard_checks();
  for (auto& l : theory_checks(cfg.seed)) lines.push_back(std::move(l));
  std::ostringstream csv;
  write_check_csv(csv, lines);
  write_file(prepare_dir(cfg.output) / "theory_check.csv", csv.str());
  std::cout << csv.str();
  bool ok = true;
  for (const auto& l : lines) ok = ok && l.pass;
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Perturbation-based bandit experiments"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config_path, "JSON experiment config");
    if (config_required) c->required();
    sub->add_option("--seed", opt.seed, "master seed (overrides config)");
    sub->add_option("--out", opt.out_dir, "output directory (overrides config)");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* stochastic = app.add_subcommand("stochastic", "stochastic bandit regret curves");
  auto* adversarial = app.add_subcommand("adversarial", "GBPA regret on an oblivious adversary");
  auto* evt = app.add_subcommand("evt-table", "Monte-Carlo block maxima against their asymptotics");
  auto* theory = app.add_subcommand("theory-check", "hazard, choice-map and two-arm checks");
  auto* grid = app.add_subcommand("grid-search", "tune each policy's parameter on its grid");
  add_common(stochastic, true);
  add_common(adversarial, true);
  add_common(evt, false);
  add_common(theory, false);
  add_common(grid, true);

  CLI11_PARSE(app, argc, argv);
  try {
    if (stochastic->parsed()) return cmd_experiment(opt, Mode::Stochastic);
    if (adversarial->parsed()) return cmd_experiment(opt, Mode::Adversarial);
    if (evt->parsed()) return cmd_evt(opt);
    if (theory->parsed()) return cmd_theory(opt);
    if (grid->parsed()) return cmd_grid_search(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
