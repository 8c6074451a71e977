#ifndef PBANDIT_EVT_HPP
#define PBANDIT_EVT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pbandit/errors.hpp"
#include "pbandit/format.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/random.hpp"

namespace pbandit {

/// Extreme-value attraction domain of a distribution's block maxima.
enum class EvtType { Gumbel, Frechet };

inline std::string to_string(EvtType t) { return t == EvtType::Gumbel ? "Lambda" : "Phi"; }

struct MonteCarloEstimate {
  double estimate;
  double stderr_;
};

/// Sample mean and standard error of max(Z_1..Z_K) over n_blocks independent blocks.
inline MonteCarloEstimate mc_expected_block_max(const PerturbationSpec& spec, std::int64_t block_size,
                                                std::int64_t n_blocks, SeededStream& rng)
{
  if (block_size < 1) {
    throw ConfigError("mc_expected_block_max: block size must be at least 1");
  }
  if (n_blocks < 100) {
    throw ConfigError("mc_expected_block_max: need at least 100 blocks");
  }
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    double block_max = sample(spec, rng);
    for (std::int64_t i = 1; i < block_size; ++i) {
      block_max = std::max(block_max, sample(spec, rng));
    }
    const double delta = block_max - mean;
    mean += delta / static_cast<double>(b + 1);
    m2 += delta * (block_max - mean);
  }
  const double n = static_cast<double>(n_blocks);
  const double variance = m2 / (n - 1.0);
  return {mean, std::sqrt(variance / n)};
}

struct NormalizingConstants {
  double a;
  double b;
  EvtType type;
};

/// Closed-form normalizing sequences (a_K, b_K) with F^K(a_K z + b_K) → G(z).
inline NormalizingConstants normalizing_constants(const PerturbationSpec& spec, std::int64_t block_size)
{
  if (block_size < 2) {
    throw ConfigError("normalizing_constants: block size must be at least 2");
  }
  const double k = static_cast<double>(block_size);
  const double log_k = std::log(k);
  const double alpha = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gumbel: {
    const double beta = spec.parameter();
    const double z = -std::log(-std::log1p(-1.0 / k));
    // a_K = g(b_K) with g = (1-F)/F'; 1 - F(b_K) = 1/K by construction.
    const double a = beta * (1.0 / k) / (std::exp(-z) * (1.0 - 1.0 / k));
    return {a, spec.location() + beta * z, EvtType::Gumbel};
  }
  case PerturbationKind::Gamma:
    return {1.0, log_k + (alpha - 1.0) * std::log(log_k) - std::lgamma(alpha), EvtType::Gumbel};
  case PerturbationKind::Weibull:
    if (alpha > 1.0) {
      throw UnsupportedError("normalizing_constants: Weibull with shape > 1 is excluded");
    }
    return {std::pow(log_k, 1.0 / alpha - 1.0) / alpha, std::pow(1.0 + log_k, 1.0 / alpha) - 1.0, EvtType::Gumbel};
  case PerturbationKind::Frechet:
    return {std::pow(-std::log1p(-1.0 / k), -1.0 / alpha), 0.0, EvtType::Frechet};
  case PerturbationKind::Pareto:
    if (!(alpha > 1.0)) {
      throw UnsupportedError("normalizing_constants: Pareto needs shape > 1 for a finite mean");
    }
    return {std::pow(k, 1.0 / alpha) - 1.0, 0.0, EvtType::Frechet};
  default:
    throw UnsupportedError("normalizing_constants: no block-maximum result for " + spec.name());
  }
}

/// Limit constant C = E[Z], Z ~ G: γ for Gumbel-type, Γ(1 - 1/α) for Fréchet-type.
inline double limit_mean(const PerturbationSpec& spec, EvtType type)
{
  return type == EvtType::Gumbel ? euler_gamma : std::tgamma(1.0 - 1.0 / spec.parameter());
}

/// Asymptotic E[M_K] ≈ C·a_K + b_K.
inline double asymptotic_block_max(const PerturbationSpec& spec, std::int64_t block_size)
{
  const NormalizingConstants nc = normalizing_constants(spec, block_size);
  return limit_mean(spec, nc.type) * nc.a + nc.b;
}

struct BlockMaxReport {
  PerturbationSpec spec;
  std::int64_t block_size;
  double mc_estimate;
  double mc_stderr;
  double asymptotic;
  double a_k;
  double b_k;
  EvtType evt_type;
  double tolerance; // relative tolerance applied
  bool pass;

  double relative_deviation() const { return std::abs(mc_estimate - asymptotic) / std::abs(asymptotic); }
};

/// Gamma's correction term is o(log K) rather than o(1), so its rows get 10%.
inline double table_tolerance(const PerturbationSpec& spec)
{
  return spec.kind() == PerturbationKind::Gamma ? 0.10 : 0.05;
}

/// The five bounded-hazard perturbations tabulated with their block-maximum asymptotics.
inline std::vector<PerturbationSpec> block_max_catalogue()
{
  return {PerturbationSpec::gumbel(0.0, 1.0), PerturbationSpec::gamma(2.0), PerturbationSpec::weibull(1.0),
          PerturbationSpec::frechet(2.0), PerturbationSpec::pareto(2.0)};
}

inline BlockMaxReport block_max_report(const PerturbationSpec& spec, std::int64_t block_size, std::int64_t n_blocks,
                                       SeededStream& rng)
{
  const NormalizingConstants nc = normalizing_constants(spec, block_size);
  const double asym = limit_mean(spec, nc.type) * nc.a + nc.b;
  const MonteCarloEstimate mc = mc_expected_block_max(spec, block_size, n_blocks, rng);
  const double tol = table_tolerance(spec);
  const bool pass = std::abs(mc.estimate - asym) <= std::max(tol * std::abs(asym), 3.0 * mc.stderr_);
  return {spec, block_size, mc.estimate, mc.stderr_, asym, nc.a, nc.b, nc.type, tol, pass};
}

/**
 * Monte-Carlo check of every (distribution, K) pair against its asymptotic.
 * A row fails when |mc - asymptotic| > max(tol·asymptotic, 3·stderr). Each row
 * draws from its own substream keyed by (row seed, distribution index, K).
 */
inline std::vector<BlockMaxReport> verify_table1(const std::vector<std::int64_t>& block_sizes, std::int64_t n_blocks,
                                                 SeededStream& rng,
                                                 const std::vector<PerturbationSpec>& catalogue = block_max_catalogue())
{
  if (block_sizes.empty()) {
    throw ConfigError("verify_table1: block size list is empty");
  }
  const std::uint64_t master = rng.next_u64();
  std::vector<BlockMaxReport> out;
  for (std::size_t d = 0; d < catalogue.size(); ++d) {
    for (std::int64_t k : block_sizes) {
      SeededStream row_rng(master, {d, static_cast<std::uint64_t>(k)});
      out.push_back(block_max_report(catalogue[d], k, n_blocks, row_rng));
    }
  }
  return out;
}

inline void write_block_max_csv(std::ostream& os, const std::vector<BlockMaxReport>& reports)
{
  os << "distribution,params,K,mc,stderr,asymptotic,a_K,b_K,type,pass\n";
  for (const auto& r : reports) {
    os << r.spec.name() << ',' << r.spec.params_string() << ',' << r.block_size << ',' << format_double(r.mc_estimate)
       << ',' << format_double(r.mc_stderr) << ',' << format_double(r.asymptotic) << ',' << format_double(r.a_k)
       << ',' << format_double(r.b_k) << ',' << to_string(r.evt_type) << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

} // namespace pbandit

#endif // PBANDIT_EVT_HPP
