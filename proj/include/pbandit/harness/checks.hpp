#ifndef PBANDIT_HARNESS_CHECKS_HPP
#define PBANDIT_HARNESS_CHECKS_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "pbandit/adversarial.hpp"
#include "pbandit/format.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/random.hpp"
#include "pbandit/theory.hpp"

namespace pbandit::harness {

/// One line of a verification report.
struct CheckLine {
  std::string name;
  double value;
  double target;
  bool pass;
};

inline void write_check_csv(std::ostream& os, const std::vector<CheckLine>& lines)
{
  os << "check,value,target,pass\n";
  for (const auto& l : lines) {
    os << l.name << ',' << format_double(l.value) << ',' << format_double(l.target) << ','
       << (l.pass ? "true" : "false") << '\n';
  }
}

/// Numeric sup-hazard against the tabulated values.
inline std::vector<CheckLine> hazard_checks()
{
  std::vector<CheckLine> out;
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const SupHazard s = sup_hazard(PerturbationSpec::pareto(a));
    out.push_back({"sup_hazard pareto alpha=" + format_double(a), s.value, a, s.value == a});
  }
  for (double a : {0.5, 1.0}) {
    const SupHazard s = sup_hazard(PerturbationSpec::weibull(a));
    out.push_back({"sup_hazard weibull alpha=" + format_double(a), s.value, a, s.value == a});
  }
  {
    const PerturbationSpec g = PerturbationSpec::gumbel();
    const SupHazard s = sup_hazard(g);
    // The hazard should climb monotonically toward 1.
    bool monotone = true;
    double prev = 0.0;
    for (double x = -5.0; x <= 30.0; x += 0.25) {
      const double h = hazard(g, x);
      monotone = monotone && h >= prev && h < 1.0;
      prev = h;
    }
    out.push_back({"sup_hazard gumbel", s.value, 1.0, s.value == 1.0});
    out.push_back({"gumbel hazard increases to 1", prev, 1.0, monotone && 1.0 - prev < 1e-9});
  }
  for (double a : {1.5, 2.0, 4.0}) {
    const SupHazard s = sup_hazard(PerturbationSpec::frechet(a));
    const double lo = a / (std::exp(1.0) - 1.0);
    out.push_back({"sup_hazard frechet alpha=" + format_double(a) + " in (a/(e-1), 2a)", s.value, lo,
                   s.value > lo && s.value < 2.0 * a});
  }
  return out;
}

/// Sign conditions of the Tsallis choice map, and the two-arm correspondence.
inline std::vector<CheckLine> theory_checks(std::uint64_t seed)
{
  std::vector<CheckLine> out;
  const double neg = wdz_counterexample_value(0.5, 0.01);
  const double pos = wdz_counterexample_value(0.5, 0.25);
  out.push_back({"wdz value alpha=0.5 eps=0.01 negative", neg, 0.0, neg < 0.0});
  out.push_back({"wdz value alpha=0.5 eps=0.25 positive", pos, 0.0, pos > 0.0});
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    int changes = 0;
    // Log-spaced ε: for α near 1 the root sits near 3^{-1/(1-α)}.
    double prev = wdz_counterexample_value(a, 1e-15);
    for (int i = 1; i < 1000; ++i) {
      const double eps = std::exp(std::log(1e-15) + (std::log(0.3333) - std::log(1e-15)) * i / 999.0);
      const double v = wdz_counterexample_value(a, eps);
      changes += (v > 0.0) != (prev > 0.0);
      prev = v;
    }
    out.push_back({"wdz sign change alpha=" + format_double(a), static_cast<double>(changes), 1.0, changes >= 1});
  }
  for (double eps : {0.01, 0.05}) {
    const WdzCheckResult r = wdz_probe(0.5, eps);
    out.push_back({"wdz fd sign agrees eps=" + format_double(eps), r.fd_mixed_partial, r.closed_form_value,
                   r.signs_agree && r.fd_reliable});
  }

  SeededStream rng(seed, {0x7e});
  // Jacobian symmetry and zero row sums at random K = 4 gains.
  double asym = 0.0;
  double rows = 0.0;
  double min_eig = 1.0;
  const double h = 1e-4;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> g(4);
    for (double& x : g) x = 3.0 * rng.uniform();
    const JacobianCheck jc = check_jacobian(tsallis_fd_jacobian(g, 0.5, h));
    asym = std::max(asym, jc.max_asymmetry);
    rows = std::max(rows, jc.max_row_sum);
    min_eig = std::min(min_eig, jc.min_tangent_eigen);
  }
  out.push_back({"tsallis jacobian symmetric", asym, 10.0 * h * h, asym <= 10.0 * h * h});
  out.push_back({"tsallis jacobian rows sum to 0", rows, 10.0 * h * h, rows <= 10.0 * h * h});
  out.push_back({"tsallis jacobian psd on tangent space", min_eig, 0.0, min_eig >= -10.0 * h * h});

  // K = 2: dC_1/dG_2 < 0 at random gains.
  bool all_negative = true;
  double worst = -1e300;
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> g{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    std::vector<double> up = g, down = g;
    up[1] += h;
    down[1] -= h;
    const double d = (choice_prob_tsallis(up, 1.0, 0.5)[0] - choice_prob_tsallis(down, 1.0, 0.5)[0]) / (2.0 * h);
    worst = std::max(worst, d);
    all_negative = all_negative && d < 0.0;
  }
  out.push_back({"two-arm tsallis dC1/dG2 < 0", worst, 0.0, all_negative});

  // Shannon two-arm CDF against the two-arm softmax.
  double shannon_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> g{10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0};
    const double softmax = choice_prob_shannon(g, 1.0)[0];
    shannon_gap = std::max(shannon_gap,
                           std::abs(two_arm_cdf_from_regularizer(Regularizer::shannon(), g[0] - g[1]) - softmax));
  }
  out.push_back({"shannon two-arm cdf equals softmax", shannon_gap, 1e-9, shannon_gap <= 1e-9});

  // Tsallis implicit CDF is monotone with limits 0 and 1.
  {
    const Regularizer reg = Regularizer::tsallis(0.5);
    bool monotone = true;
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double z = -1e3 + 2e3 * i / 1000.0;
      const double u = two_arm_cdf_from_regularizer(reg, z);
      monotone = monotone && u >= prev;
      prev = u;
    }
    const double lo = two_arm_cdf_from_regularizer(reg, -1e8);
    const double hi = two_arm_cdf_from_regularizer(reg, 1e8);
    out.push_back({"tsallis two-arm cdf monotone with limits 0 and 1", hi - lo, 1.0,
                   monotone && lo < 1e-6 && hi > 1.0 - 1e-6});
  }

  for (double a : {0.3, 0.5, 0.9}) {
    const std::vector<double> us{1.0 - 1e-2, 1.0 - 1e-4, 1.0 - 1e-6};
    const auto pts = tail_index_check(a, us);
    const double target = 1.0 / (1.0 - a);
    const double got = pts.back().criterion;
    out.push_back({"tsallis tail criterion alpha=" + format_double(a) + " at u=1-1e-6", got, target,
                   std::abs(got - target) <= 0.01 * target});
  }
  return out;
}

} // namespace pbandit::harness

#endif // PBANDIT_HARNESS_CHECKS_HPP
