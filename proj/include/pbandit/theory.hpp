#ifndef PBANDIT_THEORY_HPP
#define PBANDIT_THEORY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pbandit/adversarial.hpp"
#include "pbandit/errors.hpp"
#include "pbandit/perturbation.hpp"
#include "pbandit/random.hpp"

namespace pbandit {

// ---------------------------------------------------------------------------
// Williams-Daly-Zachary probes of the Tsallis choice map (η = 1 throughout).
// ---------------------------------------------------------------------------

/**
 * Closed-form value, up to the positive factor C_1(G), of the mixed partial
 * ∂²C_1/∂G_2∂G_3 of the K = 4 Tsallis choice map at C(G) = (ε, ε, ε, 1-3ε):
 *
 *   ((1-α)/α)^{(3-2α)/(1-α)} (6ε^{3-2α} + 3ε^{1-α}(1-3ε)^{2-α} - (1-3ε)^{3-2α}).
 *
 * Additive-perturbation choice maps need this second derivative positive; a
 * negative value is a violation.
 */
inline double wdz_counterexample_value(double alpha, double eps)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("wdz_counterexample_value: alpha must lie in (0, 1)");
  }
  if (!(eps > 0.0 && eps < 1.0 / 3.0)) {
    throw std::domain_error("wdz_counterexample_value: eps must lie in (0, 1/3)");
  }
  const double rest = 1.0 - 3.0 * eps;
  const double prefactor = std::pow((1.0 - alpha) / alpha, (3.0 - 2.0 * alpha) / (1.0 - alpha));
  return prefactor * (6.0 * std::pow(eps, 3.0 - 2.0 * alpha) +
                      3.0 * std::pow(eps, 1.0 - alpha) * std::pow(rest, 2.0 - alpha) -
                      std::pow(rest, 3.0 - 2.0 * alpha));
}

/// Gains G (with min G = 0) whose Tsallis choice probabilities equal `target`.
inline std::vector<double> tsallis_choice_inverse(std::span<const double> target, double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("tsallis_choice_inverse: alpha must lie in (0, 1)");
  }
  double sum = 0.0;
  for (double p : target) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::domain_error("tsallis_choice_inverse: target must lie in the simplex interior");
    }
    sum += p;
  }
  if (target.size() < 2 || std::abs(sum - 1.0) > 1e-9) {
    throw std::domain_error("tsallis_choice_inverse: target must sum to 1");
  }
  // λ - G_i = (C_i / c)^{α-1} with c = ((1-α)/α)^{1/(α-1)}, so (C_i/c)^{α-1} = C_i^{α-1} α/(1-α).
  std::vector<double> dist(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    dist[i] = std::pow(target[i], alpha - 1.0) * alpha / (1.0 - alpha);
  }
  const double far = *std::max_element(dist.begin(), dist.end());
  std::vector<double> gains(target.size());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    gains[i] = far - dist[i];
  }
  return gains;
}

struct FdResult {
  double value;          // Richardson-extrapolated estimate
  double error_estimate; // truncation + roundoff estimate
  bool cancellation;     // |value| < 10 · error_estimate: sign not trustworthy
};

namespace detail {

inline double tsallis_component(std::vector<double> gains, double alpha, std::size_t i)
{
  return choice_prob_tsallis(gains, 1.0, alpha)[i];
}

inline double mixed_central(const std::vector<double>& gains, double alpha, std::size_t i0, std::size_t i1,
                            std::size_t i2, double h)
{
  auto eval = [&](double s1, double s2) {
    std::vector<double> g = gains;
    g[i1] += s1 * h;
    g[i2] += s2 * h;
    return tsallis_component(std::move(g), alpha, i0);
  };
  return (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h * h);
}

} // namespace detail

/**
 * Central finite-difference estimate of ∂²C_{i0}/∂G_{i1}∂G_{i2} for the Tsallis
 * choice map, with one Richardson step (h, h/2).
 *
 * The cancellation flag compares the result with an error estimate (the
 * Richardson correction plus a roundoff term ε_mach·C_{i0}/(h/2)²) rather than
 * a fixed 10·h²: the derivatives at interesting probe points are of order
 * 1e-9, far below h² for any usable step, yet resolved cleanly.
 */
inline FdResult wdz_fd_mixed_partial(std::span<const double> gains, double alpha, std::size_t i0, std::size_t i1,
                                     std::size_t i2, double h = 1e-4)
{
  const std::size_t k = gains.size();
  if (i0 >= k || i1 >= k || i2 >= k || i0 == i1 || i0 == i2 || i1 == i2) {
    throw std::invalid_argument("wdz_fd_mixed_partial: indices must be distinct and in range");
  }
  if (!(h >= 1e-5 && h <= 1e-2)) {
    throw std::domain_error("wdz_fd_mixed_partial: step must lie in [1e-5, 1e-2]");
  }
  const std::vector<double> g(gains.begin(), gains.end());
  const double coarse = detail::mixed_central(g, alpha, i0, i1, i2, h);
  const double fine = detail::mixed_central(g, alpha, i0, i1, i2, h / 2.0);
  const double value = (4.0 * fine - coarse) / 3.0;
  const double c0 = detail::tsallis_component(g, alpha, i0);
  const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * c0 / (h * h / 4.0);
  const double error = std::abs(fine - coarse) / 3.0 + roundoff;
  return {value, error, std::abs(value) < 10.0 * error};
}

/// Central-difference Jacobian J_ij = ∂C_i/∂G_j of the Tsallis choice map.
inline Eigen::MatrixXd tsallis_fd_jacobian(std::span<const double> gains, double alpha, double h = 1e-4)
{
  const std::size_t k = gains.size();
  Eigen::MatrixXd jac(k, k);
  std::vector<double> g(gains.begin(), gains.end());
  for (std::size_t j = 0; j < k; ++j) {
    const double saved = g[j];
    g[j] = saved + h;
    const ChoiceProbabilities up = choice_prob_tsallis(g, 1.0, alpha);
    g[j] = saved - h;
    const ChoiceProbabilities down = choice_prob_tsallis(g, 1.0, alpha);
    g[j] = saved;
    for (std::size_t i = 0; i < k; ++i) {
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (up[i] - down[i]) / (2.0 * h);
    }
  }
  return jac;
}

/// Summary of the first three WDZ conditions on a finite-difference Jacobian.
struct JacobianCheck {
  double max_asymmetry;       // max |J_ij - J_ji|
  double max_row_sum;         // max |Σ_j J_ij|
  double min_tangent_eigen;   // smallest eigenvalue of sym(J) on the complement of 1
  double max_off_diagonal;    // largest off-diagonal entry (should be negative)
};

inline JacobianCheck check_jacobian(const Eigen::MatrixXd& jac)
{
  const Eigen::Index k = jac.rows();
  JacobianCheck out{0.0, 0.0, 0.0, -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < k; ++i) {
    out.max_row_sum = std::max(out.max_row_sum, std::abs(jac.row(i).sum()));
    for (Eigen::Index j = 0; j < k; ++j) {
      out.max_asymmetry = std::max(out.max_asymmetry, std::abs(jac(i, j) - jac(j, i)));
      if (i != j) {
        out.max_off_diagonal = std::max(out.max_off_diagonal, jac(i, j));
      }
    }
  }
  // Orthonormal basis of 1^⊥: complete {1/√K} via QR and drop the first column.
  Eigen::MatrixXd seed = Eigen::MatrixXd::Identity(k, k);
  seed.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd basis = q.rightCols(k - 1);
  const Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
  const Eigen::MatrixXd reduced = basis.transpose() * sym * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  out.min_tangent_eigen = eig.eigenvalues().minCoeff();
  return out;
}

/// Outcome of probing the second-order WDZ sign condition at C = (ε, ε, ε, 1-3ε).
struct WdzCheckResult {
  double alpha;
  double eps;
  double closed_form_value;
  double fd_mixed_partial;
  bool passes_condition4; // mixed partial strictly positive
  bool signs_agree;
  bool fd_reliable;
};

inline WdzCheckResult wdz_probe(double alpha, double eps, double h = 1e-3)
{
  const std::vector<double> target{eps, eps, eps, 1.0 - 3.0 * eps};
  const std::vector<double> gains = tsallis_choice_inverse(target, alpha);
  const double closed = wdz_counterexample_value(alpha, eps);
  const FdResult fd = wdz_fd_mixed_partial(gains, alpha, 0, 1, 2, h);
  return {alpha, eps, closed, fd.value, fd.value > 0.0, (closed > 0.0) == (fd.value > 0.0), !fd.cancellation};
}

// ---------------------------------------------------------------------------
// Two-armed regularizer ↔ perturbation correspondence.
// ---------------------------------------------------------------------------

enum class RegularizerKind { Shannon, Tsallis };

struct Regularizer {
  RegularizerKind kind;
  double alpha = 0.5; // Tsallis only

  static Regularizer shannon() { return {RegularizerKind::Shannon, 0.0}; }
  static Regularizer tsallis(double alpha)
  {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("Tsallis alpha must lie in (0, 1)");
    }
    return {RegularizerKind::Tsallis, alpha};
  }
};

/// z(u) = α/(1-α)((1-u)^{α-1} - u^{α-1}): the Tsallis-induced difference perturbation has F(z(u)) = u.
inline double tsallis_two_arm_z(double u, double alpha)
{
  return alpha / (1.0 - alpha) * (std::pow(1.0 - u, alpha - 1.0) - std::pow(u, alpha - 1.0));
}

/// Density of the Tsallis-induced difference perturbation at z(u).
inline double tsallis_two_arm_density(double u, double alpha)
{
  return 1.0 / (alpha * (std::pow(1.0 - u, alpha - 2.0) + std::pow(u, alpha - 2.0)));
}

/// CDF of Z_1 - Z_2 whose two-arm choice map reproduces the regularizer.
/// Shannon gives the logistic CDF; Tsallis is inverted by bisection in u.
inline double two_arm_cdf_from_regularizer(const Regularizer& reg, double z)
{
  if (reg.kind == RegularizerKind::Shannon) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (tsallis_two_arm_z(mid, reg.alpha) < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct TailPoint {
  double z;
  double criterion; // z f(z) / (1 - F(z))
};

/// Fréchet-type criterion z·f(z)/(1-F(z)) along u → 1 for the Tsallis-induced perturbation.
inline std::vector<TailPoint> tail_index_check(double alpha, std::span<const double> u_sequence)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("tail_index_check: alpha must lie in (0, 1)");
  }
  std::vector<TailPoint> out;
  out.reserve(u_sequence.size());
  double prev = -std::numeric_limits<double>::infinity();
  for (double u : u_sequence) {
    if (!(u > prev && u > 0.0 && u < 1.0)) {
      throw std::domain_error("tail_index_check: u sequence must increase strictly inside (0, 1)");
    }
    prev = u;
    const double z = tsallis_two_arm_z(u, alpha);
    out.push_back({z, z * tsallis_two_arm_density(u, alpha) / (1.0 - u)});
  }
  return out;
}

/// Same criterion for the logistic (Shannon-induced) perturbation: z·F(z), unbounded.
inline double logistic_tail_criterion(double z)
{
  return z * two_arm_cdf_from_regularizer(Regularizer::shannon(), z);
}

/// Sup-norm gap between the Monte-Carlo Gumbel-FTPL gradient and the softmax.
inline double gumbel_softmax_equivalence(std::span<const double> gains, double eta, std::int64_t samples,
                                         SeededStream& rng)
{
  if (samples < 10000) {
    throw ConfigError("gumbel_softmax_equivalence: need at least 1e4 samples");
  }
  const ChoiceProbabilities mc =
      choice_prob_ftpl_mc(gains, eta, PerturbationSpec::gumbel(0.0, 1.0), samples, default_floor(gains.size()), rng);
  const ChoiceProbabilities exact = choice_prob_shannon(gains, eta);
  double gap = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    gap = std::max(gap, std::abs(mc[i] - exact[i]));
  }
  return gap;
}

} // namespace pbandit

#endif // PBANDIT_THEORY_HPP
