#ifndef PBANDIT_PERTURBATION_HPP
#define PBANDIT_PERTURBATION_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pbandit/errors.hpp"
#include "pbandit/random.hpp"

namespace pbandit {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

enum class PerturbationKind {
  Gaussian,
  Uniform,
  Rademacher,
  DoubleExponential,
  Gumbel,
  Gamma,
  Weibull,
  Frechet,
  Pareto,
};

/**
 * A named perturbation distribution.
 *
 * Parameterizations:
 *  - Gaussian(σ): N(0, σ²)
 *  - Uniform: U[-1, 1]
 *  - Rademacher: ±1 with probability 1/2
 *  - DoubleExponential(σ): Laplace density exp(-|x|/σ) / (2σ)
 *  - Gumbel(μ, β): F(x) = exp(-exp(-(x-μ)/β))
 *  - Gamma(α): shape α, scale 1
 *  - Weibull(α): shifted form F(x) = 1 - exp(1 - (x+1)^α) on x ≥ 0
 *  - Frechet(α): F(x) = exp(-x^{-α}) on x > 0, α > 1
 *  - Pareto(α): shifted form F(x) = 1 - (1+x)^{-α} on x ≥ 0
 *
 * Parameters are validated by the named constructors; a constructed spec is
 * always valid, so the evaluation functions never raise configuration errors.
 */
class PerturbationSpec {
public:
  static PerturbationSpec gaussian(double sigma = 1.0)
  {
    require_positive(sigma, "Gaussian sigma");
    return {PerturbationKind::Gaussian, sigma, 0.0};
  }
  static PerturbationSpec uniform() { return {PerturbationKind::Uniform, 0.0, 0.0}; }
  static PerturbationSpec rademacher() { return {PerturbationKind::Rademacher, 0.0, 0.0}; }
  static PerturbationSpec double_exponential(double sigma = 1.0)
  {
    require_positive(sigma, "DoubleExponential sigma");
    return {PerturbationKind::DoubleExponential, sigma, 0.0};
  }
  static PerturbationSpec gumbel(double mu = 0.0, double beta = 1.0)
  {
    if (!std::isfinite(mu)) {
      throw ConfigError("Gumbel location must be finite");
    }
    require_positive(beta, "Gumbel beta");
    return {PerturbationKind::Gumbel, beta, mu};
  }
  static PerturbationSpec gamma(double shape)
  {
    require_positive(shape, "Gamma shape");
    return {PerturbationKind::Gamma, shape, 0.0};
  }
  static PerturbationSpec weibull(double shape)
  {
    require_positive(shape, "Weibull shape");
    return {PerturbationKind::Weibull, shape, 0.0};
  }
  static PerturbationSpec frechet(double shape)
  {
    require_positive(shape, "Frechet shape");
    if (!(shape > 1.0)) {
      throw ConfigError("Frechet shape must exceed 1 (finite mean)");
    }
    return {PerturbationKind::Frechet, shape, 0.0};
  }
  static PerturbationSpec pareto(double shape)
  {
    require_positive(shape, "Pareto shape");
    return {PerturbationKind::Pareto, shape, 0.0};
  }

  PerturbationKind kind() const noexcept { return kind_; }

  /// Scale σ (Gaussian, DoubleExponential), β (Gumbel) or shape α (Gamma, Weibull, Frechet, Pareto).
  double parameter() const noexcept { return param_; }
  /// Gumbel location μ; zero for every other kind.
  double location() const noexcept { return location_; }

  bool bounded_support() const noexcept
  {
    return kind_ == PerturbationKind::Uniform || kind_ == PerturbationKind::Rademacher;
  }

  std::string name() const
  {
    switch (kind_) {
    case PerturbationKind::Gaussian: return "Gaussian";
    case PerturbationKind::Uniform: return "Uniform";
    case PerturbationKind::Rademacher: return "Rademacher";
    case PerturbationKind::DoubleExponential: return "DoubleExponential";
    case PerturbationKind::Gumbel: return "Gumbel";
    case PerturbationKind::Gamma: return "Gamma";
    case PerturbationKind::Weibull: return "Weibull";
    case PerturbationKind::Frechet: return "Frechet";
    case PerturbationKind::Pareto: return "Pareto";
    }
    return "?";
  }

  /// Parameter string used in reports, e.g. "sigma=1" or "mu=0;beta=1".
  std::string params_string() const
  {
    auto fmt = [](double v) {
      std::string s = std::to_string(v);
      s.erase(s.find_last_not_of('0') + 1);
      if (!s.empty() && s.back() == '.') {
        s.pop_back();
      }
      return s;
    };
    switch (kind_) {
    case PerturbationKind::Gaussian:
    case PerturbationKind::DoubleExponential: return "sigma=" + fmt(param_);
    case PerturbationKind::Uniform:
    case PerturbationKind::Rademacher: return "";
    case PerturbationKind::Gumbel: return "mu=" + fmt(location_) + ";beta=" + fmt(param_);
    default: return "alpha=" + fmt(param_);
    }
  }

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;

private:
  PerturbationSpec(PerturbationKind k, double p, double loc) : kind_(k), param_(p), location_(loc) {}

  static void require_positive(double v, const char* what)
  {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(what) + " must be finite and strictly positive");
    }
  }

  PerturbationKind kind_;
  double param_;
  double location_;
};

namespace detail {

// Marsaglia-Tsang squeeze/rejection sampler for Gamma(shape, 1).
inline double sample_gamma(double shape, SeededStream& rng)
{
  if (shape < 1.0) {
    // Boost to shape+1 and rescale by U^{1/shape}.
    const double g = sample_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

} // namespace detail

/// Inverse CDF. For Rademacher returns the left-continuous generalized inverse.
inline double quantile(const PerturbationSpec& spec, double u)
{
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("quantile: u must lie in the open interval (0, 1)");
  }
  const double a = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gaussian:
    return -a * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  case PerturbationKind::Uniform:
    return 2.0 * u - 1.0;
  case PerturbationKind::Rademacher:
    return u <= 0.5 ? -1.0 : 1.0;
  case PerturbationKind::DoubleExponential:
    return u < 0.5 ? a * std::log(2.0 * u) : -a * std::log(2.0 * (1.0 - u));
  case PerturbationKind::Gumbel:
    return spec.location() - a * std::log(-std::log(u));
  case PerturbationKind::Gamma:
    return boost::math::gamma_p_inv(a, u);
  case PerturbationKind::Weibull:
    return std::pow(1.0 - std::log1p(-u), 1.0 / a) - 1.0;
  case PerturbationKind::Frechet:
    return std::pow(-std::log(u), -1.0 / a);
  case PerturbationKind::Pareto:
    return std::pow(1.0 - u, -1.0 / a) - 1.0;
  }
  return 0.0;
}

/// One draw; deterministic given the stream state.
inline double sample(const PerturbationSpec& spec, SeededStream& rng)
{
  switch (spec.kind()) {
  case PerturbationKind::Gaussian:
    return spec.parameter() * rng.normal();
  case PerturbationKind::Uniform:
    return 2.0 * rng.uniform() - 1.0;
  case PerturbationKind::Rademacher:
    return rng.uniform() < 0.5 ? -1.0 : 1.0;
  case PerturbationKind::Gumbel:
    return spec.location() - spec.parameter() * std::log(-std::log(rng.uniform_open()));
  case PerturbationKind::Gamma:
    return detail::sample_gamma(spec.parameter(), rng);
  default:
    return quantile(spec, rng.uniform_open());
  }
}

inline double cdf(const PerturbationSpec& spec, double x)
{
  const double a = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gaussian:
    return 0.5 * std::erfc(-x / (a * std::numbers::sqrt2));
  case PerturbationKind::Uniform:
    return std::clamp(0.5 * (x + 1.0), 0.0, 1.0);
  case PerturbationKind::Rademacher:
    return x < -1.0 ? 0.0 : (x < 1.0 ? 0.5 : 1.0);
  case PerturbationKind::DoubleExponential:
    return x < 0.0 ? 0.5 * std::exp(x / a) : 1.0 - 0.5 * std::exp(-x / a);
  case PerturbationKind::Gumbel:
    return std::exp(-std::exp(-(x - spec.location()) / a));
  case PerturbationKind::Gamma:
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, x);
  case PerturbationKind::Weibull:
    return x <= 0.0 ? 0.0 : -std::expm1(1.0 - std::pow(x + 1.0, a));
  case PerturbationKind::Frechet:
    return x <= 0.0 ? 0.0 : std::exp(-std::pow(x, -a));
  case PerturbationKind::Pareto:
    return x <= 0.0 ? 0.0 : -std::expm1(-a * std::log1p(x));
  }
  return 0.0;
}

/// 1 - cdf, evaluated without cancellation in the upper tail.
inline double survival(const PerturbationSpec& spec, double x)
{
  const double a = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gaussian:
    return 0.5 * std::erfc(x / (a * std::numbers::sqrt2));
  case PerturbationKind::DoubleExponential:
    return x < 0.0 ? 1.0 - 0.5 * std::exp(x / a) : 0.5 * std::exp(-x / a);
  case PerturbationKind::Gumbel:
    return -std::expm1(-std::exp(-(x - spec.location()) / a));
  case PerturbationKind::Gamma:
    return x <= 0.0 ? 1.0 : boost::math::gamma_q(a, x);
  case PerturbationKind::Weibull:
    return x <= 0.0 ? 1.0 : std::exp(1.0 - std::pow(x + 1.0, a));
  case PerturbationKind::Frechet:
    return x <= 0.0 ? 1.0 : -std::expm1(-std::pow(x, -a));
  case PerturbationKind::Pareto:
    return x <= 0.0 ? 1.0 : std::exp(-a * std::log1p(x));
  default:
    return 1.0 - cdf(spec, x);
  }
}

/// Density. Rademacher has no density and reports 0 everywhere.
inline double pdf(const PerturbationSpec& spec, double x)
{
  const double a = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gaussian: {
    const double z = x / a;
    return std::exp(-0.5 * z * z) / (a * std::sqrt(2.0 * std::numbers::pi));
  }
  case PerturbationKind::Uniform:
    return (x >= -1.0 && x <= 1.0) ? 0.5 : 0.0;
  case PerturbationKind::Rademacher:
    return 0.0;
  case PerturbationKind::DoubleExponential:
    return std::exp(-std::abs(x) / a) / (2.0 * a);
  case PerturbationKind::Gumbel: {
    const double z = (x - spec.location()) / a;
    return std::exp(-z - std::exp(-z)) / a;
  }
  case PerturbationKind::Gamma:
    return x <= 0.0 ? 0.0 : boost::math::gamma_p_derivative(a, x);
  case PerturbationKind::Weibull:
    return x < 0.0 ? 0.0 : a * std::pow(x + 1.0, a - 1.0) * std::exp(1.0 - std::pow(x + 1.0, a));
  case PerturbationKind::Frechet:
    return x <= 0.0 ? 0.0 : a * std::pow(x, -a - 1.0) * std::exp(-std::pow(x, -a));
  case PerturbationKind::Pareto:
    return x < 0.0 ? 0.0 : a * std::exp(-(a + 1.0) * std::log1p(x));
  }
  return 0.0;
}

/// Hazard rate f(x) / (1 - F(x)).
inline double hazard(const PerturbationSpec& spec, double x)
{
  const double a = spec.parameter();
  // Closed forms where the ratio cancels analytically.
  switch (spec.kind()) {
  case PerturbationKind::Gumbel: {
    const double w = std::exp(-(x - spec.location()) / a);
    if (w == 0.0) {
      return 1.0 / a;
    }
    if (std::isinf(w)) {
      return 0.0;
    }
    return w / std::expm1(w) / a;
  }
  case PerturbationKind::Weibull:
    return x < 0.0 ? 0.0 : a * std::pow(x + 1.0, a - 1.0);
  case PerturbationKind::Pareto:
    return x < 0.0 ? 0.0 : a / (1.0 + x);
  case PerturbationKind::Frechet: {
    if (x <= 0.0) {
      return 0.0;
    }
    const double w = std::pow(x, -a);
    return a * w / x / std::expm1(w);
  }
  default:
    break;
  }
  const double s = survival(spec, x);
  if (!(s > 0.0)) {
    throw std::domain_error("hazard: survival function is zero at x = " + std::to_string(x));
  }
  return pdf(spec, x) / s;
}

/// Maximum hazard over a geometric grid of n points on [lo, hi].
inline double grid_max_hazard(const PerturbationSpec& spec, double lo, double hi, int n)
{
  const double ratio = std::pow(hi / lo, 1.0 / (n - 1));
  double best = 0.0;
  double x = lo;
  for (int i = 0; i < n; ++i, x *= ratio) {
    best = std::max(best, hazard(spec, std::min(x, hi)));
  }
  return best;
}

/// Supremum of the hazard rate. `value` is exact when `exact`, otherwise a
/// numeric estimate lying in the open analytic bracket (lower, upper).
struct SupHazard {
  double value;
  double lower;
  double upper;
  bool exact;
};

inline SupHazard sup_hazard(const PerturbationSpec& spec)
{
  const double a = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gumbel:
    return {1.0 / a, 1.0 / a, 1.0 / a, true};
  case PerturbationKind::Gamma:
    // Increases to 1 for shape >= 1; diverges at 0+ for shape < 1.
    if (a < 1.0) {
      throw UnsupportedError("sup_hazard: Gamma hazard is unbounded for shape < 1");
    }
    return {1.0, 1.0, 1.0, true};
  case PerturbationKind::Weibull:
    if (a > 1.0) {
      throw UnsupportedError("sup_hazard: Weibull hazard is unbounded for shape > 1");
    }
    return {a, a, a, true};
  case PerturbationKind::Pareto:
    return {a, a, a, true};
  case PerturbationKind::Frechet: {
    const double estimate = grid_max_hazard(spec, 1e-3, 50.0, 10000);
    return {estimate, a / (std::numbers::e - 1.0), 2.0 * a, false};
  }
  default:
    throw UnsupportedError("sup_hazard: no bounded-hazard result for " + spec.name());
  }
}

/**
 * Sub-Weibull tail description: P(|Z| >= t) <= c_a exp(-t^p / (2 sigma^p)) and
 * P(|Z| >= t) >= exp(-t^q / (2 sigma_lower^q)) / c_b for all t >= 0.
 *
 * A Gaussian tail cannot satisfy both inequalities with one scale (its lower
 * tail carries an extra 1/t factor), so the lower bound has its own scale.
 */
struct TailMetadata {
  double p;
  double q;
  double sigma;
  double sigma_lower;
  double c_a;
  double c_b;

  double upper_bound(double t) const { return c_a * std::exp(-std::pow(t, p) / (2.0 * std::pow(sigma, p))); }
  double lower_bound(double t) const
  {
    return std::exp(-std::pow(t, q) / (2.0 * std::pow(sigma_lower, q))) / c_b;
  }

  /// p <= q <= 2, with sigma >= 1 when q = 2; the preconditions of the regret bound.
  bool meets_regret_conditions() const { return p <= q && q <= 2.0 && (q < 2.0 || sigma >= 1.0); }
};

inline TailMetadata tail_metadata(const PerturbationSpec& spec)
{
  const double s = spec.parameter();
  switch (spec.kind()) {
  case PerturbationKind::Gaussian:
    // erfc(x/√2) <= 2 e^{-x²/2}; erfc(x/√2) >= e^{-x²}/2 (ratio bottoms out near 0.79).
    return {2.0, 2.0, s, s / std::numbers::sqrt2, 2.0, 2.0};
  case PerturbationKind::DoubleExponential:
    // P(|Z| >= t) = e^{-t/σ} exactly.
    return {1.0, 1.0, s, s / 2.0, 2.0, 2.0};
  default:
    throw UnsupportedError("tail_metadata: " + spec.name() +
                           " is not in the sub-Weibull catalogue for stochastic FTPL");
  }
}

} // namespace pbandit

#endif // PBANDIT_PERTURBATION_HPP
