#ifndef PBANDIT_RANDOM_HPP
#define PBANDIT_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pbandit {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a named substream of a master seed. The result depends only on
/// (master, tags), never on the order in which substreams are created.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept
{
  std::uint64_t h = mix64(master);
  for (std::uint64_t t : tags) {
    h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  }
  return h;
}

/**
 * Reproducible random stream built on std::mt19937_64.
 *
 * All conversions from raw engine output to reals are done here rather than
 * through <random> distributions, whose algorithms are implementation-defined,
 * so a 64-bit seed fixes every draw on every standard library.
 */
class SeededStream {
public:
  explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

  SeededStream(std::uint64_t master, std::initializer_list<std::uint64_t> tags)
      : engine_(derive_seed(master, tags))
  {
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe for log and quantile transforms.
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n)
  {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = engine_();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal via the Marsaglia polar method (spare value cached).
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Standard exponential.
  double exponential() { return -std::log(uniform_open()); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace pbandit

#endif // PBANDIT_RANDOM_HPP
