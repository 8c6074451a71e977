#ifndef PBANDIT_ERRORS_HPP
#define PBANDIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pbandit {

/// Invalid construction parameters (bad shape, inconsistent policy/perturbation pairing).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation requested on a distribution that does not support it.
class UnsupportedError : public std::logic_error {
public:
  explicit UnsupportedError(const std::string& what) : std::logic_error(what) {}
};

/// Iterative solver failed to converge.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of a function: std::domain_error.

} // namespace pbandit

#endif // PBANDIT_ERRORS_HPP
