#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dmasense {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kImagUnit{0.0, 1.0};

/// Malformed or unreadable configuration input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A scenario or type invariant does not hold; the message names it.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A matrix required to be invertible is singular or numerically
/// near-singular. Carries the estimated condition number when known.
class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& msg, double condition = 0.0)
      : std::runtime_error(msg), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

}  // namespace dmasense
