#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace su2floquet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

inline constexpr const char* kEngineVersion = "1.0.0";

// Error families. The CLI maps each family onto one exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : ComputeError {
  using ComputeError::ComputeError;
};
struct ParityViolation : ComputeError {
  using ComputeError::ComputeError;
};
struct AmbiguousTracking : ComputeError {
  using ComputeError::ComputeError;
};
struct RefinementBudgetExceeded : ComputeError {
  using ComputeError::ComputeError;
};
struct InsufficientLevels : ComputeError {
  using ComputeError::ComputeError;
};
struct EmptyWindow : ComputeError {
  using ComputeError::ComputeError;
};
struct NonPowerOfTwo : ComputeError {
  using ComputeError::ComputeError;
};

struct ParseError : IoError {
  ParseError(const std::string& what, long line)
      : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

struct SchemaMismatch : IoError {
  using IoError::IoError;
};

/// Wraps an angle into [0, 2pi).
inline double wrap_phase(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Wraps an angle difference into (-pi, pi].
inline double wrap_difference(double d) {
  double r = std::remainder(d, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

inline double circular_distance(double a, double b) {
  return std::abs(wrap_difference(a - b));
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace su2floquet
