#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace ceasefire {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

// Failure categories carried by every library error; the CLI maps these to
// process exit codes.
enum class ErrorKind {
  invalid_params,
  parametric_divergence,
  singular_system,
  window_expansion,
  quadrature,
  unresolved_pair,
  no_mode_in_band,
  avoided_crossing,
  target_unreachable,
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  // fmod can return exactly 2*pi after the correction when theta is a tiny
  // negative value.
  if (t >= 2.0 * kPi) t = 0.0;
  return t;
}

}  // namespace ceasefire
