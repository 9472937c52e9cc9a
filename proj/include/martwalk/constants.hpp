#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace martwalk {

// Jump bound K, ellipticity advance r and probability h.
struct EllipticityParams {
  double K;  // >= 1
  double r;  // in (0, 1]
  double h;  // in (0, 1]

  static EllipticityParams make(double K, double r, double h) {
    if (!(K >= 1.0)) throw std::invalid_argument("EllipticityParams: K must be >= 1");
    if (!(r > 0.0 && r <= 1.0))
      throw std::invalid_argument("EllipticityParams: r must be in (0,1]");
    if (!(h > 0.0 && h <= 1.0))
      throw std::invalid_argument("EllipticityParams: h must be in (0,1]");
    return EllipticityParams{K, r, h};
  }
};

// a0, alpha0, m0 and s0 = 2^m0 * 6*K*a0. s0 is kept in log2: for realistic
// parameters 2^m0 alone dwarfs the double range.
struct BaseConstants {
  double a0;
  double alpha0;  // radians, in (0, pi/2)
  long m0;
  double log2_s0;
};

// lambda0 = s0/(a^c min); rho = exp(-m0 * ceil(2^m0 * b/(a^c min)) * ln 7).
// Both stored in log space; `approx` marks a ceiling replaced by its
// unrounded argument because the argument exceeds exact integer range.
struct ExitConstants {
  double log2_lambda0;
  double log_rho;  // < 0, possibly -inf when even the log underflows
  bool approx;
};

struct ThinRectRequirements {
  double a_min;
  double lambda_min;
};

// Success probability floor in the thin-rectangle exit bound.
inline constexpr double kThinRectExitProb = 1.0 / 7.0;
// Gambler's-ruin floor b*lambda/(2*b*lambda+K) once lambda > 3K/b.
inline constexpr double kGamblerFloor = 3.0 / 7.0;

inline BaseConstants base_constants(const EllipticityParams& p) {
  const double a0 = 7.0 * p.K * (1.0 + p.K) / (p.r * std::sqrt(p.h));
  const double alpha0 = std::atan(1.0 / (3.0 * a0));
  const long m0 = static_cast<long>(std::ceil(std::numbers::pi / alpha0));
  const double log2_s0 = static_cast<double>(m0) + std::log2(6.0 * p.K * a0);
  return BaseConstants{a0, alpha0, m0, log2_s0};
}

inline ExitConstants exit_constants(double a, double b, double c,
                                    const EllipticityParams& p) {
  if (!(a > 0 && b > 0 && c > 0))
    throw std::invalid_argument("exit_constants: a, b, c must be positive");
  const BaseConstants base = base_constants(p);
  const double side = std::min(a, c);
  const double log2_lambda0 = base.log2_s0 - std::log2(side);

  const double log2_arg = static_cast<double>(base.m0) + std::log2(b / side);
  double ceil_value;
  bool approx;
  if (log2_arg <= 52.0) {
    ceil_value = std::ceil(std::exp2(log2_arg));
    approx = false;
  } else {
    // ceil(x) ~ x with relative error <= 2^-m0 at this magnitude.
    ceil_value = std::exp2(log2_arg);  // inf when past double range
    approx = true;
  }
  const double log_rho =
      -static_cast<double>(base.m0) * ceil_value * std::log(7.0);
  return ExitConstants{log2_lambda0, log_rho, approx};
}

inline ThinRectRequirements thin_rect_requirements(double b,
                                                   const EllipticityParams& p) {
  if (!(b > 0)) throw std::invalid_argument("thin_rect_requirements: b must be positive");
  return ThinRectRequirements{7.0 * p.K * (b + p.K) / (p.r * std::sqrt(p.h)),
                              3.0 * p.K / b};
}

// Constants valid for the drift-compensated process: K' = 2K,
// r' = r*h/(2*sqrt(2)), h' = r*h/(4K).
inline EllipticityParams transformed_ellipticity(const EllipticityParams& p) {
  return EllipticityParams{2.0 * p.K, p.r * p.h / (2.0 * std::numbers::sqrt2),
                           p.r * p.h / (4.0 * p.K)};
}

}  // namespace martwalk
