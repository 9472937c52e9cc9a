#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace martwalk {

// Standard normal quantile (Acklam's rational approximation refined by one
// Halley step against std::erfc; accurate to full double precision).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425, p_high = 1.0 - p_low;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= p_high) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

// Binomial proportion with Wilson score interval.
struct Estimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double level = 0.95;
  std::int64_t censored_count = 0;
};

inline Estimate wilson_estimate(std::int64_t k, std::int64_t n, double level = 0.95,
                                std::int64_t censored = 0) {
  if (n <= 0) throw std::invalid_argument("wilson_estimate: trials must be positive");
  if (k < 0 || k > n)
    throw std::invalid_argument("wilson_estimate: successes out of range");
  const double z = normal_quantile(0.5 + level / 2.0);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Estimate e;
  e.successes = k;
  e.trials = n;
  e.p_hat = p;
  e.ci_low = std::max(0.0, center - half);
  e.ci_high = std::min(1.0, center + half);
  e.level = level;
  e.censored_count = censored;
  return e;
}

enum class BoundDirection { AtLeast, AtMost };
enum class Verdict { Consistent, Violated, Inconclusive };

// Monte Carlo verdict against a one-sided theoretical bound.
struct BoundCheck {
  Estimate estimate;
  double bound = 0.0;
  BoundDirection direction = BoundDirection::AtLeast;
  Verdict verdict = Verdict::Inconclusive;
};

inline BoundCheck make_bound_check(const Estimate& est, double bound,
                                   BoundDirection dir) {
  BoundCheck check{est, bound, dir, Verdict::Inconclusive};
  if (dir == BoundDirection::AtLeast) {
    if (est.ci_high < bound)
      check.verdict = Verdict::Violated;
    else if (est.ci_low >= bound)
      check.verdict = Verdict::Consistent;
  } else {
    if (est.ci_low > bound)
      check.verdict = Verdict::Violated;
    else if (est.ci_high <= bound)
      check.verdict = Verdict::Consistent;
  }
  return check;
}

// Sample mean with normal-approximation interval.
struct MeanEstimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double stddev = 0.0;
  std::int64_t n = 0;
  double level = 0.95;
  bool heavy_tail_warning = false;  // sample excess kurtosis > 20
};

inline MeanEstimate mean_estimate(const double* values, std::int64_t n,
                                  double level = 0.95) {
  if (n < 2) throw std::invalid_argument("mean_estimate: need at least two samples");
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) sum += values[i];
  const double mean = sum / static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / static_cast<double>(n - 1);
  const double sd = std::sqrt(var);
  const double z = normal_quantile(0.5 + level / 2.0);
  const double half = z * sd / std::sqrt(static_cast<double>(n));
  MeanEstimate e;
  e.mean = mean;
  e.ci_low = mean - half;
  e.ci_high = mean + half;
  e.stddev = sd;
  e.n = n;
  e.level = level;
  if (m2 > 0.0) {
    const double kurt =
        static_cast<double>(n) * m4 / (m2 * m2) - 3.0;
    e.heavy_tail_warning = kurt > 20.0;
  }
  return e;
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "CONSISTENT";
    case Verdict::Violated: return "VIOLATED";
    default: return "INCONCLUSIVE";
  }
}

inline const char* to_string(BoundDirection d) {
  return d == BoundDirection::AtLeast ? "AT_LEAST" : "AT_MOST";
}

}  // namespace martwalk
