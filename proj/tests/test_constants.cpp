#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "martwalk/constants.hpp"

using namespace martwalk;
using big_float = boost::multiprecision::cpp_bin_float_100;

namespace {

// Independent high-precision route for every explicit constant.
struct BigConstants {
  big_float a0, alpha0, log2_s0, log2_lambda0, log_rho;
  long m0;
};

BigConstants big_evaluate(double K, double r, double h, double a, double b,
                          double c) {
  const big_float bK = K, br = r, bh = h;
  BigConstants out;
  out.a0 = 7 * bK * (1 + bK) / (br * sqrt(bh));
  out.alpha0 = atan(1 / (3 * out.a0));
  const big_float pi = boost::math::constants::pi<big_float>();
  out.m0 = static_cast<long>(ceil(pi / out.alpha0));
  out.log2_s0 = out.m0 + log(6 * bK * out.a0) / log(big_float(2));
  const big_float side = std::min(a, c);
  out.log2_lambda0 = out.log2_s0 - log(side) / log(big_float(2));
  const big_float arg = pow(big_float(2), out.m0) * b / side;
  out.log_rho = -out.m0 * ceil(arg) * log(big_float(7));
  return out;
}

double rel_err(double got, const big_float& want) {
  const big_float diff = abs(big_float(got) - want);
  return static_cast<double>(diff / abs(want));
}

}  // namespace

TEST_CASE("base constants at the reference parameters") {
  const auto p = EllipticityParams::make(1.0, 0.5, 0.25);
  const auto base = base_constants(p);
  CHECK(base.a0 == 56.0);  // 7*1*2 / (0.5*0.5)
  CHECK(base.alpha0 == doctest::Approx(std::atan(1.0 / 168.0)).epsilon(1e-15));
  CHECK(base.alpha0 == doctest::Approx(5.9523e-3).epsilon(1e-3));

  const auto big = big_evaluate(1.0, 0.5, 0.25, 1, 1, 1);
  CHECK(base.m0 == big.m0);
  CHECK(base.log2_s0 ==
        doctest::Approx(static_cast<double>(base.m0) + std::log2(336.0)));
  CHECK(std::log2(336.0) == doctest::Approx(8.3923).epsilon(1e-4));
}

TEST_CASE("base constants bracket pi with the angle step") {
  for (const auto& [K, r, h] : {std::tuple{1.0, 0.5, 0.25},
                                std::tuple{2.0, 1.0, 1.0},
                                std::tuple{1.0, 0.1, 0.01}}) {
    const auto base = base_constants(EllipticityParams::make(K, r, h));
    CHECK(base.m0 * base.alpha0 >= std::numbers::pi);
    CHECK((base.m0 - 1) * base.alpha0 < std::numbers::pi);
  }
}

TEST_CASE("exit constants in log space") {
  const auto p = EllipticityParams::make(1.0, 0.5, 0.25);
  const auto base = base_constants(p);
  const auto exit = exit_constants(1, 1, 1, p);
  CHECK(exit.log2_lambda0 == exit_constants(1, 1, 1, p).log2_lambda0);
  CHECK(exit.log2_lambda0 == doctest::Approx(base.log2_s0));  // a^c min = 1
  CHECK(exit.log_rho < 0.0);
  // -m0 * 2^m0 * ln 7 is astronomically large in magnitude but finite.
  CHECK(std::isfinite(exit.log_rho));
  CHECK(exit.approx);  // 2^m0 exceeds exact integer range

  // Doubling b scales log_rho accordingly (up to ceiling granularity).
  const auto exit2 = exit_constants(1, 2, 1, p);
  CHECK(exit2.log_rho == doctest::Approx(2.0 * exit.log_rho).epsilon(1e-9));
  CHECK(exit2.log_rho < exit.log_rho);  // strictly more negative
}

TEST_CASE("exit constants are monotone in the short side") {
  const auto p = EllipticityParams::make(1.0, 0.5, 0.25);
  const auto narrow = exit_constants(0.5, 1, 0.5, p);
  const auto wide = exit_constants(2.0, 1, 2.0, p);
  CHECK(wide.log_rho >= narrow.log_rho);
  CHECK(wide.log2_lambda0 < narrow.log2_lambda0);
}

TEST_CASE("thin rectangle requirements") {
  const auto p = EllipticityParams::make(1.0, 0.5, 0.25);
  const auto req = thin_rect_requirements(1.0, p);
  CHECK(req.a_min == 56.0);
  CHECK(req.lambda_min == 3.0);
  CHECK(thin_rect_requirements(10.0, p).lambda_min <
        thin_rect_requirements(1.0, p).lambda_min);
  CHECK_THROWS_AS(thin_rect_requirements(0.0, p), std::invalid_argument);
}

TEST_CASE("transformed ellipticity constants") {
  const auto p = EllipticityParams::make(1.0, 0.5, 0.25);
  const auto t = transformed_ellipticity(p);
  CHECK(t.K == 2.0);
  CHECK(t.r == doctest::Approx(0.0441942).epsilon(1e-5));
  CHECK(t.h == 0.03125);
  CHECK(t.r <= p.r);
  CHECK(t.h <= p.h);

  const auto t1 = transformed_ellipticity(EllipticityParams::make(1, 1, 1));
  CHECK(t1.K == 2.0);
  CHECK(t1.r == doctest::Approx(1.0 / (2.0 * std::numbers::sqrt2)));
  CHECK(t1.h == 0.25);
}

TEST_CASE("all constants match an arbitrary-precision oracle") {
  const std::tuple<double, double, double, double, double, double> cases[] = {
      {1.0, 0.5, 0.25, 1, 1, 1},
      {1.0, 0.5, 0.25, 56, 1, 1},
      {2.0, 0.3, 0.1, 3, 2, 5},
      {1.5, 1.0, 0.5, 0.25, 4, 0.75},
  };
  for (const auto& [K, r, h, a, b, c] : cases) {
    const auto p = EllipticityParams::make(K, r, h);
    const auto base = base_constants(p);
    const auto exit = exit_constants(a, b, c, p);
    const auto big = big_evaluate(K, r, h, a, b, c);
    CHECK(rel_err(base.a0, big.a0) <= 1e-9);
    CHECK(rel_err(base.alpha0, big.alpha0) <= 1e-9);
    CHECK(base.m0 == big.m0);
    CHECK(rel_err(base.log2_s0, big.log2_s0) <= 1e-9);
    CHECK(rel_err(exit.log2_lambda0, big.log2_lambda0) <= 1e-9);
    // Ceiling granularity is below 2^-m0, so log-space agreement at 1e-9
    // holds even for the APPROX route -- unless even ln(rho) overflows a
    // double, in which case the stored value must be -inf.
    if (-big.log_rho > big_float(std::numeric_limits<double>::max())) {
      CHECK(exit.log_rho == -std::numeric_limits<double>::infinity());
    } else {
      CHECK(rel_err(exit.log_rho, big.log_rho) <= 1e-9);
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(EllipticityParams::make(0.5, 0.5, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(EllipticityParams::make(1.0, 0.0, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(EllipticityParams::make(1.0, 0.5, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(exit_constants(0, 1, 1, EllipticityParams::make(1, 0.5, 0.25)),
                  std::invalid_argument);
}
