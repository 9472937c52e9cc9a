#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "martwalk/montecarlo.hpp"

using namespace martwalk;

TEST_CASE("wilson estimate") {
  const Estimate sure = wilson_estimate(100, 100);
  CHECK(sure.p_hat == 1.0);
  CHECK(sure.ci_high >= 1.0 - 1e-12);
  CHECK(sure.ci_low > 0.95);

  const Estimate half = wilson_estimate(5000, 10000);
  CHECK(half.ci_low < 0.5);
  CHECK(half.ci_high > 0.5);

  // Interval width shrinks like n^(-1/2).
  const double w1 = wilson_estimate(50, 100).ci_high - wilson_estimate(50, 100).ci_low;
  const double w2 =
      wilson_estimate(5000, 10000).ci_high - wilson_estimate(5000, 10000).ci_low;
  CHECK(w2 == doctest::Approx(w1 / 10.0).epsilon(0.05));

  CHECK_THROWS_AS(wilson_estimate(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(wilson_estimate(11, 10), std::invalid_argument);
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963985).epsilon(1e-8));
}

TEST_CASE("bound check trichotomy") {
  const Estimate e = wilson_estimate(500, 1000);
  CHECK(make_bound_check(e, 0.2, BoundDirection::AtLeast).verdict ==
        Verdict::Consistent);
  CHECK(make_bound_check(e, 0.8, BoundDirection::AtLeast).verdict ==
        Verdict::Violated);
  CHECK(make_bound_check(e, 0.5, BoundDirection::AtLeast).verdict ==
        Verdict::Inconclusive);
  CHECK(make_bound_check(e, 0.8, BoundDirection::AtMost).verdict ==
        Verdict::Consistent);
  CHECK(make_bound_check(e, 0.2, BoundDirection::AtMost).verdict ==
        Verdict::Violated);
}

TEST_CASE("simulate batch invariants") {
  const Walk walk = srw2d();
  RunConfig cfg;
  cfg.n_traj = 50;
  cfg.seed = 99;
  const auto batch = simulate_batch(walk, Vector2::Zero(), 100, cfg);
  for (const auto& s : batch.summaries) {
    CHECK(s.local_time_at_start >= 1);  // the k = 0 term
    CHECK(s.range <= 101);
    CHECK(s.range >= 1);
  }
  CHECK_THROWS_AS(simulate_batch(walk, Vector2::Zero(), 10, RunConfig{0, 1}),
                  std::invalid_argument);
}

TEST_CASE("local time field sums to n + 1") {
  const Walk walk = axis_trap_walk();
  const auto field = local_time_field(walk, Vector2::Zero(), 500, 4, 2);
  std::int64_t total = 0;
  for (const auto& [site, count] : field.counts) total += count;
  CHECK(total == 501);
}

TEST_CASE("srw2d median range near n / ln n") {
  const Walk walk = srw2d();
  RunConfig cfg;
  cfg.n_traj = 200;
  cfg.seed = 7;
  const long n = 10'000;
  const auto batch = simulate_batch(walk, Vector2::Zero(), n, cfg);
  std::vector<std::int64_t> ranges;
  for (const auto& s : batch.summaries) ranges.push_back(s.range);
  std::nth_element(ranges.begin(), ranges.begin() + ranges.size() / 2,
                   ranges.end());
  const double median = static_cast<double>(ranges[ranges.size() / 2]);
  const double reference = std::numbers::pi * n / std::log(n);  // ~3.4e3
  CHECK(median >= 0.5 * reference);
  CHECK(median <= 1.5 * reference);
}

TEST_CASE("estimate event") {
  const Walk walk = srw2d();
  const Rectangle rect =
      Rectangle::make(Vector2::Zero(), Vector2(1, 0), 1, 1, 1, 2);
  RunConfig cfg;
  cfg.n_traj = 100;
  cfg.seed = 5;
  const auto est = estimate_event(
      walk, Vector2::Zero(),
      {StopSpec::exit_rect(rect), StopSpec::step_cap(100000)}, {},
      [](const EpisodeRecord&) { return true; }, cfg);
  CHECK(est.p_hat == 1.0);
  CHECK(est.censored_count == 0);

  RunConfig tiny = cfg;
  tiny.n_traj = 10;
  CHECK_THROWS_AS(
      estimate_event(walk, Vector2::Zero(),
                     {StopSpec::exit_rect(rect), StopSpec::step_cap(100000)},
                     {}, [](const EpisodeRecord&) { return true; }, tiny),
      std::invalid_argument);
}

TEST_CASE("exit probability gating") {
  RunConfig cfg;
  cfg.n_traj = 100;
  cfg.seed = 31;
  const Walk sub = excited_walk(0.3, Vector2(1, 0));
  CHECK_THROWS_AS(exit_probability(sub, Vector2(1, 0), 10, 1, 1, 1,
                                   Vector2::Zero(), cfg),
                  std::invalid_argument);

  const Walk walk = srw2d();
  // lambda below 3K/b: the thin-rectangle check must be omitted.
  const auto low = exit_probability(walk, Vector2(1, 0), 2, 56, 1, 1,
                                    Vector2::Zero(), cfg);
  CHECK_FALSE(low.vs_seventh.has_value());
  // All preconditions met: the check is attached.
  const auto ok = exit_probability(walk, Vector2(1, 0), 10, 56, 1, 1,
                                   Vector2::Zero(), cfg);
  CHECK(ok.vs_seventh.has_value());
  CHECK_FALSE(ok.vs_rho.has_value());  // lambda0 far beyond double range
}

TEST_CASE("expected exit time matches the first-passage oracle") {
  const Walk walk = srw2d();
  const double b = 1.0, lambda = 3.0;
  RunConfig cfg;
  cfg.n_traj = 2000;
  cfg.seed = 8;

  // Oracle: linear system for the lazy projected birth-death chain on
  // {-3,...,3} absorbed beyond |3|: E_i = 1 + E_i/2 + E_{i-1}/4 + E_{i+1}/4.
  const int m = 3;
  const int dim = 2 * m + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(dim);
  for (int i = 0; i < dim; ++i) {
    A(i, i) = 0.5;
    if (i > 0) A(i, i - 1) = -0.25;
    if (i + 1 < dim) A(i, i + 1) = -0.25;
  }
  const Eigen::VectorXd expect = A.lu().solve(rhs);
  const double oracle = expect[m];
  CHECK(oracle == doctest::Approx(2.0 * (m + 1) * (m + 1)).epsilon(1e-9));  // 32

  const auto check = expected_exit_time(walk, b, lambda, cfg);
  const double width = check.estimate.ci_high - check.estimate.ci_low;
  CHECK(std::abs(check.estimate.mean - oracle) <= 3.0 * width);
  CHECK(check.bound == doctest::Approx(256.0));  // (3+1)^2 / (0.25 * 0.25)
  CHECK(check.verdict == Verdict::Consistent);

  RunConfig small = cfg;
  small.n_traj = 100;
  CHECK_THROWS_AS(expected_exit_time(walk, b, lambda, small),
                  std::invalid_argument);
}

TEST_CASE("gambler check on a symmetric walk") {
  const Walk walk = srw2d();
  RunConfig cfg;
  cfg.n_traj = 4000;
  cfg.seed = 12;
  const auto check = gambler_check(walk, 1.0, 3.0, cfg);
  CHECK(check.bound == doctest::Approx(3.0 / 7.0));
  CHECK(check.estimate.ci_low < 0.5);
  CHECK(check.estimate.ci_high > 0.5);
  CHECK(check.verdict == Verdict::Consistent);
}

TEST_CASE("vertical excursion bound clamps at one") {
  const Walk walk = srw2d();
  RunConfig cfg;
  cfg.n_traj = 100;
  cfg.seed = 3;
  // Small a: the closed-form bound exceeds 1 and the check auto-passes.
  const auto loose = vertical_excursion(walk, 0.5, 1.0, 2.0, cfg);
  CHECK(loose.bound == 1.0);
  CHECK(loose.verdict == Verdict::Consistent);
}

TEST_CASE("tail range trivial threshold") {
  const Walk walk = srw2d();
  RunConfig cfg;
  cfg.n_traj = 50;
  cfg.seed = 17;
  // n^(1-gamma) close to 1: the range (always >= 2 here) never falls below.
  const auto est = tail_range(walk, 1000, 0.999, cfg);
  CHECK(est.p_hat == 0.0);
  CHECK_THROWS_AS(tail_range(walk, 1000, 1.5, cfg), std::invalid_argument);
}

TEST_CASE("range exponent input validation") {
  const Walk walk = srw2d();
  RunConfig cfg;
  cfg.n_traj = 30;
  cfg.seed = 2;
  CHECK_THROWS_AS(range_exponent(walk, {100, 1000}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(range_exponent(walk, {100, 200, 400}, cfg),
                  std::invalid_argument);  // span below a decade
}

TEST_CASE("avoidance probability and paired domination") {
  const Walk walk = excited_walk(0.3, Vector2(1, 0));
  RunConfig cfg;
  cfg.n_traj = 500;
  cfg.seed = 41;
  const auto result = avoidance_probability(walk, 200, cfg);
  CHECK(result.y_side.p_hat > 0.0);
  CHECK(result.domination_violations == 0);
  // Path-by-path domination implies the estimates are ordered.
  CHECK(result.x_side.p_hat >= result.y_side.p_hat);

  const Walk mart = srw2d();
  CHECK_THROWS_AS(avoidance_probability(mart, 100, cfg), std::invalid_argument);
}

TEST_CASE("results are independent of the thread count") {
  const Walk walk = srw2d();
  RunConfig one;
  one.n_traj = 300;
  one.seed = 55;
  one.threads = 1;
  RunConfig many = one;
  many.threads = 3;
  const auto a = tail_statistics(walk, 500, 0.45, one);
  const auto b = tail_statistics(walk, 500, 0.45, many);
  CHECK(a.local_time.successes == b.local_time.successes);
  CHECK(a.range.successes == b.range.successes);

  const auto ga = gambler_check(walk, 1.0, 3.0, {1000, 5, 1});
  const auto gb = gambler_check(walk, 1.0, 3.0, {1000, 5, 4});
  CHECK(ga.estimate.p_hat == gb.estimate.p_hat);
}
