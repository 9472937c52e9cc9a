#include "martwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace martwalk {

void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& fn) {
  int t = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (t < 1) t = 1;
  t = static_cast<int>(std::min<std::int64_t>(t, std::max<std::int64_t>(1, n)));
  if (t == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&, w]() {
      for (std::int64_t i = w; i < n; i += t) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

BatchResult simulate_batch(const Walk& walk, const Vector2& start, long n_steps,
                           const RunConfig& cfg,
                           const std::vector<long>& range_checkpoints) {
  if (cfg.n_traj < 1)
    throw std::invalid_argument("simulate_batch: need at least one trajectory");
  BatchResult result;
  result.summaries.resize(cfg.n_traj);
  result.range_curves.resize(cfg.n_traj);

  parallel_for(cfg.n_traj, cfg.threads, [&](std::int64_t i) {
    ProcessState state = make_state(walk, start, cfg.seed, i);
    StepDistribution scratch;
    std::unordered_set<std::uint64_t> range_set;
    range_set.reserve(static_cast<size_t>(n_steps / 2 + 4));
    range_set.insert(pack_site(start));
    const std::uint64_t start_key = pack_site(start);
    std::int64_t local_start = 1;
    double max_norm = start.norm();
    RangeCurve curve;
    size_t next_cp = 0;
    while (next_cp < range_checkpoints.size() && range_checkpoints[next_cp] == 0) {
      curve.checkpoints.emplace_back(0, 1);
      ++next_cp;
    }
    for (long k = 1; k <= n_steps; ++k) {
      advance(walk, state, scratch);
      const std::uint64_t key = pack_site(state.position);
      range_set.insert(key);
      if (key == start_key) ++local_start;
      max_norm = std::max(max_norm, state.position.norm());
      if (next_cp < range_checkpoints.size() && range_checkpoints[next_cp] == k) {
        curve.checkpoints.emplace_back(
            k, static_cast<std::int64_t>(range_set.size()));
        ++next_cp;
      }
    }
    result.summaries[i] = TrajectorySummary{
        i, n_steps, static_cast<std::int64_t>(range_set.size()), local_start,
        max_norm};
    result.range_curves[i] = std::move(curve);
  });
  return result;
}

LocalTimeField local_time_field(const Walk& walk, const Vector2& start,
                                long n_steps, std::uint64_t seed,
                                std::uint64_t trajectory_index) {
  LocalTimeField field;
  field.horizon = n_steps;
  ProcessState state = make_state(walk, start, seed, trajectory_index);
  StepDistribution scratch;
  field.counts[pack_site(start)] += 1;
  for (long k = 1; k <= n_steps; ++k) {
    advance(walk, state, scratch);
    field.counts[pack_site(state.position)] += 1;
  }
  return field;
}

Estimate estimate_event(const Walk& walk, const Vector2& start,
                        const std::vector<StopSpec>& specs,
                        const EpisodeOptions& options,
                        const std::function<bool(const EpisodeRecord&)>& event,
                        const RunConfig& cfg, bool censored_counts_as_success) {
  if (cfg.n_traj < 30)
    throw std::invalid_argument("estimate_event: need at least 30 trajectories");
  std::vector<std::uint8_t> success(cfg.n_traj, 0), censored(cfg.n_traj, 0);
  parallel_for(cfg.n_traj, cfg.threads, [&](std::int64_t i) {
    const EpisodeRecord rec = run_episode(walk, start, specs, cfg.seed, i, options);
    if (rec.censored) {
      censored[i] = 1;
      success[i] = censored_counts_as_success ? 1 : 0;
    } else {
      success[i] = event(rec) ? 1 : 0;
    }
  });
  std::int64_t k = 0, c = 0;
  for (std::int64_t i = 0; i < cfg.n_traj; ++i) {
    k += success[i];
    c += censored[i];
  }
  if (c == cfg.n_traj)
    throw std::runtime_error("estimate_event: every episode hit the step cap");
  return wilson_estimate(k, cfg.n_traj, cfg.level, c);
}

ExitProbabilityResult exit_probability(const Walk& walk, const Vector2& v,
                                       double lambda, double a, double b,
                                       double c, const Vector2& start,
                                       const RunConfig& cfg) {
  if (walk.cls != ProcessClass::Martingale)
    throw std::invalid_argument(
        "exit_probability: the exit bound assumes a martingale; '" + walk.name +
        "' is not declared one");
  if (!(lambda >= 1.0))
    throw std::invalid_argument("exit_probability: lambda must be >= 1");

  const Rectangle rect = Rectangle::make(start, v, a, b, c, lambda);
  const std::vector<StopSpec> specs = {StopSpec::exit_rect(rect),
                                       StopSpec::step_cap(cfg.step_cap)};
  ExitProbabilityResult result;
  result.rect = rect;
  result.constants = exit_constants(a, b, c, walk.params);
  result.estimate = estimate_event(
      walk, start, specs, {},
      [&rect](const EpisodeRecord& rec) { return detect_left_exit(rect, rec); },
      cfg, /*censored_counts_as_success=*/false);

  const double lambda0 = std::exp2(result.constants.log2_lambda0);
  if (std::isfinite(lambda0) && lambda >= lambda0) {
    result.vs_rho = make_bound_check(
        result.estimate, std::exp(result.constants.log_rho), BoundDirection::AtLeast);
  }
  const ThinRectRequirements req = thin_rect_requirements(b, walk.params);
  if (b == c && a >= req.a_min && lambda >= req.lambda_min) {
    result.vs_seventh =
        make_bound_check(result.estimate, kThinRectExitProb, BoundDirection::AtLeast);
  }
  return result;
}

MeanBoundCheck expected_exit_time(const Walk& walk, double b, double lambda,
                                  const RunConfig& cfg) {
  if (walk.cls != ProcessClass::Martingale)
    throw std::invalid_argument("expected_exit_time: martingale walk required");
  if (cfg.n_traj < 1000)
    throw std::invalid_argument("expected_exit_time: need at least 1000 trajectories");
  const double threshold = b * lambda;
  std::vector<double> times(cfg.n_traj, 0.0);
  std::vector<std::uint8_t> censored(cfg.n_traj, 0);
  parallel_for(cfg.n_traj, cfg.threads, [&](std::int64_t i) {
    ProcessState state = make_state(walk, Vector2::Zero(), cfg.seed, i);
    StepDistribution scratch;
    while (state.time < cfg.step_cap) {
      advance(walk, state, scratch);
      if (std::abs(state.position[0]) > threshold) break;
    }
    times[i] = static_cast<double>(state.time);
    if (std::abs(state.position[0]) <= threshold) censored[i] = 1;
  });
  std::int64_t c = 0;
  for (auto flag : censored) c += flag;

  MeanBoundCheck check;
  check.estimate = mean_estimate(times.data(), cfg.n_traj, cfg.level);
  check.bound = (b * lambda + walk.params.K) * (b * lambda + walk.params.K) /
                (walk.params.r * walk.params.r * walk.params.h);
  check.direction = BoundDirection::AtMost;
  check.censored_count = c;
  if (static_cast<double>(c) > 0.01 * static_cast<double>(cfg.n_traj)) {
    check.verdict = Verdict::Inconclusive;
  } else if (check.estimate.ci_low > check.bound) {
    check.verdict = Verdict::Violated;
  } else if (check.estimate.ci_high <= check.bound) {
    check.verdict = Verdict::Consistent;
  }
  return check;
}

BoundCheck gambler_check(const Walk& walk, double b, double lambda,
                         const RunConfig& cfg) {
  if (walk.cls != ProcessClass::Martingale)
    throw std::invalid_argument("gambler_check: martingale walk required");
  const double threshold = b * lambda;
  std::vector<std::uint8_t> left_first(cfg.n_traj, 0), censored(cfg.n_traj, 0);
  parallel_for(cfg.n_traj, cfg.threads, [&](std::int64_t i) {
    ProcessState state = make_state(walk, Vector2::Zero(), cfg.seed, i);
    StepDistribution scratch;
    while (state.time < cfg.step_cap) {
      advance(walk, state, scratch);
      if (state.position[0] < -threshold) {
        left_first[i] = 1;
        return;
      }
      if (state.position[0] > threshold) return;
    }
    censored[i] = 1;  // counted as failure: conservative for the lower bound
  });
  std::int64_t k = 0, c = 0;
  for (std::int64_t i = 0; i < cfg.n_traj; ++i) {
    k += left_first[i];
    c += censored[i];
  }
  const Estimate est = wilson_estimate(k, cfg.n_traj, cfg.level, c);
  const double bound = threshold / (2.0 * threshold + walk.params.K);
  return make_bound_check(est, bound, BoundDirection::AtLeast);
}

BoundCheck vertical_excursion(const Walk& walk, double a, double b,
                              double lambda, const RunConfig& cfg) {
  if (walk.cls != ProcessClass::Martingale)
    throw std::invalid_argument("vertical_excursion: martingale walk required");
  const auto& p = walk.params;
  const double s_lambda =
      7.0 * (b * lambda + p.K) * (b * lambda + p.K) / (p.r * p.r * p.h);
  const long horizon = static_cast<long>(std::floor(s_lambda));
  const double height = a * lambda;
  std::vector<std::uint8_t> hit(cfg.n_traj, 0);
  parallel_for(cfg.n_traj, cfg.threads, [&](std::int64_t i) {
    ProcessState state = make_state(walk, Vector2::Zero(), cfg.seed, i);
    StepDistribution scratch;
    for (long k = 1; k <= horizon; ++k) {
      advance(walk, state, scratch);
      if (std::abs(state.position[1]) >= height) {
        hit[i] = 1;
        return;
      }
    }
  });
  std::int64_t k = 0;
  for (auto flag : hit) k += flag;
  const Estimate est = wilson_estimate(k, cfg.n_traj, cfg.level, 0);
  const double bound =
      std::min(1.0, 7.0 * p.K * p.K * (b + p.K) * (b + p.K) /
                        (p.r * p.r * p.h * a * a));
  return make_bound_check(est, bound, BoundDirection::AtMost);
}

TailStats tail_statistics(const Walk& walk, long n, double gamma,
                          const RunConfig& cfg) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("tail_statistics: gamma must be in (0,1)");
  const BatchResult batch = simulate_batch(walk, Vector2::Zero(), n, cfg);
  const double local_threshold = std::pow(static_cast<double>(n), gamma);
  const double range_threshold = std::pow(static_cast<double>(n), 1.0 - gamma);
  std::int64_t local_exceed = 0, range_below = 0;
  for (const auto& s : batch.summaries) {
    if (static_cast<double>(s.local_time_at_start) > local_threshold)
      ++local_exceed;
    if (static_cast<double>(s.range) < range_threshold) ++range_below;
  }
  TailStats stats;
  stats.local_time = wilson_estimate(local_exceed, cfg.n_traj, cfg.level, 0);
  stats.range = wilson_estimate(range_below, cfg.n_traj, cfg.level, 0);
  return stats;
}

Estimate tail_local_time(const Walk& walk, long n, double gamma,
                         const RunConfig& cfg) {
  return tail_statistics(walk, n, gamma, cfg).local_time;
}

Estimate tail_range(const Walk& walk, long n, double gamma,
                    const RunConfig& cfg) {
  return tail_statistics(walk, n, gamma, cfg).range;
}

RangeExponentFit range_exponent(const Walk& walk, const std::vector<long>& n_list,
                                const RunConfig& cfg) {
  if (n_list.size() < 3)
    throw std::invalid_argument("range_exponent: need at least 3 horizons");
  std::vector<long> sorted = n_list;
  std::sort(sorted.begin(), sorted.end());
  if (static_cast<double>(sorted.back()) < 10.0 * static_cast<double>(sorted.front()))
    throw std::invalid_argument("range_exponent: horizons must span at least a decade");

  const BatchResult batch =
      simulate_batch(walk, Vector2::Zero(), sorted.back(), cfg, sorted);

  RangeExponentFit fit;
  std::vector<double> xs, ys;
  for (size_t cp = 0; cp < sorted.size(); ++cp) {
    std::vector<std::int64_t> ranges;
    ranges.reserve(batch.range_curves.size());
    for (const auto& curve : batch.range_curves)
      ranges.push_back(curve.checkpoints[cp].second);
    std::nth_element(ranges.begin(), ranges.begin() + ranges.size() / 2,
                     ranges.end());
    const double median = static_cast<double>(ranges[ranges.size() / 2]);
    fit.medians.emplace_back(sorted[cp], median);
    xs.push_back(std::log(static_cast<double>(sorted[cp])));
    ys.push_back(std::log(median));
  }
  const size_t m = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  double ss_res = 0;
  for (size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (my + fit.slope * (xs[i] - mx));
    ss_res += r * r;
  }
  fit.stderr_slope = m > 2 ? std::sqrt(ss_res / (m - 2) / sxx) : 0.0;
  return fit;
}

AvoidanceResult avoidance_probability(const Walk& walk, long n,
                                      const RunConfig& cfg) {
  if (walk.cls != ProcessClass::StrongSubmartingale || !walk.directed)
    throw std::invalid_argument(
        "avoidance_probability: strongly directed submartingale required");
  const double u = walk.directed->u;
  const Vector2 neg_ell = -walk.directed->ell;
  const Vector2 start = Vector2::Zero();
  const std::uint64_t start_key = pack_site(start);

  std::vector<std::uint8_t> y_avoid(cfg.n_traj, 0), x_avoid(cfg.n_traj, 0),
      violation(cfg.n_traj, 0);
  parallel_for(cfg.n_traj, cfg.threads, [&](std::int64_t i) {
    ProcessState state = make_state(walk, start, cfg.seed, i);
    StepDistribution scratch;
    Vector2 compensator = Vector2::Zero();
    long cone_hit = n + 1;  // min-empty sentinel: beyond the horizon
    long x_return = n + 1;
    for (long k = 1; k <= n; ++k) {
      compensator += drift(walk, state);
      advance(walk, state, scratch);
      const Vector2 y = state.position - compensator;
      if (cone_hit > n && cone_contains2(u, neg_ell, y)) cone_hit = k;
      if (x_return > n && pack_site(state.position) == start_key) x_return = k;
      if (cone_hit <= n && x_return <= n) break;
    }
    y_avoid[i] = cone_hit > n ? 1 : 0;
    x_avoid[i] = x_return > n ? 1 : 0;
    // Domination: Y-avoidance through k must imply X-avoidance through k.
    violation[i] = x_return < cone_hit ? 1 : 0;
  });
  AvoidanceResult result;
  result.horizon = n;
  std::int64_t ky = 0, kx = 0, kv = 0;
  for (std::int64_t i = 0; i < cfg.n_traj; ++i) {
    ky += y_avoid[i];
    kx += x_avoid[i];
    kv += violation[i];
  }
  result.y_side = wilson_estimate(ky, cfg.n_traj, cfg.level, 0);
  result.x_side = wilson_estimate(kx, cfg.n_traj, cfg.level, 0);
  result.domination_violations = kv;
  return result;
}

}  // namespace martwalk
