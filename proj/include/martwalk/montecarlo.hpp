#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "martwalk/constants.hpp"
#include "martwalk/process.hpp"
#include "martwalk/stats.hpp"
#include "martwalk/stopping.hpp"

namespace martwalk {

// Per-site visit counts over one trajectory; sums to horizon + 1.
struct LocalTimeField {
  std::map<std::uint64_t, std::int64_t> counts;
  long horizon = 0;
};

struct RangeCurve {
  std::vector<std::pair<long, std::int64_t>> checkpoints;  // (n, |range by n|)
};

struct TrajectorySummary {
  std::int64_t trajectory_index = 0;
  long n = 0;
  std::int64_t range = 0;
  std::int64_t local_time_at_start = 0;
  double max_norm = 0.0;
};

struct BatchResult {
  std::vector<TrajectorySummary> summaries;
  std::vector<RangeCurve> range_curves;
};

struct RunConfig {
  std::int64_t n_traj = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  double level = 0.95;
  long step_cap = 1'000'000;
};

// Deterministic given the seed; trajectory streams are independent by
// construction, so the thread count never changes any number.
BatchResult simulate_batch(const Walk& walk, const Vector2& start, long n_steps,
                           const RunConfig& cfg,
                           const std::vector<long>& range_checkpoints = {});

// Full local-time field of a single trajectory (test and diagnostic use).
LocalTimeField local_time_field(const Walk& walk, const Vector2& start,
                                long n_steps, std::uint64_t seed,
                                std::uint64_t trajectory_index);

// Generic event-probability estimator over stopped episodes. Censored
// episodes are counted as failures when `censored_counts_as_success` is
// false (the conservative side for lower-bound events) and reported.
Estimate estimate_event(const Walk& walk, const Vector2& start,
                        const std::vector<StopSpec>& specs,
                        const EpisodeOptions& options,
                        const std::function<bool(const EpisodeRecord&)>& event,
                        const RunConfig& cfg,
                        bool censored_counts_as_success = false);

struct ExitProbabilityResult {
  Estimate estimate;
  std::optional<BoundCheck> vs_rho;      // attached only when lambda >= lambda0 is representable
  std::optional<BoundCheck> vs_seventh;  // attached when the thin-rectangle preconditions hold
  ExitConstants constants;
  Rectangle rect;
};

// Left-exit probability from R^{a,b,c}_{v,lambda}(start).
ExitProbabilityResult exit_probability(const Walk& walk, const Vector2& v,
                                       double lambda, double a, double b,
                                       double c, const Vector2& start,
                                       const RunConfig& cfg);

struct MeanBoundCheck {
  MeanEstimate estimate;
  double bound = 0.0;
  BoundDirection direction = BoundDirection::AtMost;
  Verdict verdict = Verdict::Inconclusive;
  std::int64_t censored_count = 0;
};

// Mean first time |X.e1| > b*lambda, checked against (b*lambda+K)^2/(r^2 h).
MeanBoundCheck expected_exit_time(const Walk& walk, double b, double lambda,
                                  const RunConfig& cfg);

// P[exit left before right at level b*lambda] vs b*lambda/(2*b*lambda+K).
BoundCheck gambler_check(const Walk& walk, double b, double lambda,
                         const RunConfig& cfg);

// P[max vertical excursion >= a*lambda within floor(s_lambda) steps] vs
// min(1, 7*K^2*(b+K)^2/(r^2*h*a^2)).
BoundCheck vertical_excursion(const Walk& walk, double a, double b,
                              double lambda, const RunConfig& cfg);

Estimate tail_local_time(const Walk& walk, long n, double gamma,
                         const RunConfig& cfg);
Estimate tail_range(const Walk& walk, long n, double gamma,
                    const RunConfig& cfg);

struct TailStats {
  Estimate local_time;  // P[L_n(start) > n^gamma]
  Estimate range;       // P[|R_n| < n^(1-gamma)]
};

// Both tail estimates from one simulation pass.
TailStats tail_statistics(const Walk& walk, long n, double gamma,
                          const RunConfig& cfg);

struct RangeExponentFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  std::vector<std::pair<long, double>> medians;  // (n, median range)
};

// Least-squares slope of log median range against log n.
RangeExponentFit range_exponent(const Walk& walk, const std::vector<long>& n_list,
                                const RunConfig& cfg);

struct AvoidanceResult {
  Estimate y_side;  // P[Y stays outside the opposite cone through n]
  Estimate x_side;  // P[X avoids its start site through n]
  std::int64_t domination_violations = 0;  // paths with Y-avoidance but X-return
  long horizon = 0;
};

// Cone-avoidance probability of the drift-compensated process, with the
// paired X-side comparison evaluated path by path.
AvoidanceResult avoidance_probability(const Walk& walk, long n,
                                      const RunConfig& cfg);

// Deterministic static-chunk parallel map over [0, n).
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace martwalk
