#include "martwalk/stopping.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace martwalk {

namespace {

bool fires(const StopSpec& spec, const Vector2& w, const Vector2& start,
           long time) {
  switch (spec.kind) {
    case StopSpec::Kind::ExitRect:
      return !rect_contains(spec.rect, w);
    case StopSpec::Kind::ConeHit:
      return cone_contains2(spec.cone_u, spec.cone_ell, w);
    case StopSpec::Kind::LevelGe:
      return w.dot(spec.ell) >= spec.level;
    case StopSpec::Kind::LevelLe0:
      return w.dot(spec.ell) <= 0.0;
    case StopSpec::Kind::ReturnTo:
      return w == spec.site;
    case StopSpec::Kind::StepCap:
      return time >= spec.cap;
  }
  return false;
}

int priority(StopSpec::Kind k) { return static_cast<int>(k); }

}  // namespace

EpisodeRecord run_episode(const Walk& walk, const Vector2& start,
                          const std::vector<StopSpec>& specs,
                          std::uint64_t seed, std::uint64_t trajectory_index,
                          const EpisodeOptions& options) {
  if (specs.empty()) throw std::invalid_argument("run_episode: empty spec set");
  const bool has_cap = std::any_of(
      specs.begin(), specs.end(),
      [](const StopSpec& s) { return s.kind == StopSpec::Kind::StepCap; });
  if (!has_cap)
    throw std::invalid_argument("run_episode: spec set must include a step cap");

  const bool track_y = options.transform == WatchedProcess::TransformedY;
  const std::optional<Rectangle> perp_rect = [&]() -> std::optional<Rectangle> {
    for (const auto& s : specs)
      if (s.kind == StopSpec::Kind::ExitRect) return s.rect;
    return std::nullopt;
  }();

  // The start must not sit on a firing ExitRect condition at time 0.
  for (const auto& s : specs)
    if (s.kind == StopSpec::Kind::ExitRect && !rect_contains(s.rect, start))
      throw std::invalid_argument("run_episode: start lies outside the exit rectangle");

  ProcessState state = make_state(walk, start, seed, trajectory_index);
  Vector2 compensator = Vector2::Zero();
  StepDistribution scratch;

  auto watched = [&](const Vector2& x) {
    return track_y ? Vector2(x - compensator) : x;
  };

  EpisodeRecord rec;
  if (options.record_trace) rec.trace.emplace().push_back(watched(start));

  Vector2 prev_w = watched(start);
  const Vector2 start_w = prev_w;
  for (;;) {
    if (track_y) compensator += drift(walk, state);
    advance(walk, state, scratch);
    const Vector2 w = watched(state.position);
    if (options.record_trace) rec.trace->push_back(w);

    if (perp_rect) {
      const double dev =
          std::abs((w - perp_rect->anchor).dot(perp(perp_rect->v)));
      rec.max_perp_deviation = std::max(rec.max_perp_deviation, dev);
    } else {
      rec.max_perp_deviation =
          std::max(rec.max_perp_deviation, std::abs(w[1] - start_w[1]));
    }

    int best = -1;
    for (int i = 0; i < static_cast<int>(specs.size()); ++i) {
      if (!fires(specs[i], w, start_w, state.time)) continue;
      if (best < 0 || priority(specs[i].kind) < priority(specs[best].kind))
        best = i;
    }
    if (best >= 0) {
      rec.stop_spec_index = best;
      rec.stop_reason = specs[best].kind;
      rec.stop_time = state.time;
      rec.final_position = w;
      rec.pre_exit_position = prev_w;
      rec.censored = specs[best].kind == StopSpec::Kind::StepCap;
      return rec;
    }
    prev_w = w;
  }
}

bool detect_left_exit(const Rectangle& rect, const EpisodeRecord& episode) {
  if (episode.censored)
    throw std::invalid_argument("detect_left_exit: event undefined for censored episode");
  if (episode.stop_reason != StopSpec::Kind::ExitRect)
    throw std::invalid_argument("detect_left_exit: episode did not stop on rectangle exit");
  return exit_face(rect, episode.pre_exit_position, episode.final_position) ==
         Face::Left;
}

std::vector<long> new_site_times(std::span<const Vector2> trajectory) {
  std::vector<long> times;
  std::unordered_set<std::uint64_t> seen;
  for (size_t k = 0; k < trajectory.size(); ++k)
    if (seen.insert(pack_site(trajectory[k])).second)
      times.push_back(static_cast<long>(k));
  return times;
}

}  // namespace martwalk
