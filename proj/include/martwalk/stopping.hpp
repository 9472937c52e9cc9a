#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "martwalk/geometry.hpp"
#include "martwalk/process.hpp"

namespace martwalk {

// Stopping conditions, listed in tie-break priority order.
struct StopSpec {
  enum class Kind { ExitRect, ConeHit, LevelGe, LevelLe0, ReturnTo, StepCap };

  Kind kind;
  Rectangle rect = Rectangle{Vector2::Zero(), Vector2(1, 0), 1, 1, 1, 1};
  double cone_u = 1.0;
  Vector2 cone_ell = Vector2(1, 0);
  Vector2 ell = Vector2(1, 0);  // for level conditions
  double level = 0.0;
  Vector2 site = Vector2::Zero();
  long cap = 0;

  static StopSpec exit_rect(Rectangle r) {
    StopSpec s{Kind::ExitRect};
    s.rect = r;
    return s;
  }
  static StopSpec cone_hit(double u, Vector2 axis) {
    StopSpec s{Kind::ConeHit};
    s.cone_u = u;
    s.cone_ell = axis;
    return s;
  }
  static StopSpec level_ge(Vector2 ell, double k) {
    StopSpec s{Kind::LevelGe};
    s.ell = ell;
    s.level = k;
    return s;
  }
  static StopSpec level_le0(Vector2 ell) {
    StopSpec s{Kind::LevelLe0};
    s.ell = ell;
    return s;
  }
  static StopSpec return_to(Vector2 site) {
    StopSpec s{Kind::ReturnTo};
    s.site = site;
    return s;
  }
  static StopSpec step_cap(long n) {
    StopSpec s{Kind::StepCap};
    s.cap = n;
    return s;
  }
};

// Which coordinate stream the stopping predicates watch.
enum class WatchedProcess { RawX, TransformedY };

struct EpisodeRecord {
  StopSpec::Kind stop_reason = StopSpec::Kind::StepCap;
  int stop_spec_index = -1;
  long stop_time = 0;
  Vector2 final_position = Vector2::Zero();     // watched process at stop_time
  Vector2 pre_exit_position = Vector2::Zero();  // watched process at stop_time - 1
  bool censored = false;
  double max_perp_deviation = 0.0;
  std::optional<std::vector<Vector2>> trace;  // watched positions 0..stop_time
};

struct EpisodeOptions {
  WatchedProcess transform = WatchedProcess::RawX;
  bool record_trace = false;
};

// Run one walk until the earliest k >= 1 at which a spec fires. The spec set
// must contain a StepCap; hitting the cap marks the episode censored.
EpisodeRecord run_episode(const Walk& walk, const Vector2& start,
                          const std::vector<StopSpec>& specs,
                          std::uint64_t seed, std::uint64_t trajectory_index,
                          const EpisodeOptions& options = {});

// True iff the exit segment of a non-censored ExitRect episode crosses the
// closed left face.
bool detect_left_exit(const Rectangle& rect, const EpisodeRecord& episode);

// Times at which the trajectory enters previously unvisited sites; starts
// with 0 and has one entry per distinct visited site.
std::vector<long> new_site_times(std::span<const Vector2> trajectory);

}  // namespace martwalk
