#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "martwalk/constants.hpp"
#include "martwalk/geometry.hpp"
#include "martwalk/rng.hpp"

namespace martwalk {

enum class ProcessClass { Martingale, StrongSubmartingale, General };

// Declared drift cone for strongly directed walks (plane = R^2 for built-ins).
struct DirectedSpec {
  double u;
  Vector2 ell;
};

// Finite conditional step law at one state.
struct StepDistribution {
  struct Entry {
    Vector2 jump;
    double prob;
  };
  static constexpr int kCapacity = 8;

  Entry entries[kCapacity];
  int count = 0;

  void clear() { count = 0; }
  void add(const Vector2& jump, double prob) { entries[count++] = {jump, prob}; }
  std::span<const Entry> items() const { return {entries, static_cast<size_t>(count)}; }
};

inline std::uint64_t pack_site(const Vector2& p) {
  const auto x = static_cast<std::uint32_t>(static_cast<std::int32_t>(std::llround(p[0])));
  const auto y = static_cast<std::uint32_t>(static_cast<std::int32_t>(std::llround(p[1])));
  return (static_cast<std::uint64_t>(x) << 32) | y;
}

struct ProcessState {
  Vector2 position = Vector2::Zero();
  long time = 0;
  bool at_fresh_site = true;  // current site entered for the first time
  std::unordered_set<std::uint64_t> visited;  // populated only when tracked
  CounterRng rng;
};

struct Walk {
  std::string name;
  EllipticityParams params;
  ProcessClass cls = ProcessClass::General;
  std::optional<DirectedSpec> directed;
  bool tracks_visits = false;
  // Deterministic function of the state contents only.
  std::function<void(const ProcessState&, StepDistribution&)> kernel;
};

// --- Built-in walks -------------------------------------------------------

Walk srw2d();
Walk axis_trap_walk();
Walk excited_walk(double beta, const Vector2& ell, double u = 1.0);
Walk radial_sector_walk(int radial_reach, double p);

// Registry used by the CLI: name plus numeric parameters.
// Known names: "srw2d", "axis-trap", "excited", "radial-sector".
Walk make_walk(const std::string& name, const std::vector<double>& params);
std::vector<std::string> walk_registry();

// --- State machinery ------------------------------------------------------

ProcessState make_state(const Walk& walk, const Vector2& start,
                        std::uint64_t seed, std::uint64_t trajectory_index);

// Exact conditional drift from the kernel.
Vector2 drift(const Walk& walk, const ProcessState& state);

// Advance one step in place; `scratch` is a reusable kernel buffer.
void advance(const Walk& walk, ProcessState& state, StepDistribution& scratch);

// Value-returning variant of advance.
ProcessState step(const Walk& walk, ProcessState state);

// --- Definition checkers --------------------------------------------------

bool check_bounded_jumps(const Walk& walk, std::span<const ProcessState> states);

struct EllipticityVerdict {
  bool pass = false;
  std::vector<int> failing_directions;  // grid indices
  int n_dirs = 0;
  // A finite grid can falsify but not certify the all-directions claim.
  bool grid_certificate_only = true;
};

EllipticityVerdict check_ellipticity(const Walk& walk, const ProcessState& state,
                                     int n_dirs);

// Same check against an explicit step law and (r, h); used for the
// drift-compensated kernel as well.
EllipticityVerdict check_ellipticity_kernel(const StepDistribution& dist,
                                            double r, double h, int n_dirs);

bool check_strong_direction(const Walk& walk, const ProcessState& state,
                            const Cone& cone);
bool check_strong_direction2(const Walk& walk, const ProcessState& state,
                             double u, const Vector2& ell);

// --- Transform and Lyapunov ----------------------------------------------

struct TrajectoryPoint {
  Vector2 position;
  Vector2 drift;
};

// Drift-compensated trajectory: Y_0 = X_0, Y_n = X_n - sum_{k<n} drift_k.
std::vector<Vector2> martingale_transform(std::span<const TrajectoryPoint> trajectory);

// E(||x + jump||^b) - ||x||^b, exact over the kernel. b in (0,1), x != 0.
double lyapunov_margin(const Walk& walk, const ProcessState& state, double b);

}  // namespace martwalk
