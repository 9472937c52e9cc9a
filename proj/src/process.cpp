#include "martwalk/process.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace martwalk {

namespace {

void srw_kernel(StepDistribution& out) {
  out.clear();
  out.add(Vector2(1, 0), 0.25);
  out.add(Vector2(-1, 0), 0.25);
  out.add(Vector2(0, 1), 0.25);
  out.add(Vector2(0, -1), 0.25);
}

// Nearest nonzero lattice vector when rounding collapses to zero.
Vector2 round_nonzero(const Vector2& v) {
  Vector2 j(std::round(v[0]), std::round(v[1]));
  if (j[0] != 0.0 || j[1] != 0.0) return j;
  if (std::abs(v[0]) >= std::abs(v[1]))
    return Vector2(v[0] >= 0 ? 1 : -1, 0);
  return Vector2(0, v[1] >= 0 ? 1 : -1);
}

}  // namespace

Walk srw2d() {
  Walk w;
  w.name = "srw2d";
  w.params = EllipticityParams::make(1.0, 0.5, 0.25);
  w.cls = ProcessClass::Martingale;
  w.kernel = [](const ProcessState&, StepDistribution& out) { srw_kernel(out); };
  return w;
}

Walk axis_trap_walk() {
  Walk w;
  w.name = "axis-trap";
  w.params = EllipticityParams::make(1.0, 0.5, 1.0 / 6.0);
  w.cls = ProcessClass::General;  // submartingale in e1 but not strongly directed
  w.kernel = [](const ProcessState& s, StepDistribution& out) {
    const double y = s.position[1];
    if (y == 0.0) {
      srw_kernel(out);
      return;
    }
    out.clear();
    out.add(Vector2(1, 0), 0.25);
    out.add(Vector2(-1, 0), 0.25);
    const double away = y > 0.0 ? 1.0 : -1.0;
    out.add(Vector2(0, away), 1.0 / 6.0);   // |y| increases
    out.add(Vector2(0, -away), 1.0 / 3.0);  // |y| decreases
  };
  return w;
}

Walk excited_walk(double beta, const Vector2& ell, double u) {
  if (!(beta > 0.0 && beta < 0.5))
    throw std::invalid_argument("excited_walk: beta must be in (0, 1/2)");
  const bool axis_unit =
      (std::abs(std::abs(ell[0]) - 1.0) < kUnitTol && ell[1] == 0.0) ||
      (std::abs(std::abs(ell[1]) - 1.0) < kUnitTol && ell[0] == 0.0);
  if (!axis_unit)
    throw std::invalid_argument("excited_walk: ell must be one of the four axis unit vectors");
  if (!(u > 0.0 && u <= 1.0))
    throw std::invalid_argument("excited_walk: u must be in (0,1]");
  Walk w;
  w.name = "excited";
  w.params = EllipticityParams::make(1.0, 0.5, 0.25 - beta / 2.0);
  w.cls = ProcessClass::StrongSubmartingale;
  w.directed = DirectedSpec{u, ell};
  w.tracks_visits = true;
  const Vector2 fwd = ell;
  const Vector2 side = perp(ell);
  w.kernel = [beta, fwd, side](const ProcessState& s, StepDistribution& out) {
    if (!s.at_fresh_site) {
      srw_kernel(out);
      return;
    }
    out.clear();
    out.add(fwd, 0.25 + beta / 2.0);
    out.add(-fwd, 0.25 - beta / 2.0);
    out.add(side, 0.25);
    out.add(-side, 0.25);
  };
  return w;
}

Walk radial_sector_walk(int radial_reach, double p) {
  if (radial_reach < 2)
    throw std::invalid_argument("radial_sector_walk: radial reach must be >= 2");
  if (!(p > 0.25 && p < 0.5))
    throw std::invalid_argument("radial_sector_walk: p must be in (1/4, 1/2)");
  Walk w;
  w.name = "radial-sector";
  w.params = EllipticityParams::make(static_cast<double>(radial_reach) + 1.0,
                                     0.25, 0.5 - p);
  w.cls = ProcessClass::Martingale;
  const double rho = static_cast<double>(radial_reach);
  w.kernel = [rho, p](const ProcessState& s, StepDistribution& out) {
    if (s.position[0] == 0.0 && s.position[1] == 0.0) {
      srw_kernel(out);
      return;
    }
    const Vector2 dir = s.position.normalized();
    const Vector2 radial = round_nonzero(rho * dir);
    const Vector2 transversal = round_nonzero(perp(dir));
    out.clear();
    out.add(radial, p);
    out.add(-radial, p);
    out.add(transversal, 0.5 - p);
    out.add(-transversal, 0.5 - p);
  };
  return w;
}

Walk make_walk(const std::string& name, const std::vector<double>& params) {
  if (name == "srw2d") return srw2d();
  if (name == "axis-trap") return axis_trap_walk();
  if (name == "excited") {
    const double beta = params.empty() ? 0.3 : params[0];
    Vector2 ell(1, 0);
    if (params.size() >= 3) ell = Vector2(params[1], params[2]);
    return excited_walk(beta, ell);
  }
  if (name == "radial-sector") {
    const int reach = params.empty() ? 3 : static_cast<int>(params[0]);
    const double p = params.size() >= 2 ? params[1] : 0.4;
    return radial_sector_walk(reach, p);
  }
  throw std::invalid_argument("unknown walk: " + name);
}

std::vector<std::string> walk_registry() {
  return {"srw2d", "axis-trap", "excited", "radial-sector"};
}

ProcessState make_state(const Walk& walk, const Vector2& start,
                        std::uint64_t seed, std::uint64_t trajectory_index) {
  ProcessState s;
  s.position = start;
  s.time = 0;
  s.at_fresh_site = true;
  s.rng = CounterRng(seed, trajectory_index);
  if (walk.tracks_visits) s.visited.insert(pack_site(start));
  return s;
}

Vector2 drift(const Walk& walk, const ProcessState& state) {
  StepDistribution dist;
  walk.kernel(state, dist);
  Vector2 d = Vector2::Zero();
  for (const auto& e : dist.items()) d += e.prob * e.jump;
  return d;
}

void advance(const Walk& walk, ProcessState& state, StepDistribution& scratch) {
  walk.kernel(state, scratch);
  const double u = state.rng.next_u01();
  double acc = 0.0;
  int pick = scratch.count - 1;
  for (int i = 0; i < scratch.count; ++i) {
    acc += scratch.entries[i].prob;
    if (u < acc) {
      pick = i;
      break;
    }
  }
  state.position += scratch.entries[pick].jump;
  state.time += 1;
  if (walk.tracks_visits)
    state.at_fresh_site = state.visited.insert(pack_site(state.position)).second;
}

ProcessState step(const Walk& walk, ProcessState state) {
  StepDistribution scratch;
  advance(walk, state, scratch);
  return state;
}

bool check_bounded_jumps(const Walk& walk, std::span<const ProcessState> states) {
  StepDistribution dist;
  for (const auto& s : states) {
    walk.kernel(s, dist);
    for (const auto& e : dist.items())
      if (e.jump.norm() > walk.params.K) return false;
  }
  return true;
}

EllipticityVerdict check_ellipticity_kernel(const StepDistribution& dist,
                                            double r, double h, int n_dirs) {
  if (n_dirs < 8)
    throw std::invalid_argument("check_ellipticity: need at least 8 directions");
  EllipticityVerdict v;
  v.n_dirs = n_dirs;
  for (int i = 0; i < n_dirs; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n_dirs;
    const Vector2 dir(std::cos(theta), std::sin(theta));
    double mass = 0.0;
    for (const auto& e : dist.items())
      if (e.jump.dot(dir) > r) mass += e.prob;
    if (mass < h) v.failing_directions.push_back(i);
  }
  v.pass = v.failing_directions.empty();
  return v;
}

EllipticityVerdict check_ellipticity(const Walk& walk, const ProcessState& state,
                                     int n_dirs) {
  StepDistribution dist;
  walk.kernel(state, dist);
  return check_ellipticity_kernel(dist, walk.params.r, walk.params.h, n_dirs);
}

bool check_strong_direction2(const Walk& walk, const ProcessState& state,
                             double u, const Vector2& ell) {
  return cone_contains2(u, ell, drift(walk, state));
}

bool check_strong_direction(const Walk& walk, const ProcessState& state,
                            const Cone& cone) {
  const Vector2 d = drift(walk, state);
  Vector dd(cone.plane.ambient_dim());
  dd.setZero();
  dd[0] = d[0];
  dd[1] = d[1];
  return cone_contains(cone, dd);
}

std::vector<Vector2> martingale_transform(std::span<const TrajectoryPoint> trajectory) {
  if (trajectory.empty())
    throw std::invalid_argument("martingale_transform: empty trajectory");
  std::vector<Vector2> y;
  y.reserve(trajectory.size());
  Vector2 compensator = Vector2::Zero();
  y.push_back(trajectory[0].position);
  for (size_t n = 1; n < trajectory.size(); ++n) {
    compensator += trajectory[n - 1].drift;
    y.push_back(trajectory[n].position - compensator);
  }
  return y;
}

double lyapunov_margin(const Walk& walk, const ProcessState& state, double b) {
  if (!(b > 0.0 && b < 1.0))
    throw std::invalid_argument("lyapunov_margin: b must be in (0,1)");
  if (state.position[0] == 0.0 && state.position[1] == 0.0)
    throw std::invalid_argument("lyapunov_margin: undefined at the origin");
  StepDistribution dist;
  walk.kernel(state, dist);
  double expected = 0.0;
  for (const auto& e : dist.items())
    expected += e.prob * std::pow((state.position + e.jump).norm(), b);
  return expected - std::pow(state.position.norm(), b);
}

}  // namespace martwalk
