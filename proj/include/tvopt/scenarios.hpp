#ifndef TVOPT_SCENARIOS_HPP
#define TVOPT_SCENARIOS_HPP

#include <optional>
#include <vector>

#include "tvopt/simulation.hpp"

namespace tvopt {

/// 1D constrained tracking problem with sinusoidal streaming data:
///   min v^2/2  s.t.  v + d(t) <= 0,  d(t) = 3 sin(3t),  c == 1.
/// The nominal model freezes d (grad_vt_hat == 0); the exact model exposes
/// the true drift.
struct Example1Overrides {
  std::optional<Vec> v0;
  std::optional<double> t_f;
  bool exact_model = false;
};
Scenario example1(const Example1Overrides& o = {});

struct HalfPlane {
  Vec a;          // unit outward direction, constraint a.x <= b
  double b = 0.0;
  Vec a_dot;      // drift of a under the current robot velocity
  double b_dot = 0.0;
};

/// Separating half-planes between a robot position and disc obstacles. Each
/// boundary passes through the midpoint of the gap segment from x_c to the
/// nearest point of the disc. Throws if x_c touches or penetrates a disc.
std::vector<HalfPlane> local_freespace(const Vec& x_c, const std::vector<Disc>& obstacles);

/// Planar goal-projection problem: track an orbiting target inside the local
/// free space of a robot that chases the projected goal.
///   Phi(t, x) = |x - x_d(t)|^2 / 2 - (1/c(t)) sum log(b_i - a_i. x)
/// with x_d orbiting at radius 15, c(t) = 50 e^{t/50}, and the robot moving
/// by x_c' = -k_r (x_c - v). The half-planes are regenerated from x_c once
/// per integration step and drift affinely in between. The nominal model
/// zeroes the target-velocity term only; robot and penalty rates are known
/// data on both sides unless known_world_rates is false.
struct Example2Overrides {
  std::optional<Vec> v0;
  std::optional<double> t_f;
  std::optional<Vec> robot_start;
  std::optional<std::vector<Disc>> obstacles;
  double k_r = 1.0;
  bool known_world_rates = true;
  bool exact_model = false;
};
Scenario example2(const Example2Overrides& o = {});

/// Unconstrained quadratic tracking of an analytic path:
///   Phi(t, v) = kappa/2 |v - q(t)|^2,
///   q_i(t) = c0_i + c1_i t + amp_i sin(freq_i t + phase_i).
/// The nominal model assumes the path is static. Constant path rate c1 with
/// zero amplitude gives a constant-uncertainty system.
struct CustomQuadratic {
  int dim = 1;
  double kappa = 1.0;
  Vec c0, c1, amp, freq, phase;
};
Scenario custom_quadratic(const CustomQuadratic& p, bool exact_model = false);

/// Deterministic feasibility-respecting samples for derivative checks.
std::vector<std::pair<double, Vec>> sample_points(const Scenario& sc, int count,
                                                  std::uint64_t seed = 12345);

}  // namespace tvopt

#endif  // TVOPT_SCENARIOS_HPP
