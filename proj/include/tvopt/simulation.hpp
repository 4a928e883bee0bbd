#ifndef TVOPT_SIMULATION_HPP
#define TVOPT_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tvopt/optimizers.hpp"
#include "tvopt/problem.hpp"

namespace tvopt {

enum class Method {
  pcip,
  modified_pcip,
  l1ao_pcip,
  l1ao_modified_pcip,
  oracle_only,
};

std::string method_name(Method m);
Method parse_method(const std::string& name);
bool is_l1(Method m);

struct SimConfig {
  double dt = 1e-3;
  double t_f = 10.0;
  Vec v0;
  Method method = Method::pcip;
  PcipConfig pcip;
  ModifiedPcipConfig mpcip;
  L1Config l1;
  std::uint64_t rng_seed = 0;  // reserved; current scenarios are deterministic
  long record_stride = 1;      // trace row every this many steps
};

/// One recorded simulation step.
struct TraceRow {
  double t = 0.0;
  Vec v;
  Vec v_star;
  double grad_norm = 0.0;
  double cost_gap = 0.0;
  Vec sigma_true;
  Vec sigma_hat;
  Vec vdot_b;
  Vec vdot_a;
  std::int64_t step_elapsed_ns = 0;
  bool feasible = true;
};

struct RunSummary {
  std::string scenario;
  Method method = Method::pcip;
  long steps = 0;
  bool terminated_early = false;
  std::string reason;
  double sup_grad_norm = 0.0;
  double sup_variable_error = 0.0;
  double sup_cost_gap = 0.0;
  double max_rate_norm = 0.0;  // max |v_dot| over all integration steps
  double mean_step_elapsed_ns = 0.0;
  double mean_oracle_elapsed_ns = 0.0;
};

struct RunResult {
  std::vector<TraceRow> trace;
  RunSummary summary;
};

struct Disc {
  Vec center;
  double radius = 0.0;
};

/// A fully wired problem instance. Oracles are pure between world updates;
/// world_step (when present) is owned by the run loop and regenerates any
/// environment-coupled data once per integration step.
struct Scenario {
  std::string name;
  int dim = 1;
  double m_f = 1.0;
  ProblemOracle oracle;
  PredictionModel model;
  SimConfig defaults;

  /// A strictly feasible point at time t, used for cold starts.
  std::function<Vec(double)> feasible_point;

  /// Optional world coupling: advance environment state over one step.
  /// v_motion is the iterate during the elapsed step, v_next the iterate
  /// the next step's oracle will see.
  std::function<void(double t_next, const Vec& v_motion, const Vec& v_next, double dt)>
      world_step;

  // Plotting hints.
  std::function<double(double)> plot_boundary;  // 1D: infeasible above this curve
  std::vector<Disc> plot_obstacles;
};

/// Damped Newton minimization of Phi(t, .) from a feasible start. Step
/// -hess^{-1} grad with backtracking until feasible and Armijo (c = 1e-4)
/// hold; stops when |grad| <= tol.
Vec newton_oracle(const ProblemOracle& oracle, double t, const Vec& v_init,
                  double tol = 1e-10, int max_iter = 100);

/// Integrate the closed loop with fixed-step Euler. Per step: ground-truth
/// minimizer (excluded from method timing), adaptation sample update on the
/// T_s schedule, baseline + adaptive rates, trace row, state advance, world
/// advance, feasibility check. A violation records one final infeasible row
/// and stops the run.
RunResult run(Scenario& scenario, const SimConfig& cfg);

struct TimingTableRow {
  std::string method;
  double mean_step_ms = 0.0;
  double ratio_vs_oracle = 0.0;
};

/// Per-method mean step cost; ratio column is vs the oracle_only entry when
/// one is present.
std::vector<TimingTableRow> timing_report(const std::vector<RunSummary>& summaries);

}  // namespace tvopt

#endif  // TVOPT_SIMULATION_HPP
