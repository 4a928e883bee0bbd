#ifndef TVOPT_PROBLEM_HPP
#define TVOPT_PROBLEM_HPP

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "tvopt/types.hpp"

namespace tvopt {

/// One scalar function f(t, v) of time and the decision variable, with the
/// partial derivatives the barrier composition needs. Required surfaces:
/// value, grad_v, hess_vv, grad_vt, grad_t. The remaining higher partials
/// are only consumed by certification and may be left empty.
struct ScalarFunction {
  int dim = 1;

  std::function<double(double, const Vec&)> value;
  std::function<Vec(double, const Vec&)> grad_v;
  std::function<Mat(double, const Vec&)> hess_vv;
  std::function<Vec(double, const Vec&)> grad_vt;   // d/dt of grad_v
  std::function<double(double, const Vec&)> grad_t; // df/dt

  // Optional, required for certification.
  std::function<double(double, const Vec&)> grad_tt;
  std::function<Vec(double, const Vec&)> grad_vtt;
  std::function<Mat(double, const Vec&)> grad_vvt;
  std::function<Tensor3(double, const Vec&)> grad_vvv;

  bool has_higher_partials() const {
    return static_cast<bool>(grad_vtt) && static_cast<bool>(grad_vvt) &&
           static_cast<bool>(grad_vvv) && static_cast<bool>(grad_tt);
  }
};

/// Barrier penalty schedule c(t) > 0 with its first two time derivatives.
struct PenaltySchedule {
  std::function<double(double)> c;
  std::function<double(double)> cdot;
  std::function<double(double)> cddot;

  static PenaltySchedule constant(double value);
};

/// min f0(t, v) subject to f_i(t, v) <= 0.
struct TVProblem {
  ScalarFunction objective;
  std::vector<ScalarFunction> constraints;
  PenaltySchedule penalty = PenaltySchedule::constant(1.0);
  double m_f = 0.0;  // strong-convexity lower bound on the objective Hessian
};

/// The log-barrier composition
///   Phi(t, v) = f0(t, v) - (1/c(t)) sum_i log(-f_i(t, v)),
/// with all partials assembled analytically from the component oracles.
/// Pure and stateless; safe to share between threads.
class ProblemOracle {
 public:
  ProblemOracle() = default;
  explicit ProblemOracle(TVProblem problem);

  int dim() const { return prob_.objective.dim; }
  int num_constraints() const { return static_cast<int>(prob_.constraints.size()); }
  double m_f() const { return prob_.m_f; }

  /// True iff every f_i(t, v) < 0.
  bool feasible(double t, const Vec& v) const;

  /// min_i(-f_i(t, v)); +infinity when there are no constraints.
  double min_slack(double t, const Vec& v) const;

  /// Index of the first constraint with f_i(t, v) >= 0, or -1 if none.
  int first_violated(double t, const Vec& v) const;

  double value(double t, const Vec& v) const;
  Vec grad_v(double t, const Vec& v) const;
  Mat hess_vv(double t, const Vec& v) const;
  Vec grad_vt(double t, const Vec& v) const;

  /// Gradient and Hessian in one sweep over the constraints.
  void grad_and_hess(double t, const Vec& v, Vec& g, Mat& h) const;

  bool has_higher_partials() const;
  Vec grad_vtt(double t, const Vec& v) const;
  Mat grad_vvt(double t, const Vec& v) const;
  Tensor3 grad_vvv(double t, const Vec& v) const;

 private:
  // Throws DomainViolation carrying the first offending constraint index.
  void require_feasible(double t, const Vec& v) const;

  TVProblem prob_;
};

inline ProblemOracle compose_barrier(TVProblem problem) {
  return ProblemOracle(std::move(problem));
}

/// The nominal (possibly wrong) model of how the gradient drifts in time.
struct PredictionModel {
  std::function<Vec(double, const Vec&)> grad_vt_hat;

  // Optional, required only when certifying the error partials.
  std::function<Vec(double, const Vec&)> grad_vtt_hat;
  std::function<Mat(double, const Vec&)> grad_vvt_hat;

  bool has_higher_partials() const {
    return static_cast<bool>(grad_vtt_hat) && static_cast<bool>(grad_vvt_hat);
  }

  /// Model whose prediction surfaces are read off another oracle. With the
  /// true oracle this is the exact model; with a rates-frozen variant it is
  /// the nominal one.
  static PredictionModel from_oracle(const ProblemOracle& oracle);
};

/// sigma = -hess^{-1) (grad_vt_hat - grad_vt), the matched uncertainty of the
/// gradient system. Diagnostic only; the optimizer never sees it.
Vec true_sigma(const ProblemOracle& oracle, const PredictionModel& model,
               double t, const Vec& v);

/// Finite-difference validation report for the analytic partials.
struct DerivativeReport {
  double max_rel_err_grad_v = 0.0;
  double max_rel_err_hess_vv = 0.0;
  double max_rel_err_grad_vt = 0.0;
  int checked = 0;
  int skipped = 0;
  double rel_tol = 0.0;

  bool pass() const {
    return checked > 0 && max_rel_err_grad_v <= rel_tol &&
           max_rel_err_hess_vv <= rel_tol && max_rel_err_grad_vt <= rel_tol;
  }
};

/// Central-difference check of grad_v, hess_vv and grad_vt against value and
/// grad_v. Samples closer to the barrier boundary than 10 * fd_step are
/// skipped; if every sample is skipped or infeasible a ConfigError is thrown.
DerivativeReport check_derivatives(const ProblemOracle& oracle,
                                   const std::vector<std::pair<double, Vec>>& samples,
                                   double rel_tol = 1e-5, double fd_step = 1e-6);

}  // namespace tvopt

#endif  // TVOPT_PROBLEM_HPP
