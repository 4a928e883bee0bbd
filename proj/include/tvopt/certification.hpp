#ifndef TVOPT_CERTIFICATION_HPP
#define TVOPT_CERTIFICATION_HPP

#include <functional>
#include <string>

#include "tvopt/optimizers.hpp"
#include "tvopt/problem.hpp"

namespace tvopt {

/// Lyapunov sandwich for the baseline update law:
///   alpha_lo |g|^2 <= V(g) <= alpha_hi |g|^2  and  V' <= -2 beta V
/// along the nominal gradient dynamics.
struct BaselineCertificate {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double beta = 0.0;
  std::function<double(const Vec&)> V;
  std::function<Vec(const Vec&)> dV;

  /// The quadratic certificate V(g) = |g|^2 / 2 with beta = lambda_min(P).
  static BaselineCertificate pcip(const Mat& P);
};

/// Uniform bounds over the tube, estimated or supplied exactly.
struct DeltaBase {
  double vdot_b = 0.0;        // baseline rate
  double dV_dgrad = 0.0;      // dV/d(grad)
  double grad_vt_hat = 0.0;   // predicted gradient drift
  double grad_vt_err = 0.0;   // prediction error of grad_vt
  double grad_vtt_err = 0.0;  // prediction error of grad_vtt
  double grad_vvt_err = 0.0;  // prediction error of grad_vvt
  double hess = 0.0;          // hess_vv
  double hess_t = 0.0;        // grad_vvt
  double hess_v = 0.0;        // grad_vvv

  void validate() const;
};

/// Constants derived from DeltaBase in dependency order.
struct DerivedDeltas {
  double sigma = 0.0;
  double sigma_hat = 0.0;
  double vdot = 0.0;
  double hess_dot = 0.0;
  double grad_vt_err_dot = 0.0;
  double sigma_dot = 0.0;
};

DerivedDeltas delta_closure(const DeltaBase& base, double m_f, int n_v);

struct Zetas {
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
  double z4 = 0.0;
};

/// zeta_1(omega), zeta_2(A_s), zeta_3(omega), zeta_4(A_s, omega). Throws
/// NumericError when omega == 2 beta (singular denominator in zeta_1).
Zetas zetas(const DerivedDeltas& d, const DeltaBase& base, double beta,
            const Vec& a_s_diag, double omega, double m_f, int n_v);

/// The a priori performance/optimality certificate for a given (T_s, omega).
struct TubeCertificate {
  double rho = 0.0;
  double epsilon_rho = 0.0;
  double V0 = 0.0;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  double T_s = 0.0;
  double m_f = 0.0;
  int n_v = 0;
  Vec a_s_diag;
  DeltaBase base;
  DerivedDeltas derived;
  Zetas z;

  bool admissible = false;
  std::string violated;  // which inequality failed, when inadmissible
  double T_s_max = 0.0;  // +inf when zeta_4 == 0

  double bound_grad() const { return rho; }
  double bound_variable() const { return rho / m_f; }
  double bound_cost_gap() const { return rho * rho / m_f; }

  /// Ultimate bounds for t >= t1.
  double ultimate_grad(double t1) const;
  double ultimate_variable(double t1) const { return ultimate_grad(t1) / m_f; }
  double ultimate_cost_gap(double t1) const;
};

/// Evaluate the full certificate: rho = sqrt(alpha_hi/alpha_lo) |grad0| +
/// epsilon_rho, the delta closure, the zetas, admissibility of (T_s, omega)
/// and the largest admissible T_s. Inadmissibility is reported in the
/// result, never thrown.
TubeCertificate certify(const BaselineCertificate& baseline, const DeltaBase& base,
                        const L1Config& l1, double m_f, int n_v, const Vec& grad0,
                        double epsilon_rho);

/// Grid for sampling the tube around the per-time minimizer.
struct DeltaGrid {
  int time_points = 1024;
  int radial_points = 17;    // per direction, endpoints included
  int angular_points = 32;   // directions for n_v >= 2
  double safety = 1.1;       // inflation applied to every sampled maximum
};

/// Componentwise maxima of the nine base bounds over [0, horizon] x
/// { v*(t) + r u : r <= rho/m_f }, inflated by the safety factor. Infeasible
/// grid points are skipped; more than half skipped is an error. minimizer
/// must return argmin_v Phi(t, .) given a warm start.
DeltaBase estimate_deltas(
    const ProblemOracle& oracle, const PredictionModel& model,
    const std::function<Vec(double, const Vec&)>& baseline_rate,
    const std::function<Vec(const Vec&)>& dV, double rho, double m_f, double horizon,
    const DeltaGrid& grid,
    const std::function<Vec(double, const Vec&)>& minimizer);

}  // namespace tvopt

#endif  // TVOPT_CERTIFICATION_HPP
