#ifndef TVOPT_OPTIMIZERS_HPP
#define TVOPT_OPTIMIZERS_HPP

#include "tvopt/problem.hpp"
#include "tvopt/types.hpp"

namespace tvopt {

/// Gain for the prediction-correction interior-point update law.
struct PcipConfig {
  Mat P;

  /// Smallest eigenvalue of P; the nominal contraction rate.
  double beta() const;
  void validate() const;
};

/// PCIP with the correction term saturated below epsilon.
struct ModifiedPcipConfig {
  Mat P;
  double epsilon = 0.0;
  void validate() const;
};

/// Adaptation loop parameters: diagonal Hurwitz matrix A_s, sampling period
/// T_s and low-pass filter bandwidth omega.
struct L1Config {
  Vec a_s_diag;
  double T_s = 0.0;
  double omega = 0.0;
  void validate() const;
};

/// Mutable adaptation state. h_held and sigma_hat_held only change at
/// sample instants i*T_s; vdot_a integrates the filter in between.
struct AdaptationState {
  Vec grad_hat;        // gradient predictor state
  Vec h_held;          // held estimate of hess * sigma
  Vec sigma_hat_held;  // held uncertainty estimate
  Vec vdot_a;          // filter output, the adaptive rate
  long last_sample_index = -1;

  static AdaptationState initial(const ProblemOracle& oracle, double t0, const Vec& v0);
};

/// v_b_dot = -hess^{-1} (grad_vt_hat + P grad_v). The prediction term comes
/// from the model, so with an exact model this is the nominal law.
Vec pcip_rate(const PcipConfig& cfg, const ProblemOracle& oracle,
              const PredictionModel& model, double t, const Vec& v);

/// v_b_dot = -hess^{-1} (grad_vt_hat + P grad_v / max(|grad_v|, epsilon)).
Vec modified_pcip_rate(const ModifiedPcipConfig& cfg, const ProblemOracle& oracle,
                       const PredictionModel& model, double t, const Vec& v);

// Internal forms reusing an already-evaluated gradient/Hessian pair.
Vec pcip_rate_at(const PcipConfig& cfg, const Vec& g, const Mat& h, const Vec& gvt_hat);
Vec modified_pcip_rate_at(const ModifiedPcipConfig& cfg, const Vec& g, const Mat& h,
                          const Vec& gvt_hat);

/// Diagonal of mu(A_s, T_s) = (A_s^{-1}(I - e^{A_s T_s}))^{-1} e^{A_s T_s},
/// elementwise a_j e^{a_j T_s} / (1 - e^{a_j T_s}). Behaves like -1/T_s for
/// small T_s.
Vec mu_gain(const Vec& a_s_diag, double T_s);

/// Piecewise-constant adaptation update at sample instant t = i*T_s. Uses
/// the current gradient and Hessian at (t, v); i = 0 forces h = sigma_hat = 0.
void l1_sample_update(AdaptationState& state, const Vec& mu_diag,
                      const ProblemOracle& oracle, double T_s, double t, const Vec& v);

/// Same update with the gradient/Hessian pair already evaluated at (t, v).
void l1_sample_update_at(AdaptationState& state, const Vec& mu_diag, const Vec& g,
                         const Mat& h, double T_s, double t);

struct L1Rates {
  Vec grad_hat_dot;
  Vec vdot_a_dot;
};

/// Continuous rates of the predictor and the first-order filter realization
/// vdot_a' = -omega (vdot_a + sigma_hat). vdot_total must be the full rate
/// v_b_dot + vdot_a applied to the variable this step.
L1Rates l1_continuous_rates(const AdaptationState& state, const L1Config& cfg,
                            const Vec& g, const Mat& h, const Vec& gvt_hat,
                            const Vec& vdot_total);

/// v_dot = v_b_dot + vdot_a.
Vec l1_total_rate(const Vec& baseline_rate, const AdaptationState& state);

}  // namespace tvopt

#endif  // TVOPT_OPTIMIZERS_HPP
