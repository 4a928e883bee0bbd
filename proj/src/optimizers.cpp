#include "tvopt/optimizers.hpp"

#include <cmath>

namespace tvopt {

namespace {

Vec solve_spd(const Mat& h, const Vec& rhs, const char* who) {
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success) {
    throw NumericError(std::string(who) + ": Hessian not positive definite");
  }
  return llt.solve(rhs);
}

}  // namespace

double PcipConfig::beta() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  return es.eigenvalues().minCoeff();
}

void PcipConfig::validate() const {
  if (P.rows() == 0 || P.rows() != P.cols()) throw ConfigError("P must be square");
  if (!P.isApprox(P.transpose(), 1e-12)) throw ConfigError("P must be symmetric");
  if (beta() <= 0.0) throw ConfigError("P must be positive definite");
}

void ModifiedPcipConfig::validate() const {
  PcipConfig{P}.validate();
  if (epsilon <= 0.0) throw ConfigError("epsilon must be positive");
}

void L1Config::validate() const {
  if (a_s_diag.size() == 0) throw ConfigError("A_s diagonal is empty");
  for (int i = 0; i < a_s_diag.size(); ++i) {
    if (a_s_diag(i) >= 0.0) {
      throw ConfigError("A_s diagonal entry " + std::to_string(i) + " must be negative");
    }
  }
  if (T_s <= 0.0) throw ConfigError("T_s must be positive");
  if (omega <= 0.0) throw ConfigError("omega must be positive");
}

AdaptationState AdaptationState::initial(const ProblemOracle& oracle, double t0,
                                         const Vec& v0) {
  AdaptationState s;
  s.grad_hat = oracle.grad_v(t0, v0);
  s.h_held = Vec::Zero(oracle.dim());
  s.sigma_hat_held = Vec::Zero(oracle.dim());
  s.vdot_a = Vec::Zero(oracle.dim());
  s.last_sample_index = -1;
  return s;
}

Vec pcip_rate_at(const PcipConfig& cfg, const Vec& g, const Mat& h, const Vec& gvt_hat) {
  return -solve_spd(h, gvt_hat + cfg.P * g, "pcip_rate");
}

Vec modified_pcip_rate_at(const ModifiedPcipConfig& cfg, const Vec& g, const Mat& h,
                          const Vec& gvt_hat) {
  const double denom = std::max(g.norm(), cfg.epsilon);
  return -solve_spd(h, gvt_hat + cfg.P * g / denom, "modified_pcip_rate");
}

Vec pcip_rate(const PcipConfig& cfg, const ProblemOracle& oracle,
              const PredictionModel& model, double t, const Vec& v) {
  Vec g;
  Mat h;
  oracle.grad_and_hess(t, v, g, h);
  return pcip_rate_at(cfg, g, h, model.grad_vt_hat(t, v));
}

Vec modified_pcip_rate(const ModifiedPcipConfig& cfg, const ProblemOracle& oracle,
                       const PredictionModel& model, double t, const Vec& v) {
  Vec g;
  Mat h;
  oracle.grad_and_hess(t, v, g, h);
  return modified_pcip_rate_at(cfg, g, h, model.grad_vt_hat(t, v));
}

Vec mu_gain(const Vec& a_s_diag, double T_s) {
  if (T_s <= 0.0) throw ConfigError("mu_gain: T_s must be positive");
  Vec mu(a_s_diag.size());
  for (int j = 0; j < a_s_diag.size(); ++j) {
    const double a = a_s_diag(j);
    if (a >= 0.0) throw ConfigError("mu_gain: A_s diagonal must be negative");
    const double e = std::exp(a * T_s);
    mu(j) = a * e / (1.0 - e);
  }
  return mu;
}

void l1_sample_update_at(AdaptationState& state, const Vec& mu_diag, const Vec& g,
                         const Mat& h, double T_s, double t) {
  const long i = state.last_sample_index + 1;
  if (std::abs(t - static_cast<double>(i) * T_s) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw ConfigError("l1_sample_update called off the sample schedule: t=" +
                      std::to_string(t) + ", expected " +
                      std::to_string(static_cast<double>(i) * T_s));
  }
  if (i == 0) {
    state.h_held.setZero();
    state.sigma_hat_held.setZero();
  } else {
    const Vec grad_err = state.grad_hat - g;
    state.h_held = mu_diag.cwiseProduct(grad_err);
    Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success) {
      throw NumericError("l1_sample_update: Hessian not positive definite");
    }
    state.sigma_hat_held = llt.solve(state.h_held);
  }
  state.last_sample_index = i;
}

void l1_sample_update(AdaptationState& state, const Vec& mu_diag,
                      const ProblemOracle& oracle, double T_s, double t, const Vec& v) {
  Vec g;
  Mat h;
  oracle.grad_and_hess(t, v, g, h);
  l1_sample_update_at(state, mu_diag, g, h, T_s, t);
}

L1Rates l1_continuous_rates(const AdaptationState& state, const L1Config& cfg,
                            const Vec& g, const Mat& h, const Vec& gvt_hat,
                            const Vec& vdot_total) {
  L1Rates r;
  r.grad_hat_dot = cfg.a_s_diag.cwiseProduct(state.grad_hat - g) + gvt_hat +
                   h * vdot_total + state.h_held;
  r.vdot_a_dot = -cfg.omega * (state.vdot_a + state.sigma_hat_held);
  return r;
}

Vec l1_total_rate(const Vec& baseline_rate, const AdaptationState& state) {
  if (baseline_rate.size() != state.vdot_a.size()) {
    throw ConfigError("l1_total_rate: dimension mismatch");
  }
  return baseline_rate + state.vdot_a;
}

}  // namespace tvopt
