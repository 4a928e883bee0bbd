#include "tvopt/problem.hpp"

#include <algorithm>
#include <cmath>

namespace tvopt {

PenaltySchedule PenaltySchedule::constant(double value) {
  PenaltySchedule p;
  p.c = [value](double) { return value; };
  p.cdot = [](double) { return 0.0; };
  p.cddot = [](double) { return 0.0; };
  return p;
}

ProblemOracle::ProblemOracle(TVProblem problem) : prob_(std::move(problem)) {
  if (!prob_.objective.value || !prob_.objective.grad_v || !prob_.objective.hess_vv ||
      !prob_.objective.grad_vt) {
    throw ConfigError("objective must provide value, grad_v, hess_vv, grad_vt");
  }
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    if (!f.value || !f.grad_v || !f.hess_vv || !f.grad_vt || !f.grad_t) {
      throw ConfigError("constraint " + std::to_string(i) +
                        " must provide value, grad_v, hess_vv, grad_vt, grad_t");
    }
  }
  if (!prob_.penalty.c) throw ConfigError("penalty schedule missing c(t)");
}

bool ProblemOracle::feasible(double t, const Vec& v) const {
  for (const ScalarFunction& f : prob_.constraints) {
    if (f.value(t, v) >= 0.0) return false;
  }
  return true;
}

double ProblemOracle::min_slack(double t, const Vec& v) const {
  double s = std::numeric_limits<double>::infinity();
  for (const ScalarFunction& f : prob_.constraints) {
    s = std::min(s, -f.value(t, v));
  }
  return s;
}

int ProblemOracle::first_violated(double t, const Vec& v) const {
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    if (prob_.constraints[i].value(t, v) >= 0.0) return static_cast<int>(i);
  }
  return -1;
}

void ProblemOracle::require_feasible(double t, const Vec& v) const {
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    if (prob_.constraints[i].value(t, v) >= 0.0) {
      throw DomainViolation(static_cast<int>(i), t);
    }
  }
}

double ProblemOracle::value(double t, const Vec& v) const {
  double phi = prob_.objective.value(t, v);
  if (prob_.constraints.empty()) return phi;
  const double r = 1.0 / prob_.penalty.c(t);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const double fi = prob_.constraints[i].value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    phi -= r * std::log(-fi);
  }
  return phi;
}

Vec ProblemOracle::grad_v(double t, const Vec& v) const {
  Vec g = prob_.objective.grad_v(t, v);
  if (prob_.constraints.empty()) return g;
  const double r = 1.0 / prob_.penalty.c(t);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    g -= (r / fi) * f.grad_v(t, v);
  }
  return g;
}

Mat ProblemOracle::hess_vv(double t, const Vec& v) const {
  Mat h = prob_.objective.hess_vv(t, v);
  if (prob_.constraints.empty()) return h;
  const double r = 1.0 / prob_.penalty.c(t);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    const Vec gf = f.grad_v(t, v);
    h -= r * (f.hess_vv(t, v) / fi - gf * gf.transpose() / (fi * fi));
  }
  return h;
}

void ProblemOracle::grad_and_hess(double t, const Vec& v, Vec& g, Mat& h) const {
  g = prob_.objective.grad_v(t, v);
  h = prob_.objective.hess_vv(t, v);
  if (prob_.constraints.empty()) return;
  const double r = 1.0 / prob_.penalty.c(t);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    const Vec gf = f.grad_v(t, v);
    g -= (r / fi) * gf;
    h -= r * (f.hess_vv(t, v) / fi - gf * gf.transpose() / (fi * fi));
  }
}

Vec ProblemOracle::grad_vt(double t, const Vec& v) const {
  Vec gvt = prob_.objective.grad_vt(t, v);
  if (prob_.constraints.empty()) return gvt;
  const double c = prob_.penalty.c(t);
  const double r = 1.0 / c;
  const double rdot = -prob_.penalty.cdot(t) / (c * c);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    const Vec gf = f.grad_v(t, v);
    const double ft = f.grad_t(t, v);
    const Vec G = gf / fi;
    const Vec Gdot = f.grad_vt(t, v) / fi - gf * (ft / (fi * fi));
    gvt -= rdot * G + r * Gdot;
  }
  return gvt;
}

bool ProblemOracle::has_higher_partials() const {
  if (!prob_.objective.grad_vtt || !prob_.objective.grad_vvt || !prob_.objective.grad_vvv) {
    return false;
  }
  if (!prob_.penalty.cdot || !prob_.penalty.cddot) return false;
  return std::all_of(prob_.constraints.begin(), prob_.constraints.end(),
                     [](const ScalarFunction& f) { return f.has_higher_partials(); });
}

Vec ProblemOracle::grad_vtt(double t, const Vec& v) const {
  if (!prob_.objective.grad_vtt) throw MissingPartials("objective grad_vtt");
  Vec out = prob_.objective.grad_vtt(t, v);
  if (prob_.constraints.empty()) return out;
  const double c = prob_.penalty.c(t);
  const double cd = prob_.penalty.cdot(t);
  const double cdd = prob_.penalty.cddot(t);
  const double r = 1.0 / c;
  const double rdot = -cd / (c * c);
  const double rddot = -cdd / (c * c) + 2.0 * cd * cd / (c * c * c);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    if (!f.has_higher_partials()) {
      throw MissingPartials("constraint " + std::to_string(i) + " higher partials");
    }
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    const Vec gf = f.grad_v(t, v);
    const double ft = f.grad_t(t, v);
    const double ftt = f.grad_tt(t, v);
    const Vec gvt = f.grad_vt(t, v);
    const Vec G = gf / fi;
    const Vec Gdot = gvt / fi - gf * (ft / (fi * fi));
    const Vec Gddot = f.grad_vtt(t, v) / fi - 2.0 * gvt * (ft / (fi * fi)) -
                      gf * (ftt / (fi * fi)) + 2.0 * gf * (ft * ft / (fi * fi * fi));
    out -= rddot * G + 2.0 * rdot * Gdot + r * Gddot;
  }
  return out;
}

Mat ProblemOracle::grad_vvt(double t, const Vec& v) const {
  if (!prob_.objective.grad_vvt) throw MissingPartials("objective grad_vvt");
  Mat out = prob_.objective.grad_vvt(t, v);
  if (prob_.constraints.empty()) return out;
  const double c = prob_.penalty.c(t);
  const double r = 1.0 / c;
  const double rdot = -prob_.penalty.cdot(t) / (c * c);
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    if (!f.has_higher_partials()) {
      throw MissingPartials("constraint " + std::to_string(i) + " higher partials");
    }
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    const Vec gf = f.grad_v(t, v);
    const double ft = f.grad_t(t, v);
    const Vec gvt = f.grad_vt(t, v);
    const Mat hf = f.hess_vv(t, v);
    const Mat HL = hf / fi - gf * gf.transpose() / (fi * fi);
    const Mat HLdot = f.grad_vvt(t, v) / fi - hf * (ft / (fi * fi)) -
                      (gvt * gf.transpose() + gf * gvt.transpose()) / (fi * fi) +
                      2.0 * gf * gf.transpose() * (ft / (fi * fi * fi));
    out -= rdot * HL + r * HLdot;
  }
  return out;
}

Tensor3 ProblemOracle::grad_vvv(double t, const Vec& v) const {
  if (!prob_.objective.grad_vvv) throw MissingPartials("objective grad_vvv");
  Tensor3 out = prob_.objective.grad_vvv(t, v);
  if (prob_.constraints.empty()) return out;
  const double r = 1.0 / prob_.penalty.c(t);
  const int n = dim();
  for (size_t i = 0; i < prob_.constraints.size(); ++i) {
    const ScalarFunction& f = prob_.constraints[i];
    if (!f.has_higher_partials()) {
      throw MissingPartials("constraint " + std::to_string(i) + " higher partials");
    }
    const double fi = f.value(t, v);
    if (fi >= 0.0) throw DomainViolation(static_cast<int>(i), t);
    const Vec gf = f.grad_v(t, v);
    const Mat hf = f.hess_vv(t, v);
    const Tensor3 tf = f.grad_vvv(t, v);
    for (int c = 0; c < n; ++c) {
      const Vec hc = hf.col(c);
      Mat slice = tf.k[static_cast<size_t>(c)] / fi;
      slice -= (hf * gf(c) + hc * gf.transpose() + gf * hc.transpose()) / (fi * fi);
      slice += 2.0 * (gf * gf.transpose()) * (gf(c) / (fi * fi * fi));
      out.k[static_cast<size_t>(c)] -= r * slice;
    }
  }
  return out;
}

PredictionModel PredictionModel::from_oracle(const ProblemOracle& oracle) {
  PredictionModel m;
  m.grad_vt_hat = [oracle](double t, const Vec& v) { return oracle.grad_vt(t, v); };
  if (oracle.has_higher_partials()) {
    m.grad_vtt_hat = [oracle](double t, const Vec& v) { return oracle.grad_vtt(t, v); };
    m.grad_vvt_hat = [oracle](double t, const Vec& v) { return oracle.grad_vvt(t, v); };
  }
  return m;
}

Vec true_sigma(const ProblemOracle& oracle, const PredictionModel& model,
               double t, const Vec& v) {
  Vec g;
  Mat h;
  oracle.grad_and_hess(t, v, g, h);
  const Vec err = model.grad_vt_hat(t, v) - oracle.grad_vt(t, v);
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    throw NumericError("singular Hessian in sigma; eigenvalue range [" +
                       std::to_string(es.eigenvalues().minCoeff()) + ", " +
                       std::to_string(es.eigenvalues().maxCoeff()) + "]");
  }
  return -llt.solve(err);
}

namespace {

double rel_err(double analytic, double fd) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(fd)});
  return std::abs(analytic - fd) / scale;
}

}  // namespace

DerivativeReport check_derivatives(const ProblemOracle& oracle,
                                   const std::vector<std::pair<double, Vec>>& samples,
                                   double rel_tol, double fd_step) {
  DerivativeReport rep;
  rep.rel_tol = rel_tol;
  const double h = fd_step;
  const int n = oracle.dim();
  for (const auto& [t, v] : samples) {
    if (!oracle.feasible(t, v) || oracle.min_slack(t, v) < 10.0 * h) {
      ++rep.skipped;
      continue;
    }
    const Vec g = oracle.grad_v(t, v);
    const Mat hess = oracle.hess_vv(t, v);
    const Vec gvt = oracle.grad_vt(t, v);
    for (int i = 0; i < n; ++i) {
      Vec vp = v, vm = v;
      vp(i) += h;
      vm(i) -= h;
      const double fd_g = (oracle.value(t, vp) - oracle.value(t, vm)) / (2.0 * h);
      rep.max_rel_err_grad_v = std::max(rep.max_rel_err_grad_v, rel_err(g(i), fd_g));
      const Vec fd_col = (oracle.grad_v(t, vp) - oracle.grad_v(t, vm)) / (2.0 * h);
      for (int j = 0; j < n; ++j) {
        rep.max_rel_err_hess_vv =
            std::max(rep.max_rel_err_hess_vv, rel_err(hess(j, i), fd_col(j)));
      }
    }
    const Vec fd_vt = (oracle.grad_v(t + h, v) - oracle.grad_v(t - h, v)) / (2.0 * h);
    for (int j = 0; j < n; ++j) {
      rep.max_rel_err_grad_vt = std::max(rep.max_rel_err_grad_vt, rel_err(gvt(j), fd_vt(j)));
    }
    ++rep.checked;
  }
  if (rep.checked == 0) {
    throw ConfigError("no checkable samples: all " + std::to_string(rep.skipped) +
                      " samples infeasible or too close to the barrier boundary");
  }
  return rep;
}

}  // namespace tvopt
