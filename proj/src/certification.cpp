#include "tvopt/certification.hpp"

#include <cmath>
#include <random>

namespace tvopt {

BaselineCertificate BaselineCertificate::pcip(const Mat& P) {
  PcipConfig cfg{P};
  cfg.validate();
  BaselineCertificate b;
  b.alpha_lo = 0.5;
  b.alpha_hi = 0.5;
  b.beta = cfg.beta();
  b.V = [](const Vec& g) { return 0.5 * g.squaredNorm(); };
  b.dV = [](const Vec& g) { return g; };
  return b;
}

void DeltaBase::validate() const {
  const double vals[] = {vdot_b, dV_dgrad,     grad_vt_hat, grad_vt_err, grad_vtt_err,
                         grad_vvt_err, hess,   hess_t,      hess_v};
  for (double v : vals) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("delta bounds must be finite and nonnegative");
    }
  }
}

DerivedDeltas delta_closure(const DeltaBase& base, double m_f, int n_v) {
  base.validate();
  if (m_f <= 0.0) throw ConfigError("m_f must be positive");
  if (n_v < 1) throw ConfigError("n_v must be >= 1");
  DerivedDeltas d;
  d.sigma = base.grad_vt_err / m_f;
  d.sigma_hat = std::sqrt(static_cast<double>(n_v)) / m_f * base.hess * d.sigma;
  d.vdot = base.vdot_b + d.sigma_hat;
  d.hess_dot = base.hess_t + base.hess_v * d.vdot;
  d.grad_vt_err_dot = base.grad_vtt_err + base.grad_vvt_err * d.vdot;
  d.sigma_dot = (d.hess_dot * base.grad_vt_err / m_f + d.grad_vt_err_dot) / m_f;
  return d;
}

namespace {

double lambda_min_neg(const Vec& a_s_diag) {
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < a_s_diag.size(); ++j) {
    if (a_s_diag(j) >= 0.0) throw ConfigError("A_s diagonal must be negative");
    lo = std::min(lo, -a_s_diag(j));
  }
  return lo;
}

}  // namespace

Zetas zetas(const DerivedDeltas& d, const DeltaBase& base, double beta,
            const Vec& a_s_diag, double omega, double m_f, int n_v) {
  if (beta <= 0.0 || omega <= 0.0) throw ConfigError("beta and omega must be positive");
  if (std::abs(omega - 2.0 * beta) <= 1e-12 * std::max(1.0, 2.0 * beta)) {
    throw NumericError("zeta_1 has a singular denominator at omega == 2*beta; "
                       "perturb omega away from " +
                       std::to_string(2.0 * beta));
  }
  const double sqrt_n = std::sqrt(static_cast<double>(n_v));
  Zetas z;
  z.z1 = base.dV_dgrad * base.hess *
         (d.sigma / std::abs(2.0 * beta - omega) + d.sigma_dot / (2.0 * beta * omega));
  z.z2 = sqrt_n / m_f *
         ((2.0 * d.sigma_dot + lambda_min_neg(a_s_diag) * d.sigma) * base.hess +
          d.sigma * d.hess_dot);
  z.z3 = d.sigma * omega;
  z.z4 = base.dV_dgrad * base.hess * (z.z2 + z.z3) / (2.0 * beta);
  return z;
}

double TubeCertificate::ultimate_grad(double t1) const {
  const double level = std::exp(-2.0 * beta * t1) * V0 + z.z1 + z.z4 * T_s;
  return std::sqrt(level / alpha_lo);
}

double TubeCertificate::ultimate_cost_gap(double t1) const {
  const double level = std::exp(-2.0 * beta * t1) * V0 + z.z1 + z.z4 * T_s;
  return level / (m_f * alpha_lo);
}

TubeCertificate certify(const BaselineCertificate& baseline, const DeltaBase& base,
                        const L1Config& l1, double m_f, int n_v, const Vec& grad0,
                        double epsilon_rho) {
  if (epsilon_rho <= 0.0) throw ConfigError("epsilon_rho must be positive");
  l1.validate();
  TubeCertificate c;
  c.alpha_lo = baseline.alpha_lo;
  c.alpha_hi = baseline.alpha_hi;
  c.beta = baseline.beta;
  c.omega = l1.omega;
  c.T_s = l1.T_s;
  c.m_f = m_f;
  c.n_v = n_v;
  c.a_s_diag = l1.a_s_diag;
  c.epsilon_rho = epsilon_rho;
  c.rho = std::sqrt(baseline.alpha_hi / baseline.alpha_lo) * grad0.norm() + epsilon_rho;
  c.V0 = baseline.V(grad0);
  c.base = base;
  c.derived = delta_closure(base, m_f, n_v);
  c.z = zetas(c.derived, base, baseline.beta, l1.a_s_diag, l1.omega, m_f, n_v);

  const double budget = c.alpha_lo * c.rho * c.rho - c.z.z1 - c.V0;
  if (budget <= 0.0) {
    c.admissible = false;
    c.T_s_max = 0.0;
    c.violated = "alpha_lo*rho^2 > zeta_1 + V0 fails (deficit " +
                 std::to_string(-budget) + "); raise omega or the target rho";
    return c;
  }
  c.T_s_max = c.z.z4 == 0.0 ? std::numeric_limits<double>::infinity() : budget / c.z.z4;
  if (l1.T_s > c.T_s_max) {
    c.admissible = false;
    c.violated = "T_s <= (alpha_lo*rho^2 - zeta_1 - V0)/zeta_4 fails (T_s_max " +
                 std::to_string(c.T_s_max) + "); lower T_s";
    return c;
  }
  c.admissible = true;
  return c;
}

namespace {

std::vector<Vec> tube_directions(int n, int angular_points) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  if (n == 2) {
    dirs.reserve(static_cast<size_t>(angular_points));
    for (int k = 0; k < angular_points; ++k) {
      const double th = 2.0 * M_PI * k / angular_points;
      dirs.push_back((Vec(2) << std::cos(th), std::sin(th)).finished());
    }
    return dirs;
  }
  std::mt19937_64 rng(777);
  std::normal_distribution<double> nz(0.0, 1.0);
  dirs.reserve(static_cast<size_t>(angular_points));
  for (int k = 0; k < angular_points; ++k) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u(i) = nz(rng);
    dirs.push_back(u.normalized());
  }
  return dirs;
}

}  // namespace

DeltaBase estimate_deltas(
    const ProblemOracle& oracle, const PredictionModel& model,
    const std::function<Vec(double, const Vec&)>& baseline_rate,
    const std::function<Vec(const Vec&)>& dV, double rho, double m_f, double horizon,
    const DeltaGrid& grid,
    const std::function<Vec(double, const Vec&)>& minimizer) {
  if (rho <= 0.0 || m_f <= 0.0 || horizon <= 0.0) {
    throw ConfigError("estimate_deltas: rho, m_f and horizon must be positive");
  }
  if (grid.time_points < 2 || grid.radial_points < 2) {
    throw ConfigError("estimate_deltas: grid too coarse");
  }
  if (!oracle.has_higher_partials()) {
    throw MissingPartials("oracle higher partials (grad_vtt, grad_vvt, grad_vvv)");
  }
  if (!model.has_higher_partials()) {
    throw MissingPartials("model grad_vtt_hat / grad_vvt_hat");
  }

  const int n = oracle.dim();
  const double radius = rho / m_f;
  const std::vector<Vec> dirs = tube_directions(n, grid.angular_points);

  DeltaBase b;
  long skipped = 0;
  long total = 0;
  Vec v_warm;

  auto visit = [&](double t, const Vec& v) {
    ++total;
    if (!oracle.feasible(t, v)) {
      ++skipped;
      return;
    }
    const Vec g = oracle.grad_v(t, v);
    b.vdot_b = std::max(b.vdot_b, baseline_rate(t, v).norm());
    b.dV_dgrad = std::max(b.dV_dgrad, dV(g).norm());
    const Vec gvt = oracle.grad_vt(t, v);
    const Vec gvt_hat = model.grad_vt_hat(t, v);
    b.grad_vt_hat = std::max(b.grad_vt_hat, gvt_hat.norm());
    b.grad_vt_err = std::max(b.grad_vt_err, (gvt_hat - gvt).norm());
    b.grad_vtt_err = std::max(
        b.grad_vtt_err, (model.grad_vtt_hat(t, v) - oracle.grad_vtt(t, v)).norm());
    b.grad_vvt_err = std::max(
        b.grad_vvt_err,
        spectral_norm(model.grad_vvt_hat(t, v) - oracle.grad_vvt(t, v)));
    b.hess = std::max(b.hess, spectral_norm(oracle.hess_vv(t, v)));
    b.hess_t = std::max(b.hess_t, spectral_norm(oracle.grad_vvt(t, v)));
    b.hess_v = std::max(b.hess_v, oracle.grad_vvv(t, v).norm());
  };

  for (int ti = 0; ti < grid.time_points; ++ti) {
    const double t = horizon * ti / (grid.time_points - 1);
    const Vec v_star = minimizer(t, v_warm);
    v_warm = v_star;
    visit(t, v_star);
    for (const Vec& u : dirs) {
      for (int ri = 1; ri < grid.radial_points; ++ri) {
        const double r = radius * ri / (grid.radial_points - 1);
        visit(t, v_star + r * u);
      }
    }
  }

  if (skipped * 2 > total) {
    throw ConfigError("estimate_deltas: more than half of the grid (" +
                      std::to_string(skipped) + "/" + std::to_string(total) +
                      ") is infeasible; check rho and the horizon");
  }
  b.vdot_b *= grid.safety;
  b.dV_dgrad *= grid.safety;
  b.grad_vt_hat *= grid.safety;
  b.grad_vt_err *= grid.safety;
  b.grad_vtt_err *= grid.safety;
  b.grad_vvt_err *= grid.safety;
  b.hess *= grid.safety;
  b.hess_t *= grid.safety;
  b.hess_v *= grid.safety;
  return b;
}

}  // namespace tvopt
