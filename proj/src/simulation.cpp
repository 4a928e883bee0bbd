#include "tvopt/simulation.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace tvopt {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

long checked_multiple(double big, double small, const char* what) {
  const double ratio = big / small;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-6) {
    throw ConfigError(std::string(what) + " must be a positive integer multiple (got ratio " +
                      std::to_string(ratio) + ")");
  }
  return n;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::pcip: return "pcip";
    case Method::modified_pcip: return "modified_pcip";
    case Method::l1ao_pcip: return "l1ao_pcip";
    case Method::l1ao_modified_pcip: return "l1ao_modified_pcip";
    case Method::oracle_only: return "oracle_only";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "pcip") return Method::pcip;
  if (name == "modified_pcip") return Method::modified_pcip;
  if (name == "l1ao_pcip") return Method::l1ao_pcip;
  if (name == "l1ao_modified_pcip") return Method::l1ao_modified_pcip;
  if (name == "oracle_only") return Method::oracle_only;
  throw ConfigError("unknown method: " + name);
}

bool is_l1(Method m) {
  return m == Method::l1ao_pcip || m == Method::l1ao_modified_pcip;
}

Vec newton_oracle(const ProblemOracle& oracle, double t, const Vec& v_init,
                  double tol, int max_iter) {
  Vec v = v_init;
  Vec g;
  Mat h;
  for (int iter = 0; iter < max_iter; ++iter) {
    oracle.grad_and_hess(t, v, g, h);  // throws DomainViolation on infeasible start
    if (g.norm() <= tol) return v;
    Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success) {
      throw NumericError("newton_oracle: Hessian not positive definite at t=" +
                         std::to_string(t));
    }
    const Vec step = -llt.solve(g);
    const double phi0 = oracle.value(t, v);
    const double slope = g.dot(step);
    // Below the representable resolution of phi the Armijo test is noise;
    // a feasible full step inside the quadratic basin is accepted as is.
    const bool sub_resolution = std::abs(slope) <= 1e-14 * std::max(1.0, std::abs(phi0));
    double alpha = 1.0;
    int backtracks = 0;
    while (true) {
      const Vec cand = v + alpha * step;
      if (oracle.feasible(t, cand) &&
          (sub_resolution ||
           oracle.value(t, cand) <= phi0 + 1e-4 * alpha * slope)) {
        v = cand;
        break;
      }
      alpha *= 0.5;
      if (++backtracks > 60) {
        throw NumericError("newton_oracle: line search stalled at |grad|=" +
                           std::to_string(g.norm()) + ", t=" + std::to_string(t));
      }
    }
  }
  oracle.grad_and_hess(t, v, g, h);
  if (g.norm() <= tol) return v;
  throw NumericError("newton_oracle: no convergence in " + std::to_string(max_iter) +
                     " iterations; |grad|=" + std::to_string(g.norm()) +
                     ", t=" + std::to_string(t));
}

RunResult run(Scenario& sc, const SimConfig& cfg) {
  const int n = sc.dim;
  if (cfg.dt <= 0.0 || cfg.t_f <= 0.0) throw ConfigError("dt and t_f must be positive");
  if (cfg.v0.size() != n) throw ConfigError("v0 dimension mismatch");
  if (cfg.record_stride < 1) throw ConfigError("record_stride must be >= 1");
  const long steps = checked_multiple(cfg.t_f, cfg.dt, "t_f / dt");

  const bool l1 = is_l1(cfg.method);
  long sample_stride = 0;
  Vec mu;
  if (l1) {
    cfg.l1.validate();
    if (cfg.l1.a_s_diag.size() != n) throw ConfigError("A_s dimension mismatch");
    sample_stride = checked_multiple(cfg.l1.T_s, cfg.dt, "T_s / dt");
    mu = mu_gain(cfg.l1.a_s_diag, cfg.l1.T_s);
  }
  const bool pcip_base = cfg.method == Method::pcip || cfg.method == Method::l1ao_pcip;
  if (cfg.method != Method::oracle_only) {
    if (pcip_base) {
      cfg.pcip.validate();
      if (cfg.pcip.P.rows() != n) throw ConfigError("P dimension mismatch");
    } else {
      cfg.mpcip.validate();
      if (cfg.mpcip.P.rows() != n) throw ConfigError("P dimension mismatch");
    }
  }

  if (!sc.oracle.feasible(0.0, cfg.v0)) {
    throw ConfigError("v0 is infeasible at t=0");
  }

  RunResult out;
  RunSummary& sum = out.summary;
  sum.scenario = sc.name;
  sum.method = cfg.method;
  out.trace.reserve(static_cast<size_t>(steps / cfg.record_stride + 2));

  Vec v = cfg.v0;
  AdaptationState ad;
  if (l1) ad = AdaptationState::initial(sc.oracle, 0.0, v);

  Vec vstar_warm = v;
  auto solve_star = [&](double t) -> Vec {
    if (sc.oracle.feasible(t, vstar_warm)) {
      vstar_warm = newton_oracle(sc.oracle, t, vstar_warm);
    } else {
      vstar_warm = newton_oracle(sc.oracle, t, sc.feasible_point(t));
    }
    return vstar_warm;
  };

  // Time-invariant treatment for the comparator mode: restart from the
  // static reference every step, with the scenario's interior point standing
  // in for a feasibility phase when the reference is infeasible.
  auto solve_cold = [&](double t) -> Vec {
    if (sc.oracle.feasible(t, cfg.v0)) {
      return newton_oracle(sc.oracle, t, cfg.v0);
    }
    return newton_oracle(sc.oracle, t, sc.feasible_point(t));
  };

  auto record_state_row = [&](double t, const Vec& vi, const Vec& vs,
                              const Vec& vdot_b, const Vec& vdot_a,
                              std::int64_t elapsed) {
    TraceRow row;
    row.t = t;
    row.v = vi;
    row.v_star = vs;
    row.grad_norm = sc.oracle.grad_v(t, vi).norm();
    row.cost_gap = sc.oracle.value(t, vi) - sc.oracle.value(t, vs);
    row.sigma_true = true_sigma(sc.oracle, sc.model, t, vi);
    row.sigma_hat = l1 ? ad.sigma_hat_held : Vec::Zero(n);
    row.vdot_b = vdot_b;
    row.vdot_a = vdot_a;
    row.step_elapsed_ns = elapsed;
    row.feasible = true;
    out.trace.push_back(std::move(row));
  };

  std::int64_t method_ns = 0;
  std::int64_t oracle_ns = 0;
  long oracle_solves = 0;
  long executed = 0;

  // Hot-loop workspace; the step itself must stay allocation-light so the
  // per-step timings reflect the update laws rather than memory churn.
  Vec g(n), gvt_hat(n), vdot_b(n), vdot(n), tmp(n), hv(n), v_prev(n);
  Mat h(n, n);
  Eigen::LLT<Mat> llt(n);
  const Vec zero = Vec::Zero(n);

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const double t_next = static_cast<double>(k + 1) * cfg.dt;
    const bool record = (k % cfg.record_stride == 0);
    v_prev = v;

    if (cfg.method == Method::oracle_only) {
      // The method under test is the per-instant solve itself.
      const auto t0 = Clock::now();
      const Vec vs = solve_cold(t);
      const std::int64_t ns = ns_since(t0);
      method_ns += ns;
      oracle_ns += ns;
      ++oracle_solves;
      ++executed;
      v = vs;
      vstar_warm = vs;
      if (record) record_state_row(t, v, vs, zero, zero, ns);
    } else {
      Vec vs;
      if (record) {
        const auto t0 = Clock::now();
        vs = solve_star(t);
        oracle_ns += ns_since(t0);
        ++oracle_solves;
      }

      const auto t0 = Clock::now();
      sc.oracle.grad_and_hess(t, v, g, h);
      llt.compute(h);
      if (llt.info() != Eigen::Success) {
        throw NumericError("run: Hessian not positive definite at t=" + std::to_string(t));
      }
      if (l1 && k % sample_stride == 0) {
        const long i = ad.last_sample_index + 1;
        if (i == 0) {
          ad.h_held.setZero();
          ad.sigma_hat_held.setZero();
        } else {
          tmp = ad.grad_hat - g;
          ad.h_held = mu.cwiseProduct(tmp);
          ad.sigma_hat_held = llt.solve(ad.h_held);
        }
        ad.last_sample_index = i;
      }
      gvt_hat = sc.model.grad_vt_hat(t, v);
      if (pcip_base) {
        tmp.noalias() = cfg.pcip.P * g;
        tmp += gvt_hat;
      } else {
        tmp.noalias() = cfg.mpcip.P * g;
        tmp /= std::max(g.norm(), cfg.mpcip.epsilon);
        tmp += gvt_hat;
      }
      vdot_b = -llt.solve(tmp);
      if (l1) {
        vdot = vdot_b + ad.vdot_a;
        hv.noalias() = h * vdot;
        ad.grad_hat +=
            cfg.dt * (cfg.l1.a_s_diag.cwiseProduct(ad.grad_hat - g) + gvt_hat + hv +
                      ad.h_held);
        v += cfg.dt * vdot;
        ad.vdot_a += (-cfg.dt * cfg.l1.omega) * (ad.vdot_a + ad.sigma_hat_held);
      } else {
        vdot = vdot_b;
        v += cfg.dt * vdot;
      }
      const std::int64_t ns = ns_since(t0);
      method_ns += ns;
      ++executed;
      sum.max_rate_norm = std::max(sum.max_rate_norm, vdot.norm());
      if (record) {
        record_state_row(t, v_prev, vs, vdot_b, l1 ? (vdot - vdot_b).eval() : zero, ns);
      }
    }

    if (sc.world_step) sc.world_step(t_next, v_prev, v, cfg.dt);

    if (!sc.oracle.feasible(t_next, v)) {
      TraceRow row;
      row.t = t_next;
      row.v = v;
      row.v_star = solve_star(t_next);
      row.grad_norm = kNaN;
      row.cost_gap = kNaN;
      row.sigma_true = Vec::Constant(n, kNaN);
      row.sigma_hat = l1 ? ad.sigma_hat_held : zero;
      row.vdot_b = Vec::Constant(n, kNaN);
      row.vdot_a = l1 ? ad.vdot_a : zero;
      row.step_elapsed_ns = 0;
      row.feasible = false;
      out.trace.push_back(std::move(row));
      sum.terminated_early = true;
      sum.reason = "constraint " + std::to_string(sc.oracle.first_violated(t_next, v)) +
                   " violated at t=" + std::to_string(t_next);
      break;
    }
  }

  if (!sum.terminated_early) {
    const double t_end = static_cast<double>(steps) * cfg.dt;
    record_state_row(t_end, v, solve_star(t_end), zero, l1 ? ad.vdot_a : zero, 0);
  }

  sum.steps = executed;
  sum.mean_step_elapsed_ns =
      executed > 0 ? static_cast<double>(method_ns) / static_cast<double>(executed) : 0.0;
  sum.mean_oracle_elapsed_ns =
      oracle_solves > 0 ? static_cast<double>(oracle_ns) / static_cast<double>(oracle_solves)
                        : 0.0;

  for (const TraceRow& row : out.trace) {
    if (!row.feasible) continue;
    if (std::isfinite(row.grad_norm)) {
      sum.sup_grad_norm = std::max(sum.sup_grad_norm, row.grad_norm);
    }
    if (std::isfinite(row.cost_gap)) {
      sum.sup_cost_gap = std::max(sum.sup_cost_gap, row.cost_gap);
    }
    const double verr = (row.v - row.v_star).norm();
    if (std::isfinite(verr)) {
      sum.sup_variable_error = std::max(sum.sup_variable_error, verr);
    }
  }
  return out;
}

std::vector<TimingTableRow> timing_report(const std::vector<RunSummary>& summaries) {
  if (summaries.empty()) throw ConfigError("timing_report: no runs");
  double oracle_mean = 0.0;
  for (const RunSummary& s : summaries) {
    if (s.method == Method::oracle_only) oracle_mean = s.mean_step_elapsed_ns;
  }
  std::vector<TimingTableRow> rows;
  rows.reserve(summaries.size());
  for (const RunSummary& s : summaries) {
    TimingTableRow r;
    r.method = method_name(s.method);
    r.mean_step_ms = s.mean_step_elapsed_ns / 1e6;
    r.ratio_vs_oracle = oracle_mean > 0.0 ? s.mean_step_elapsed_ns / oracle_mean : 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tvopt
