#include "tvopt/scenarios.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

namespace tvopt {

namespace {

Vec vec1(double x) { return Vec::Constant(1, x); }

// Prediction model that foresees no drift at all. Matches the barrier
// composition of a rates-frozen problem exactly, without the indirection.
PredictionModel zero_model(int n) {
  PredictionModel m;
  m.grad_vt_hat = [n](double, const Vec&) { return Vec::Zero(n).eval(); };
  m.grad_vtt_hat = [n](double, const Vec&) { return Vec::Zero(n).eval(); };
  m.grad_vvt_hat = [n](double, const Vec&) { return Mat::Zero(n, n).eval(); };
  return m;
}

ScalarFunction quadratic_objective_1d() {
  ScalarFunction f;
  f.dim = 1;
  f.value = [](double, const Vec& v) { return 0.5 * v(0) * v(0); };
  f.grad_v = [](double, const Vec& v) { return vec1(v(0)); };
  f.hess_vv = [](double, const Vec&) { return Mat::Identity(1, 1); };
  f.grad_vt = [](double, const Vec&) { return vec1(0.0); };
  f.grad_t = [](double, const Vec&) { return 0.0; };
  f.grad_tt = [](double, const Vec&) { return 0.0; };
  f.grad_vtt = [](double, const Vec&) { return vec1(0.0); };
  f.grad_vvt = [](double, const Vec&) { return Mat::Zero(1, 1); };
  f.grad_vvv = [](double, const Vec&) { return Tensor3::zero(1); };
  return f;
}

// v + d(t) <= 0 with streaming data d(t) = 3 sin(3t).
ScalarFunction streaming_constraint_1d() {
  auto d = [](double t) { return 3.0 * std::sin(3.0 * t); };
  auto d_dot = [](double t) { return 9.0 * std::cos(3.0 * t); };
  auto d_ddot = [](double t) { return -27.0 * std::sin(3.0 * t); };
  ScalarFunction f;
  f.dim = 1;
  f.value = [d](double t, const Vec& v) { return v(0) + d(t); };
  f.grad_v = [](double, const Vec&) { return vec1(1.0); };
  f.hess_vv = [](double, const Vec&) { return Mat::Zero(1, 1); };
  f.grad_vt = [](double, const Vec&) { return vec1(0.0); };
  f.grad_t = [d_dot](double t, const Vec&) { return d_dot(t); };
  f.grad_tt = [d_ddot](double t, const Vec&) { return d_ddot(t); };
  f.grad_vtt = [](double, const Vec&) { return vec1(0.0); };
  f.grad_vvt = [](double, const Vec&) { return Mat::Zero(1, 1); };
  f.grad_vvv = [](double, const Vec&) { return Tensor3::zero(1); };
  return f;
}

}  // namespace

Scenario example1(const Example1Overrides& o) {
  TVProblem truth;
  truth.objective = quadratic_objective_1d();
  truth.constraints.push_back(streaming_constraint_1d());
  truth.m_f = 1.0;

  Scenario sc;
  sc.name = "example1";
  sc.dim = 1;
  sc.m_f = 1.0;
  sc.oracle = compose_barrier(truth);
  // Freezing the streaming data (d_dot == 0) zeroes every prediction surface.
  sc.model = o.exact_model ? PredictionModel::from_oracle(sc.oracle) : zero_model(1);
  sc.feasible_point = [](double t) { return vec1(-3.0 * std::sin(3.0 * t) - 1.0); };
  sc.plot_boundary = [](double t) { return -3.0 * std::sin(3.0 * t); };

  SimConfig d;
  d.dt = 1e-3;
  d.t_f = o.t_f.value_or(10.0);
  d.v0 = o.v0.value_or(vec1(-1.0));
  d.method = Method::l1ao_pcip;
  d.pcip.P = Mat::Constant(1, 1, 10.0);
  d.mpcip.P = Mat::Constant(1, 1, 10.0);
  d.mpcip.epsilon = 1.0;
  d.l1.a_s_diag = vec1(-1.0);
  d.l1.T_s = 1e-3;
  d.l1.omega = 1e3;
  sc.defaults = d;

  if (!sc.oracle.feasible(0.0, d.v0)) {
    throw ConfigError("example1: v0 is infeasible at t=0");
  }
  return sc;
}

std::vector<HalfPlane> local_freespace(const Vec& x_c, const std::vector<Disc>& obstacles) {
  std::vector<HalfPlane> planes;
  planes.reserve(obstacles.size());
  for (size_t i = 0; i < obstacles.size(); ++i) {
    const Disc& ob = obstacles[i];
    const Vec gap = ob.center - x_c;
    const double dist = gap.norm();
    if (dist <= ob.radius) {
      throw NumericError("robot is in collision with obstacle " + std::to_string(i));
    }
    HalfPlane p;
    p.a = gap / dist;
    p.b = p.a.dot(x_c) + 0.5 * (dist - ob.radius);
    p.a_dot = Vec::Zero(x_c.size());
    p.b_dot = 0.0;
    planes.push_back(std::move(p));
  }
  return planes;
}

namespace {

std::vector<HalfPlane> freespace_with_rates(const Vec& x_c, const Vec& x_c_dot,
                                            const std::vector<Disc>& obstacles) {
  std::vector<HalfPlane> planes = local_freespace(x_c, obstacles);
  for (size_t i = 0; i < planes.size(); ++i) {
    HalfPlane& p = planes[i];
    const double dist = (obstacles[i].center - x_c).norm();
    const Mat da = (p.a * p.a.transpose() - Mat::Identity(2, 2)) / dist;
    p.a_dot = da * x_c_dot;
    p.b_dot = p.a_dot.dot(x_c) + 0.5 * p.a.dot(x_c_dot);
  }
  return planes;
}

struct Ex2World {
  std::vector<Disc> obstacles;
  double k_r = 1.0;
  double t_anchor = 0.0;
  Vec x_c;
  std::vector<HalfPlane> planes;

  void regen(double t, const Vec& goal) {
    const Vec x_c_dot = -k_r * (x_c - goal);
    planes = freespace_with_rates(x_c, x_c_dot, obstacles);
    t_anchor = t;
  }
};

using WorldPtr = std::shared_ptr<Ex2World>;

ScalarFunction tracking_objective_2d(double t_f, bool with_target_rate) {
  const double w = 2.0 * std::numbers::pi / t_f;
  auto x_d = [w](double t) {
    return (Vec(2) << 15.0 * std::cos(w * t), 15.0 * std::sin(w * t)).finished();
  };
  auto x_d_dot = [w, with_target_rate](double t) -> Vec {
    if (!with_target_rate) return Vec::Zero(2);
    return (Vec(2) << -15.0 * w * std::sin(w * t), 15.0 * w * std::cos(w * t)).finished();
  };
  auto x_d_ddot = [w, with_target_rate](double t) -> Vec {
    if (!with_target_rate) return Vec::Zero(2);
    return (Vec(2) << -15.0 * w * w * std::cos(w * t), -15.0 * w * w * std::sin(w * t))
        .finished();
  };
  ScalarFunction f;
  f.dim = 2;
  f.value = [x_d](double t, const Vec& v) { return 0.5 * (v - x_d(t)).squaredNorm(); };
  f.grad_v = [x_d](double t, const Vec& v) -> Vec { return v - x_d(t); };
  f.hess_vv = [](double, const Vec&) { return Mat::Identity(2, 2); };
  f.grad_vt = [x_d_dot](double t, const Vec&) -> Vec { return -x_d_dot(t); };
  f.grad_t = [x_d, x_d_dot](double t, const Vec& v) {
    return -(v - x_d(t)).dot(x_d_dot(t));
  };
  f.grad_tt = [x_d, x_d_dot, x_d_ddot](double t, const Vec& v) {
    return x_d_dot(t).squaredNorm() - (v - x_d(t)).dot(x_d_ddot(t));
  };
  f.grad_vtt = [x_d_ddot](double t, const Vec&) -> Vec { return -x_d_ddot(t); };
  f.grad_vvt = [](double, const Vec&) { return Mat::Zero(2, 2); };
  f.grad_vvv = [](double, const Vec&) { return Tensor3::zero(2); };
  return f;
}

ScalarFunction freespace_constraint(const WorldPtr& w, size_t i, bool with_world_rates) {
  auto plane_at = [w, i, with_world_rates](double t) {
    const HalfPlane& p = w->planes[i];
    const double dt = t - w->t_anchor;
    struct {
      Vec a;
      double b;
      Vec a_dot;
      double b_dot;
    } out{p.a, p.b, p.a_dot, p.b_dot};
    if (!with_world_rates) {
      out.a_dot = Vec::Zero(2);
      out.b_dot = 0.0;
    }
    out.a += dt * out.a_dot;
    out.b += dt * out.b_dot;
    return out;
  };
  ScalarFunction f;
  f.dim = 2;
  f.value = [plane_at](double t, const Vec& v) {
    const auto p = plane_at(t);
    return p.a.dot(v) - p.b;
  };
  f.grad_v = [plane_at](double t, const Vec&) -> Vec { return plane_at(t).a; };
  f.hess_vv = [](double, const Vec&) { return Mat::Zero(2, 2); };
  f.grad_vt = [plane_at](double t, const Vec&) -> Vec { return plane_at(t).a_dot; };
  f.grad_t = [plane_at](double t, const Vec& v) {
    const auto p = plane_at(t);
    return p.a_dot.dot(v) - p.b_dot;
  };
  f.grad_tt = [](double, const Vec&) { return 0.0; };
  f.grad_vtt = [](double, const Vec&) { return Vec::Zero(2); };
  f.grad_vvt = [](double, const Vec&) { return Mat::Zero(2, 2); };
  f.grad_vvv = [](double, const Vec&) { return Tensor3::zero(2); };
  return f;
}

PenaltySchedule example2_penalty() {
  PenaltySchedule p;
  p.c = [](double t) { return 50.0 * std::exp(t / 50.0); };
  p.cdot = [](double t) { return std::exp(t / 50.0); };
  p.cddot = [](double t) { return std::exp(t / 50.0) / 50.0; };
  return p;
}

}  // namespace

Scenario example2(const Example2Overrides& o) {
  const double t_f = o.t_f.value_or(50.0);
  auto world = std::make_shared<Ex2World>();
  world->obstacles = o.obstacles.value_or(std::vector<Disc>{
      {(Vec(2) << 6.0, 6.0).finished(), 2.0},
      {(Vec(2) << -6.0, 6.0).finished(), 2.0},
  });
  world->k_r = o.k_r;
  world->x_c = o.robot_start.value_or((Vec(2) << 0.0, -10.0).finished());
  const Vec v0 = o.v0.value_or(world->x_c);
  world->regen(0.0, v0);

  auto build = [&](bool target_rate, bool world_rates) {
    TVProblem p;
    p.objective = tracking_objective_2d(t_f, target_rate);
    for (size_t i = 0; i < world->obstacles.size(); ++i) {
      p.constraints.push_back(freespace_constraint(world, i, world_rates));
    }
    p.penalty = example2_penalty();
    p.m_f = 1.0;
    return compose_barrier(std::move(p));
  };

  Scenario sc;
  sc.name = "example2";
  sc.dim = 2;
  sc.m_f = 1.0;
  sc.oracle = build(true, true);
  sc.model = PredictionModel::from_oracle(
      o.exact_model ? sc.oracle : build(false, o.known_world_rates));
  sc.feasible_point = [world](double) { return world->x_c; };
  sc.plot_obstacles = world->obstacles;
  sc.world_step = [world](double t_next, const Vec& v_motion, const Vec& v_next,
                          double dt) {
    world->x_c += dt * (-world->k_r * (world->x_c - v_motion));
    world->regen(t_next, v_next);
  };

  SimConfig d;
  d.dt = 1e-3;
  d.t_f = t_f;
  d.v0 = v0;
  d.method = Method::l1ao_pcip;
  d.pcip.P = Mat::Identity(2, 2);
  d.mpcip.P = 10.0 * Mat::Identity(2, 2);
  d.mpcip.epsilon = 0.1;
  d.l1.a_s_diag = Vec::Constant(2, -0.1);
  d.l1.T_s = 1e-3;
  d.l1.omega = 50.0;
  sc.defaults = d;

  if (!sc.oracle.feasible(0.0, v0)) {
    throw ConfigError("example2: initial projected goal is infeasible");
  }
  return sc;
}

Scenario custom_quadratic(const CustomQuadratic& p, bool exact_model) {
  const int n = p.dim;
  if (n < 1) throw ConfigError("custom_quadratic: dim must be >= 1");
  if (p.kappa <= 0.0) throw ConfigError("custom_quadratic: kappa must be positive");
  auto coef = [n](const Vec& c, const char* what) {
    if (c.size() == 0) return Vec::Zero(n).eval();
    if (c.size() != n) throw ConfigError(std::string("custom_quadratic: ") + what +
                                         " has wrong dimension");
    return c;
  };
  const Vec c0 = coef(p.c0, "c0");
  const Vec c1 = coef(p.c1, "c1");
  const Vec amp = coef(p.amp, "amp");
  const Vec freq = coef(p.freq, "freq");
  const Vec phase = coef(p.phase, "phase");
  const double kappa = p.kappa;

  auto q = [=](double t) -> Vec {
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      out(i) = c0(i) + c1(i) * t + amp(i) * std::sin(freq(i) * t + phase(i));
    }
    return out;
  };
  auto q_dot = [=](double t) -> Vec {
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      out(i) = c1(i) + amp(i) * freq(i) * std::cos(freq(i) * t + phase(i));
    }
    return out;
  };
  auto q_ddot = [=](double t) -> Vec {
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      out(i) = -amp(i) * freq(i) * freq(i) * std::sin(freq(i) * t + phase(i));
    }
    return out;
  };

  auto build = [&]() {
    TVProblem prob;
    ScalarFunction f;
    f.dim = n;
    f.value = [=](double t, const Vec& v) { return 0.5 * kappa * (v - q(t)).squaredNorm(); };
    f.grad_v = [=](double t, const Vec& v) -> Vec { return kappa * (v - q(t)); };
    f.hess_vv = [=](double, const Vec&) -> Mat { return kappa * Mat::Identity(n, n); };
    f.grad_vt = [=](double t, const Vec&) -> Vec { return -kappa * q_dot(t); };
    f.grad_t = [=](double t, const Vec& v) { return -kappa * (v - q(t)).dot(q_dot(t)); };
    f.grad_tt = [=](double t, const Vec& v) {
      return kappa * (q_dot(t).squaredNorm() - (v - q(t)).dot(q_ddot(t)));
    };
    f.grad_vtt = [=](double t, const Vec&) -> Vec { return -kappa * q_ddot(t); };
    f.grad_vvt = [=](double, const Vec&) { return Mat::Zero(n, n).eval(); };
    f.grad_vvv = [=](double, const Vec&) { return Tensor3::zero(n); };
    prob.objective = std::move(f);
    prob.m_f = kappa;
    return compose_barrier(std::move(prob));
  };

  Scenario sc;
  sc.name = "custom";
  sc.dim = n;
  sc.m_f = kappa;
  sc.oracle = build();
  sc.model = exact_model ? PredictionModel::from_oracle(sc.oracle) : zero_model(n);
  sc.feasible_point = [q](double t) { return q(t); };

  SimConfig d;
  d.dt = 1e-3;
  d.t_f = 5.0;
  d.v0 = q(0.0);
  d.method = Method::l1ao_pcip;
  d.pcip.P = 10.0 * Mat::Identity(n, n);
  d.mpcip.P = 10.0 * Mat::Identity(n, n);
  d.mpcip.epsilon = 1.0;
  d.l1.a_s_diag = Vec::Constant(n, -1.0);
  d.l1.T_s = 1e-3;
  d.l1.omega = 1e3;
  sc.defaults = d;
  return sc;
}

std::vector<std::pair<double, Vec>> sample_points(const Scenario& sc, int count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.01, sc.defaults.t_f);
  std::normal_distribution<double> nz(0.0, 0.5);
  std::vector<std::pair<double, Vec>> samples;
  samples.reserve(static_cast<size_t>(count));
  int attempts = 0;
  while (static_cast<int>(samples.size()) < count) {
    if (++attempts > 200 * count) {
      throw ConfigError("sample_points: could not find enough feasible samples");
    }
    const double t = ut(rng);
    Vec v = sc.feasible_point(t);
    for (int i = 0; i < v.size(); ++i) v(i) += nz(rng);
    if (sc.oracle.feasible(t, v) && sc.oracle.min_slack(t, v) > 1e-3) {
      samples.emplace_back(t, std::move(v));
    }
  }
  return samples;
}

}  // namespace tvopt
