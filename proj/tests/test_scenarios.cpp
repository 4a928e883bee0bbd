#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tvopt/scenarios.hpp"
#include "tvopt/simulation.hpp"

using namespace tvopt;

namespace {
Vec vec1(double x) { return Vec::Constant(1, x); }
Vec vec2(double x, double y) { return (Vec(2) << x, y).finished(); }
}

TEST_CASE("example1 defaults and closed forms") {
  Scenario sc = example1();
  CHECK(sc.dim == 1);
  CHECK(sc.m_f == 1.0);
  CHECK(sc.defaults.l1.T_s == 1e-3);
  CHECK(sc.defaults.l1.omega == 1e3);
  CHECK(sc.defaults.l1.a_s_diag(0) == -1.0);

  SUBCASE("value and minimizer at t = 0") {
    const Vec vstar = newton_oracle(sc.oracle, 0.0, sc.feasible_point(0.0));
    CHECK(vstar(0) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(sc.oracle.value(0.0, vstar) == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("prediction model returns zero everywhere") {
    for (double t : {0.0, 0.3, 2.7}) {
      CHECK(sc.model.grad_vt_hat(t, vec1(-4.0))(0) == 0.0);
    }
  }

  SUBCASE("hessian lower bound matches m_f") {
    for (const auto& [t, v] : sample_points(sc, 50)) {
      CHECK(sc.oracle.hess_vv(t, v)(0, 0) >= sc.m_f);
    }
  }

  SUBCASE("infeasible override is rejected") {
    CHECK_THROWS_AS(example1({.v0 = vec1(2.0)}), ConfigError);
  }
}

TEST_CASE("local freespace construction") {
  SUBCASE("half-gap boundary along the axis") {
    const std::vector<Disc> obs = {{vec2(4.0, 0.0), 2.0}};
    const auto planes = local_freespace(vec2(0.0, 0.0), obs);
    REQUIRE(planes.size() == 1);
    CHECK(planes[0].a(0) == doctest::Approx(1.0));
    CHECK(planes[0].a(1) == doctest::Approx(0.0));
    CHECK(planes[0].b == doctest::Approx(1.0));
  }

  SUBCASE("no obstacles, no planes") {
    CHECK(local_freespace(vec2(0.0, 0.0), {}).empty());
  }

  SUBCASE("symmetric obstacles give the |x1| <= 1 slab") {
    const std::vector<Disc> obs = {{vec2(4.0, 0.0), 2.0}, {vec2(-4.0, 0.0), 2.0}};
    const auto planes = local_freespace(vec2(0.0, 0.0), obs);
    REQUIRE(planes.size() == 2);
    CHECK(planes[0].a(0) == doctest::Approx(1.0));
    CHECK(planes[0].b == doctest::Approx(1.0));
    CHECK(planes[1].a(0) == doctest::Approx(-1.0));
    CHECK(planes[1].b == doctest::Approx(1.0));
  }

  SUBCASE("robot inside an obstacle is an error") {
    const std::vector<Disc> obs = {{vec2(0.5, 0.0), 2.0}};
    CHECK_THROWS_AS(local_freespace(vec2(0.0, 0.0), obs), NumericError);
  }

  SUBCASE("planes strictly separate the robot at generation time") {
    Scenario sc = example2();
    const Vec x_c = sc.feasible_point(0.0);
    CHECK(sc.oracle.min_slack(0.0, x_c) > 0.0);
  }
}

TEST_CASE("example2 target path and uncertainty") {
  const double t_f = 50.0;
  Scenario sc = example2();

  SUBCASE("closed target curve") {
    CustomQuadratic unused;
    const Vec x0 = vec2(15.0, 0.0);
    // grad_v of the objective is v - x_d(t); probe x_d through it.
    const Vec g0 = sc.oracle.grad_v(0.0, sc.defaults.v0);
    const Vec gf = sc.oracle.grad_v(t_f, sc.defaults.v0);
    CHECK((g0 - gf).norm() <= 1e-9);  // x_d(0) == x_d(t_f)
  }

  SUBCASE("target speed magnitude") {
    // With static world rates at t=0 (robot starts on its goal), the whole
    // prediction error is the target velocity term.
    const Vec v = sc.defaults.v0;
    const Vec err = sc.model.grad_vt_hat(0.0, v) - sc.oracle.grad_vt(0.0, v);
    CHECK(err.norm() == doctest::Approx(30.0 * M_PI / t_f).epsilon(1e-12));
  }

  SUBCASE("sigma equals minus the target velocity without constraints") {
    Example2Overrides o;
    o.obstacles = std::vector<Disc>{};
    Scenario open = example2(o);
    const double t = 7.0;
    const Vec v = vec2(1.0, 2.0);
    const Vec sigma = true_sigma(open.oracle, open.model, t, v);
    const double w = 2.0 * M_PI / t_f;
    const Vec xd_dot = vec2(-15.0 * w * std::sin(w * t), 15.0 * w * std::cos(w * t));
    CHECK((sigma + xd_dot).norm() <= 1e-12);
    CHECK(sigma.norm() == doctest::Approx(xd_dot.norm()).epsilon(1e-12));
  }

  SUBCASE("unconstrained minimizer is the target itself") {
    Example2Overrides o;
    o.obstacles = std::vector<Disc>{};
    Scenario open = example2(o);
    const Vec vstar = newton_oracle(open.oracle, 0.0, open.feasible_point(0.0));
    CHECK((vstar - vec2(15.0, 0.0)).norm() <= 1e-9);
  }
}

TEST_CASE("example2 collision freedom and improvement") {
  auto go = [](Method m) {
    Scenario sc = example2();
    SimConfig cfg = sc.defaults;
    cfg.method = m;
    cfg.record_stride = 10;
    return run(sc, cfg);
  };

  const RunResult pcip = go(Method::pcip);
  const RunResult l1 = go(Method::l1ao_pcip);
  REQUIRE(!pcip.summary.terminated_early);
  REQUIRE(!l1.summary.terminated_early);

  // Every recorded row of a completed run is strictly feasible.
  for (const TraceRow& row : l1.trace) CHECK(row.feasible);

  auto window_mean = [](const RunResult& r) {
    double sum = 0.0;
    long count = 0;
    for (const TraceRow& row : r.trace) {
      if (row.t < 12.5) continue;
      sum += (row.v - row.v_star).norm();
      ++count;
    }
    return sum / static_cast<double>(count);
  };
  CHECK(window_mean(l1) <= 0.5 * window_mean(pcip));
}

TEST_CASE("custom quadratic scenario") {
  CustomQuadratic p;
  p.dim = 1;
  p.kappa = 2.0;
  p.c1 = vec1(-4.5);
  Scenario sc = custom_quadratic(p);
  CHECK(sc.m_f == 2.0);

  // sigma = -H^{-1}(0 - grad_vt) with grad_vt = -kappa q_dot = 9.
  const Vec sigma = true_sigma(sc.oracle, sc.model, 1.0, vec1(0.0));
  CHECK(sigma(0) == doctest::Approx(4.5).epsilon(1e-12));

  const auto report = check_derivatives(sc.oracle, sample_points(sc, 30));
  CHECK(report.pass());

  SUBCASE("invalid parameters rejected") {
    CustomQuadratic bad;
    bad.dim = 0;
    CHECK_THROWS_AS(custom_quadratic(bad), ConfigError);
    bad.dim = 2;
    bad.kappa = -1.0;
    CHECK_THROWS_AS(custom_quadratic(bad), ConfigError);
    bad.kappa = 1.0;
    bad.amp = vec1(0.1);  // wrong dimension
    CHECK_THROWS_AS(custom_quadratic(bad), ConfigError);
  }
}

TEST_CASE("example1 closed forms match finite differences on a wide grid") {
  Scenario sc = example1();
  const auto report = check_derivatives(sc.oracle, sample_points(sc, 200, 5));
  CHECK(report.pass());
}
