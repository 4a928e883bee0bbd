#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tvopt/certification.hpp"
#include "tvopt/scenarios.hpp"
#include "tvopt/simulation.hpp"

using namespace tvopt;

namespace {

DeltaBase estimate_for(Scenario& sc, double rho, const DeltaGrid& grid) {
  const BaselineCertificate bc = BaselineCertificate::pcip(sc.defaults.pcip.P);
  const PcipConfig pc = sc.defaults.pcip;
  auto rate = [&](double t, const Vec& v) {
    return pcip_rate(pc, sc.oracle, sc.model, t, v);
  };
  auto minimizer = [&](double t, const Vec& warm) {
    if (warm.size() > 0 && sc.oracle.feasible(t, warm)) {
      return newton_oracle(sc.oracle, t, warm);
    }
    return newton_oracle(sc.oracle, t, sc.feasible_point(t));
  };
  return estimate_deltas(sc.oracle, sc.model, rate, bc.dV, rho, sc.m_f,
                         sc.defaults.t_f, grid, minimizer);
}

}  // namespace

TEST_CASE("delta closure") {
  SUBCASE("no prediction error means no closure growth") {
    DeltaBase b;
    b.hess = 1.0;
    const DerivedDeltas d = delta_closure(b, 1.0, 1);
    CHECK(d.sigma == 0.0);
    CHECK(d.sigma_hat == 0.0);
    CHECK(d.sigma_dot == 0.0);
  }

  SUBCASE("hand substitution in dependency order") {
    DeltaBase b;
    b.grad_vt_err = 2.0;
    b.hess = 3.0;
    b.vdot_b = 1.0;
    b.hess_t = 0.0;
    b.hess_v = 1.0;
    b.grad_vtt_err = 0.0;
    b.grad_vvt_err = 1.0;
    const DerivedDeltas d = delta_closure(b, 1.0, 1);
    CHECK(d.sigma == doctest::Approx(2.0));
    CHECK(d.sigma_hat == doctest::Approx(6.0));
    CHECK(d.vdot == doctest::Approx(7.0));
    CHECK(d.hess_dot == doctest::Approx(7.0));
    CHECK(d.grad_vt_err_dot == doctest::Approx(7.0));
    CHECK(d.sigma_dot == doctest::Approx(21.0));
  }

  SUBCASE("sigma is linear in the prediction-error bound") {
    DeltaBase b;
    b.grad_vt_err = 2.0;
    b.hess = 3.0;
    const double s1 = delta_closure(b, 2.0, 3).sigma;
    b.grad_vt_err = 4.0;
    const double s2 = delta_closure(b, 2.0, 3).sigma;
    CHECK(s2 == doctest::Approx(2.0 * s1));
  }

  SUBCASE("negative bounds rejected") {
    DeltaBase b;
    b.hess = -1.0;
    CHECK_THROWS_AS(delta_closure(b, 1.0, 1), ConfigError);
  }
}

TEST_CASE("zetas") {
  const Vec a1 = Vec::Constant(1, -1.0);

  SUBCASE("no uncertainty, no zetas") {
    DeltaBase b;
    b.hess = 1.0;
    b.dV_dgrad = 1.0;
    const DerivedDeltas d = delta_closure(b, 1.0, 1);
    const Zetas z = zetas(d, b, 1.0, a1, 10.0, 1.0, 1);
    CHECK(z.z1 == 0.0);
    CHECK(z.z2 == 0.0);
    CHECK(z.z3 == 0.0);
    CHECK(z.z4 == 0.0);
  }

  SUBCASE("hand substitution") {
    // beta=1, omega=10, dV=1, hess=1, sigma=1, sigma_dot=2 -> z1 = 1/8 + 2/20
    DeltaBase b;
    b.dV_dgrad = 1.0;
    b.hess = 1.0;
    DerivedDeltas d;
    d.sigma = 1.0;
    d.sigma_dot = 2.0;
    const Zetas z = zetas(d, b, 1.0, a1, 10.0, 1.0, 1);
    CHECK(z.z1 == doctest::Approx(0.225));
    CHECK(z.z3 == doctest::Approx(10.0));
  }

  SUBCASE("zeta_1 decreases monotonically past omega = 2 beta") {
    DeltaBase b;
    b.dV_dgrad = 0.3;
    b.hess = 2.0;
    b.grad_vt_err = 1.5;
    b.grad_vtt_err = 0.7;
    b.vdot_b = 1.0;
    const DerivedDeltas d = delta_closure(b, 1.0, 2);
    const double beta = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double omega = 2.5; omega <= 2560.0; omega *= 2.0) {
      const double z1 = zetas(d, b, beta, Vec::Constant(2, -1.0), omega, 1.0, 2).z1;
      CHECK(z1 < prev);
      prev = z1;
    }
  }

  SUBCASE("omega == 2 beta is a singular denominator") {
    DeltaBase b;
    b.dV_dgrad = 1.0;
    b.hess = 1.0;
    const DerivedDeltas d = delta_closure(b, 1.0, 1);
    CHECK_THROWS_AS(zetas(d, b, 5.0, a1, 10.0, 1.0, 1), NumericError);
  }
}

TEST_CASE("certify") {
  L1Config l1;
  l1.a_s_diag = Vec::Constant(1, -1.0);
  l1.T_s = 1e-3;
  l1.omega = 1e3;
  const BaselineCertificate bc = BaselineCertificate::pcip(Mat::Constant(1, 1, 10.0));
  CHECK(bc.alpha_lo == 0.5);
  CHECK(bc.alpha_hi == 0.5);
  CHECK(bc.beta == doctest::Approx(10.0));

  SUBCASE("zero initial gradient gives rho = epsilon and V0 = 0") {
    DeltaBase b;
    b.hess = 1.0;
    b.dV_dgrad = 1.0;
    const TubeCertificate c = certify(bc, b, l1, 1.0, 1, Vec::Zero(1), 0.28);
    CHECK(c.rho == doctest::Approx(0.28));
    CHECK(c.V0 == 0.0);
  }

  SUBCASE("zero uncertainty is admissible for every omega with unbounded T_s") {
    DeltaBase b;
    b.hess = 1.0;
    b.dV_dgrad = 1.0;
    for (double omega : {1.0, 50.0, 1e3, 1e6}) {
      L1Config cfg = l1;
      cfg.omega = omega;
      const TubeCertificate c = certify(bc, b, cfg, 1.0, 1, Vec::Zero(1), 0.1);
      CHECK(c.admissible);
      CHECK(std::isinf(c.T_s_max));
    }
  }

  SUBCASE("inadmissibility is a result, not an exception") {
    DeltaBase b;
    b.hess = 10.0;
    b.dV_dgrad = 10.0;
    b.grad_vt_err = 100.0;
    b.grad_vtt_err = 100.0;
    const TubeCertificate c = certify(bc, b, l1, 1.0, 1, Vec::Zero(1), 0.1);
    CHECK(!c.admissible);
    CHECK(!c.violated.empty());
  }

  SUBCASE("ultimate bound decays toward the zeta floor") {
    DeltaBase b;
    b.hess = 1.0;
    b.dV_dgrad = 0.5;
    b.grad_vt_err = 0.2;
    const TubeCertificate c = certify(bc, b, l1, 1.0, 1, Vec::Constant(1, 0.1), 0.2);
    CHECK(c.ultimate_grad(10.0) < c.ultimate_grad(0.1));
    const double floor = std::sqrt((c.z.z1 + c.z.z4 * c.T_s) / c.alpha_lo);
    CHECK(c.ultimate_grad(50.0) == doctest::Approx(floor));
  }
}

TEST_CASE("estimate_deltas") {
  SUBCASE("exact model zeroes the error bounds") {
    Scenario sc = example1({.exact_model = true});
    DeltaGrid grid;
    grid.time_points = 64;
    const DeltaBase b = estimate_for(sc, 0.28, grid);
    CHECK(b.grad_vt_err == 0.0);
    CHECK(b.grad_vtt_err == 0.0);
    CHECK(b.grad_vvt_err == 0.0);
    CHECK(b.hess > 1.0);
  }

  SUBCASE("example1 tube maxima (regression fixture)") {
    Scenario sc = example1();
    DeltaGrid grid;
    const DeltaBase b = estimate_for(sc, 0.28, grid);
    // Values obtained from this pipeline at the default 1024 x 17 x {+1,-1}
    // grid; stable to well under 1% against a doubled grid.
    CHECK(b.vdot_b == doctest::Approx(5.2062).epsilon(0.01));
    CHECK(b.dV_dgrad == doctest::Approx(44.971).epsilon(0.01));
    CHECK(b.grad_vt_hat == 0.0);
    CHECK(b.grad_vt_err == doctest::Approx(2587.7).epsilon(0.01));
    CHECK(b.grad_vtt_err == doctest::Approx(357773.0).epsilon(0.01));
    CHECK(b.grad_vvt_err == doctest::Approx(182382.0).epsilon(0.01));
    CHECK(b.hess == doctest::Approx(2121.5).epsilon(0.01));
    CHECK(b.hess_t == doctest::Approx(182382.0).epsilon(0.01));
    CHECK(b.hess_v == doctest::Approx(186198.0).epsilon(0.01));

    // The paper-default (T_s, omega) fails the admissibility inequalities on
    // this problem: the closure constants explode near the barrier.
    const BaselineCertificate bc = BaselineCertificate::pcip(sc.defaults.pcip.P);
    const TubeCertificate c = certify(bc, b, sc.defaults.l1, 1.0, 1, Vec::Zero(1), 0.28);
    CHECK(!c.admissible);
  }

  SUBCASE("grid refinement moves the estimates by under 5%") {
    Scenario sc = example1();
    DeltaGrid coarse;
    DeltaGrid fine;
    fine.time_points = 2 * coarse.time_points;
    fine.radial_points = 2 * coarse.radial_points - 1;
    const DeltaBase a = estimate_for(sc, 0.28, coarse);
    const DeltaBase b = estimate_for(sc, 0.28, fine);
    auto close = [](double x, double y) {
      return std::abs(x - y) <= 0.05 * std::max({1e-12, std::abs(x), std::abs(y)});
    };
    CHECK(close(a.vdot_b, b.vdot_b));
    CHECK(close(a.dV_dgrad, b.dV_dgrad));
    CHECK(close(a.grad_vt_err, b.grad_vt_err));
    CHECK(close(a.grad_vtt_err, b.grad_vtt_err));
    CHECK(close(a.grad_vvt_err, b.grad_vvt_err));
    CHECK(close(a.hess, b.hess));
    CHECK(close(a.hess_t, b.hess_t));
    CHECK(close(a.hess_v, b.hess_v));
  }

  SUBCASE("drifting quadratic with small oscillation is admissible") {
    CustomQuadratic p;
    p.dim = 2;
    p.kappa = 1.0;
    p.amp = Vec::Constant(2, 0.1);
    p.freq = Vec::Constant(2, 1.0);
    p.phase = (Vec(2) << 0.0, M_PI / 2.0).finished();
    Scenario sc = custom_quadratic(p);
    DeltaGrid grid;
    grid.time_points = 256;
    const DeltaBase b = estimate_for(sc, 0.15, grid);
    // |q_dot| = 0.1 on the circular path, times the 1.1 safety factor.
    CHECK(b.grad_vt_err == doctest::Approx(0.11).epsilon(1e-6));
    CHECK(b.hess == doctest::Approx(1.1).epsilon(1e-9));
    const BaselineCertificate bc = BaselineCertificate::pcip(sc.defaults.pcip.P);
    const TubeCertificate c = certify(bc, b, sc.defaults.l1, sc.m_f, 2, Vec::Zero(2), 0.15);
    CHECK(c.admissible);
    CHECK(c.T_s_max >= 1e-3);
  }
}

TEST_CASE("adaptation accuracy on a constant-uncertainty system") {
  // Constant Hessian H = 2 and constant sigma = 4.5; Lemma-3 style bound
  // |sigma_hat - sigma| <= zeta_2 * T_s for t >= T_s with exact deltas.
  CustomQuadratic p;
  p.dim = 1;
  p.kappa = 2.0;
  p.c1 = Vec::Constant(1, -4.5);
  Scenario sc = custom_quadratic(p);

  DeltaBase b;
  b.hess = 2.0;
  b.grad_vt_err = 9.0;  // |kappa * q_dot|
  const DerivedDeltas d = delta_closure(b, sc.m_f, 1);
  CHECK(d.sigma == doctest::Approx(4.5));
  const Zetas z = zetas(d, b, 10.0, Vec::Constant(1, -1.0), 1e3, sc.m_f, 1);
  CHECK(z.z2 == doctest::Approx(4.5));

  SimConfig cfg = sc.defaults;
  cfg.method = Method::l1ao_pcip;
  cfg.dt = 1e-4;
  cfg.t_f = 1.0;
  const RunResult res = run(sc, cfg);
  REQUIRE(!res.summary.terminated_early);
  const double sigma = 4.5;
  for (const TraceRow& row : res.trace) {
    if (row.t < cfg.l1.T_s) continue;
    CHECK(std::abs(row.sigma_hat(0) - sigma) <= z.z2 * cfg.l1.T_s);
    // The filter output converges to cancel the held estimate.
    if (row.t > 10.0 / cfg.l1.omega) {
      CHECK((row.vdot_a + row.sigma_hat).norm() <= 2e-3 * sigma);
    }
  }
}
