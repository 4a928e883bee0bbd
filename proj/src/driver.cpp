#include "tvopt/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "tvopt/config.hpp"
#include "tvopt/svg_plot.hpp"
#include "tvopt/trace_io.hpp"

namespace tvopt {

namespace {

namespace fs = std::filesystem;

void say(const DriverOptions& opt, const std::string& line) {
  if (!opt.quiet) std::fputs((line + "\n").c_str(), stdout);
}

Vec default_certify_grad0(const Scenario& sc, const SimConfig& sim) {
  return sc.oracle.grad_v(0.0, sim.v0);
}

double resolve_epsilon_rho(const CertBlock& block, const BaselineCertificate& bc,
                           const Vec& grad0) {
  const double carried = std::sqrt(bc.alpha_hi / bc.alpha_lo) * grad0.norm();
  if (block.target_rho) {
    const double eps = *block.target_rho - carried;
    if (eps <= 0.0) {
      throw ConfigError("target_rho " + std::to_string(*block.target_rho) +
                        " is not above the initial-gradient contribution " +
                        std::to_string(carried));
    }
    return eps;
  }
  if (block.epsilon_rho) return *block.epsilon_rho;
  return 0.1 * std::max(1.0, grad0.norm());
}

TubeCertificate certify_scenario(Scenario& sc, const SimConfig& sim,
                                 const CertBlock& block) {
  if (!(sim.method == Method::l1ao_pcip || sim.method == Method::pcip)) {
    throw ConfigError("certification is defined for the pcip baseline; method " +
                      method_name(sim.method) + " has no baseline certificate");
  }
  const BaselineCertificate bc = BaselineCertificate::pcip(sim.pcip.P);
  const Vec grad0 = default_certify_grad0(sc, sim);
  const double eps = resolve_epsilon_rho(block, bc, grad0);
  const double rho = std::sqrt(bc.alpha_hi / bc.alpha_lo) * grad0.norm() + eps;

  const PcipConfig pc = sim.pcip;
  const ProblemOracle& oracle = sc.oracle;
  const PredictionModel& model = sc.model;
  auto rate = [&pc, &oracle, &model](double t, const Vec& v) {
    return pcip_rate(pc, oracle, model, t, v);
  };
  auto minimizer = [&sc](double t, const Vec& warm) {
    if (warm.size() > 0 && sc.oracle.feasible(t, warm)) {
      return newton_oracle(sc.oracle, t, warm);
    }
    return newton_oracle(sc.oracle, t, sc.feasible_point(t));
  };
  const DeltaBase base = estimate_deltas(oracle, model, rate, bc.dV, rho, sc.m_f,
                                         sim.t_f, block.grid, minimizer);
  return certify(bc, base, sim.l1, sc.m_f, sc.dim, grad0, eps);
}

void write_plots(const fs::path& dir, const Scenario& sc,
                 const std::vector<TraceRow>& trace,
                 const std::optional<TubeCertificate>& cert) {
  std::vector<double> t;
  t.reserve(trace.size());
  for (const TraceRow& r : trace) t.push_back(r.t);

  auto component = [&](auto&& get) {
    std::vector<double> y;
    y.reserve(trace.size());
    for (const TraceRow& r : trace) y.push_back(get(r));
    return y;
  };

  if (sc.dim == 1) {
    svg::LinePlot p;
    p.title = "variable vs optimal trajectory";
    p.xlabel = "t [s]";
    p.ylabel = "v";
    p.series.push_back({t, component([](const TraceRow& r) { return r.v(0); }),
                        "#1f77b4", "v"});
    p.series.push_back({t, component([](const TraceRow& r) { return r.v_star(0); }),
                        "#2ca02c", "v*"});
    if (sc.plot_boundary) {
      svg::Series shade;
      shade.x = t;
      shade.y.reserve(t.size());
      for (double ti : t) shade.y.push_back(sc.plot_boundary(ti));
      shade.color = "#999999";
      p.shade_above = std::move(shade);
    }
    svg::write_line_plot(dir / "trajectory.svg", p);
  } else {
    svg::LinePlot p;
    p.title = "variable error";
    p.xlabel = "t [s]";
    p.ylabel = "|v - v*|";
    p.series.push_back(
        {t, component([](const TraceRow& r) { return (r.v - r.v_star).norm(); }),
         "#1f77b4", "|v - v*|"});
    svg::write_line_plot(dir / "trajectory.svg", p);

    svg::PlanarPlot planar;
    planar.title = "planar trajectory";
    svg::Series pv, ps;
    pv.color = "#1f77b4";
    pv.label = "v";
    ps.color = "#2ca02c";
    ps.label = "v*";
    for (const TraceRow& r : trace) {
      pv.x.push_back(r.v(0));
      pv.y.push_back(r.v(1));
      ps.x.push_back(r.v_star(0));
      ps.y.push_back(r.v_star(1));
    }
    planar.paths = {pv, ps};
    planar.discs = sc.plot_obstacles;
    svg::write_planar_plot(dir / "planar.svg", planar);
  }

  {
    svg::LinePlot p;
    p.title = "gradient norm";
    p.xlabel = "t [s]";
    p.ylabel = "|grad|";
    p.series.push_back({t, component([](const TraceRow& r) { return r.grad_norm; }),
                        "#d62728", "|grad|"});
    if (cert) {
      p.hline = cert->bound_grad();
      p.hline_label = "rho";
    }
    svg::write_line_plot(dir / "grad_norm.svg", p);
  }
  {
    svg::LinePlot p;
    p.title = "optimality gap";
    p.xlabel = "t [s]";
    p.ylabel = "cost gap";
    p.series.push_back({t, component([](const TraceRow& r) { return r.cost_gap; }),
                        "#9467bd", "gap"});
    if (cert) {
      p.hline = cert->bound_cost_gap();
      p.hline_label = "rho^2 / m_f";
    }
    svg::write_line_plot(dir / "cost_gap.svg", p);
  }
}

int cmd_run_impl(const fs::path& config_path, const DriverOptions& opt) {
  const RunConfig cfg = load_config(config_path);
  BuiltScenario built = build_scenario(cfg);

  std::optional<TubeCertificate> cert;
  if (cfg.certification) {
    cert = certify_scenario(built.scenario, built.sim, *cfg.certification);
  }

  const RunResult res = run(built.scenario, built.sim);

  const fs::path dir = opt.out_dir.empty() ? fs::path(cfg.output.directory)
                                           : fs::path(opt.out_dir);
  fs::create_directories(dir);
  write_trace_csv(dir / "trace.csv", res.trace, built.scenario.dim);
  write_summary(dir / "summary.txt", res.summary, cert);
  if (cfg.output.plots && !opt.no_plots) {
    write_plots(dir, built.scenario, res.trace, cert);
  }

  say(opt, "scenario " + res.summary.scenario + ", method " +
               method_name(res.summary.method) + ": " +
               std::to_string(res.summary.steps) + " steps, sup|v-v*| = " +
               format_full(res.summary.sup_variable_error));
  if (res.summary.terminated_early) {
    say(opt, "terminated early: " + res.summary.reason);
    return kExitViolation;
  }
  return kExitOk;
}

}  // namespace

int cmd_run(const fs::path& config_path, const DriverOptions& opt) {
  try {
    return cmd_run_impl(config_path, opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}

int cmd_run_many(const std::vector<fs::path>& configs, const DriverOptions& opt) {
  if (configs.size() == 1) return cmd_run(configs[0], opt);
  unsigned cap = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("TVOPT_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) cap = static_cast<unsigned>(parsed);
  }
  cap = std::max(1u, std::min<unsigned>(cap, static_cast<unsigned>(configs.size())));

  std::atomic<size_t> next{0};
  std::vector<int> codes(configs.size(), kExitOk);
  std::vector<std::thread> pool;
  pool.reserve(cap);
  for (unsigned w = 0; w < cap; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
        codes[i] = cmd_run(configs[i], opt);
      }
    });
  }
  for (std::thread& th : pool) th.join();
  return *std::max_element(codes.begin(), codes.end());
}

int cmd_certify(const fs::path& config_path, const DriverOptions& opt) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (!cfg.certification) {
      throw ConfigError("config has no certification block");
    }
    BuiltScenario built = build_scenario(cfg);
    const TubeCertificate cert =
        certify_scenario(built.scenario, built.sim, *cfg.certification);
    if (!opt.quiet) std::fputs(certificate_text(cert).c_str(), stdout);
    if (!cert.admissible) {
      say(opt, "inadmissible: " + cert.violated);
      return kExitInadmissible;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}

int cmd_check(const fs::path& config_path, const DriverOptions& opt) {
  try {
    const RunConfig cfg = load_config(config_path);
    BuiltScenario built = build_scenario(cfg);
    const auto samples = sample_points(built.scenario, 100, cfg.rng_seed + 12345);
    const DerivativeReport rep = check_derivatives(built.scenario.oracle, samples);
    say(opt, "checked " + std::to_string(rep.checked) + " samples (" +
                 std::to_string(rep.skipped) + " skipped)");
    say(opt, "max rel err grad_v  = " + format_full(rep.max_rel_err_grad_v));
    say(opt, "max rel err hess_vv = " + format_full(rep.max_rel_err_hess_vv));
    say(opt, "max rel err grad_vt = " + format_full(rep.max_rel_err_grad_vt));
    if (!rep.pass()) {
      say(opt, "FAIL: tolerance " + format_full(rep.rel_tol) + " exceeded");
      return kExitError;
    }
    say(opt, "PASS");
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}

int cmd_bench(const fs::path& config_path, const DriverOptions& opt) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (cfg.bench_methods.empty()) {
      throw ConfigError("bench requires a bench.methods list");
    }
    if (std::find(cfg.bench_methods.begin(), cfg.bench_methods.end(),
                  Method::oracle_only) == cfg.bench_methods.end()) {
      throw ConfigError("bench.methods must include oracle_only as the comparator");
    }
    std::vector<RunSummary> summaries;
    int worst = kExitOk;
    for (Method m : cfg.bench_methods) {
      BuiltScenario built = build_scenario(cfg);  // fresh world per method
      built.sim.method = m;
      const RunResult res = run(built.scenario, built.sim);
      if (res.summary.terminated_early) worst = std::max(worst, kExitViolation);
      summaries.push_back(res.summary);
    }
    const auto table = timing_report(summaries);
    say(opt, "method                mean_step_ms   ratio_vs_oracle");
    for (const TimingTableRow& row : table) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%-20s %12.6f %17.4f", row.method.c_str(),
                    row.mean_step_ms, row.ratio_vs_oracle);
      say(opt, buf);
    }
    return worst;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}

}  // namespace tvopt
