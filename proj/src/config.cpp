#include "tvopt/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

namespace tvopt {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

Vec to_vec(const json& j, const std::string& where) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) {
    throw ConfigError(where + " must be a number or a nonempty array");
  }
  Vec v(static_cast<int>(j.size()));
  int i = 0;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(where + " must contain numbers");
    v(i++) = x.get<double>();
  }
  return v;
}

double to_pos(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  check_keys(j, "config root",
             {"scenario", "method", "model", "optimizer", "sim", "certification",
              "output", "example2", "custom", "bench"});

  RunConfig cfg;
  if (!j.contains("scenario") || !j["scenario"].is_string()) {
    throw ConfigError("config requires a 'scenario' string");
  }
  cfg.scenario = j["scenario"].get<std::string>();
  if (cfg.scenario != "example1" && cfg.scenario != "example2" && cfg.scenario != "custom") {
    throw ConfigError("scenario must be example1, example2 or custom");
  }
  if (j.contains("method")) cfg.method = parse_method(j["method"].get<std::string>());
  if (j.contains("model")) {
    const std::string m = j["model"].get<std::string>();
    if (m != "nominal" && m != "exact") throw ConfigError("model must be nominal or exact");
    cfg.exact_model = (m == "exact");
  }

  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    check_keys(o, "optimizer", {"P", "epsilon", "T_s", "omega", "A_s"});
    if (o.contains("P")) cfg.P_diag = to_vec(o["P"], "optimizer.P");
    if (o.contains("epsilon")) cfg.epsilon = to_pos(o["epsilon"], "optimizer.epsilon");
    if (o.contains("T_s")) cfg.T_s = to_pos(o["T_s"], "optimizer.T_s");
    if (o.contains("omega")) cfg.omega = to_pos(o["omega"], "optimizer.omega");
    if (o.contains("A_s")) cfg.A_s_diag = to_vec(o["A_s"], "optimizer.A_s");
  }

  if (j.contains("sim")) {
    const json& s = j["sim"];
    check_keys(s, "sim", {"dt", "t_f", "v0", "record_stride", "rng_seed"});
    if (s.contains("dt")) cfg.dt = to_pos(s["dt"], "sim.dt");
    if (s.contains("t_f")) cfg.t_f = to_pos(s["t_f"], "sim.t_f");
    if (s.contains("v0")) cfg.v0 = to_vec(s["v0"], "sim.v0");
    if (s.contains("record_stride")) cfg.record_stride = s["record_stride"].get<long>();
    if (s.contains("rng_seed")) cfg.rng_seed = s["rng_seed"].get<std::uint64_t>();
  }

  if (j.contains("certification")) {
    const json& c = j["certification"];
    check_keys(c, "certification",
               {"target_rho", "epsilon_rho", "time_points", "radial_points",
                "angular_points", "safety"});
    CertBlock block;
    if (c.contains("target_rho")) block.target_rho = to_pos(c["target_rho"], "target_rho");
    if (c.contains("epsilon_rho")) {
      block.epsilon_rho = to_pos(c["epsilon_rho"], "epsilon_rho");
    }
    if (c.contains("time_points")) block.grid.time_points = c["time_points"].get<int>();
    if (c.contains("radial_points")) block.grid.radial_points = c["radial_points"].get<int>();
    if (c.contains("angular_points")) {
      block.grid.angular_points = c["angular_points"].get<int>();
    }
    if (c.contains("safety")) block.grid.safety = to_pos(c["safety"], "safety");
    cfg.certification = block;
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"directory", "plots"});
    if (o.contains("directory")) cfg.output.directory = o["directory"].get<std::string>();
    if (o.contains("plots")) cfg.output.plots = o["plots"].get<bool>();
  }

  if (j.contains("example2")) {
    const json& e = j["example2"];
    check_keys(e, "example2",
               {"obstacles", "robot_start", "k_r", "known_world_rates"});
    if (e.contains("obstacles")) {
      std::vector<Disc> discs;
      for (const auto& d : e["obstacles"]) {
        check_keys(d, "example2.obstacles[]", {"center", "radius"});
        Disc disc;
        disc.center = to_vec(d["center"], "obstacle center");
        disc.radius = to_pos(d["radius"], "obstacle radius");
        if (disc.center.size() != 2 || disc.radius <= 0.0) {
          throw ConfigError("obstacles need a 2D center and a positive radius");
        }
        discs.push_back(std::move(disc));
      }
      cfg.ex2.obstacles = std::move(discs);
    }
    if (e.contains("robot_start")) {
      cfg.ex2.robot_start = to_vec(e["robot_start"], "example2.robot_start");
    }
    if (e.contains("k_r")) cfg.ex2.k_r = to_pos(e["k_r"], "example2.k_r");
    if (e.contains("known_world_rates")) {
      cfg.ex2.known_world_rates = e["known_world_rates"].get<bool>();
    }
  }

  if (j.contains("custom")) {
    const json& c = j["custom"];
    check_keys(c, "custom", {"dim", "kappa", "c0", "c1", "amp", "freq", "phase"});
    if (c.contains("dim")) cfg.custom.dim = c["dim"].get<int>();
    if (c.contains("kappa")) cfg.custom.kappa = to_pos(c["kappa"], "custom.kappa");
    if (c.contains("c0")) cfg.custom.c0 = to_vec(c["c0"], "custom.c0");
    if (c.contains("c1")) cfg.custom.c1 = to_vec(c["c1"], "custom.c1");
    if (c.contains("amp")) cfg.custom.amp = to_vec(c["amp"], "custom.amp");
    if (c.contains("freq")) cfg.custom.freq = to_vec(c["freq"], "custom.freq");
    if (c.contains("phase")) cfg.custom.phase = to_vec(c["phase"], "custom.phase");
  }

  if (j.contains("bench")) {
    const json& b = j["bench"];
    check_keys(b, "bench", {"methods"});
    if (b.contains("methods")) {
      for (const auto& m : b["methods"]) {
        cfg.bench_methods.push_back(parse_method(m.get<std::string>()));
      }
    }
  }
  return cfg;
}

BuiltScenario build_scenario(const RunConfig& cfg) {
  BuiltScenario out;
  if (cfg.scenario == "example1") {
    Example1Overrides o;
    o.v0 = cfg.v0;
    o.t_f = cfg.t_f;
    o.exact_model = cfg.exact_model;
    out.scenario = example1(o);
  } else if (cfg.scenario == "example2") {
    Example2Overrides o = cfg.ex2;
    o.v0 = cfg.v0;
    o.t_f = cfg.t_f;
    o.exact_model = cfg.exact_model;
    out.scenario = example2(o);
  } else {
    out.scenario = custom_quadratic(cfg.custom, cfg.exact_model);
  }

  SimConfig sim = out.scenario.defaults;
  const int n = out.scenario.dim;
  if (cfg.method) sim.method = *cfg.method;
  if (cfg.dt) sim.dt = *cfg.dt;
  if (cfg.t_f) sim.t_f = *cfg.t_f;
  if (cfg.v0) {
    if (cfg.v0->size() != n) throw ConfigError("v0 dimension mismatch");
    sim.v0 = *cfg.v0;
  }
  sim.record_stride = cfg.record_stride;
  sim.rng_seed = cfg.rng_seed;

  if (cfg.P_diag) {
    Vec d = *cfg.P_diag;
    if (d.size() == 1 && n > 1) d = Vec::Constant(n, d(0));
    if (d.size() != n) throw ConfigError("optimizer.P dimension mismatch");
    sim.pcip.P = d.asDiagonal();
    sim.mpcip.P = d.asDiagonal();
  }
  if (cfg.epsilon) sim.mpcip.epsilon = *cfg.epsilon;
  if (cfg.T_s) sim.l1.T_s = *cfg.T_s;
  if (cfg.omega) sim.l1.omega = *cfg.omega;
  if (cfg.A_s_diag) {
    Vec d = *cfg.A_s_diag;
    if (d.size() == 1 && n > 1) d = Vec::Constant(n, d(0));
    if (d.size() != n) throw ConfigError("optimizer.A_s dimension mismatch");
    sim.l1.a_s_diag = d;
  }

  // Re-validate everything the resolved run will rely on.
  sim.pcip.validate();
  sim.mpcip.validate();
  sim.l1.validate();
  out.sim = sim;
  return out;
}

}  // namespace tvopt
