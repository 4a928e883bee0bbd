#ifndef TVOPT_CONFIG_HPP
#define TVOPT_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tvopt/certification.hpp"
#include "tvopt/scenarios.hpp"
#include "tvopt/simulation.hpp"

namespace tvopt {

struct CertBlock {
  std::optional<double> target_rho;
  std::optional<double> epsilon_rho;
  DeltaGrid grid;
};

struct OutputBlock {
  std::string directory = "out";
  bool plots = true;
};

/// Parsed run configuration. Unknown keys anywhere in the file are rejected.
struct RunConfig {
  std::string scenario;  // example1 | example2 | custom
  std::optional<Method> method;
  bool exact_model = false;

  // optimizer overrides (applied on top of scenario defaults)
  std::optional<Vec> P_diag;
  std::optional<double> epsilon;
  std::optional<double> T_s;
  std::optional<double> omega;
  std::optional<Vec> A_s_diag;

  // sim overrides
  std::optional<double> dt;
  std::optional<double> t_f;
  std::optional<Vec> v0;
  long record_stride = 1;
  std::uint64_t rng_seed = 0;

  std::optional<CertBlock> certification;
  OutputBlock output;

  Example2Overrides ex2;
  CustomQuadratic custom;

  std::vector<Method> bench_methods;
};

RunConfig load_config(const std::filesystem::path& path);

/// Instantiate the scenario named by the config and resolve the SimConfig
/// with every override applied and re-validated.
struct BuiltScenario {
  Scenario scenario;
  SimConfig sim;
};
BuiltScenario build_scenario(const RunConfig& cfg);

}  // namespace tvopt

#endif  // TVOPT_CONFIG_HPP
