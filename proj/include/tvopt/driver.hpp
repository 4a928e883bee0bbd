#ifndef TVOPT_DRIVER_HPP
#define TVOPT_DRIVER_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace tvopt {

// Exit codes shared by the CLI and the in-process command drivers:
// 0 success, 1 configuration or numeric error, 2 constraint violation,
// 3 inadmissible certificate.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitInadmissible = 3;

struct DriverOptions {
  std::string out_dir;  // overrides the config's output.directory when set
  bool no_plots = false;
  bool quiet = false;
};

int cmd_run(const std::filesystem::path& config_path, const DriverOptions& opt);

/// Run several configs, parallelized across threads capped by TVOPT_THREADS.
/// Returns the worst exit code.
int cmd_run_many(const std::vector<std::filesystem::path>& configs,
                 const DriverOptions& opt);

int cmd_certify(const std::filesystem::path& config_path, const DriverOptions& opt);

int cmd_check(const std::filesystem::path& config_path, const DriverOptions& opt);

int cmd_bench(const std::filesystem::path& config_path, const DriverOptions& opt);

}  // namespace tvopt

#endif  // TVOPT_DRIVER_HPP
