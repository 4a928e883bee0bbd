#ifndef TVOPT_TRACE_IO_HPP
#define TVOPT_TRACE_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tvopt/certification.hpp"
#include "tvopt/simulation.hpp"

namespace tvopt {

/// Format a double with 17 significant digits (lossless round-trip).
std::string format_full(double x);

/// CSV trace: header row, then one row per recorded step with columns
///   t, v[0..n), v_star[0..n), grad_norm, cost_gap, sigma_true[0..n),
///   sigma_hat[0..n), vdot_b[0..n), vdot_a[0..n), step_elapsed_ns, feasible
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace, int n_v);

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Recompute the trace-derived summary statistics from (re)loaded rows.
/// Matches the sup fields of the RunSummary produced by run() exactly.
void recompute_sups(const std::vector<TraceRow>& trace, double& sup_grad_norm,
                    double& sup_variable_error, double& sup_cost_gap);

/// Key-value summary file, one `key = value` per line; doubles at full
/// precision. The certificate, when present, is embedded under
/// `certificate.` keys.
void write_summary(const std::filesystem::path& path, const RunSummary& summary,
                   const std::optional<TubeCertificate>& cert);

std::string certificate_text(const TubeCertificate& cert);

}  // namespace tvopt

#endif  // TVOPT_TRACE_IO_HPP
