#include "tvopt/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvopt {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void append_vec_header(std::ostringstream& os, const std::string& base, int n) {
  for (int i = 0; i < n; ++i) os << ',' << base << i;
}

void append_vec(std::ostringstream& os, const Vec& v) {
  for (int i = 0; i < v.size(); ++i) os << ',' << format_full(v(i));
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace, int n_v) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open trace file for writing: " + path.string());
  std::ostringstream header;
  header << 't';
  append_vec_header(header, "v", n_v);
  append_vec_header(header, "v_star", n_v);
  header << ",grad_norm,cost_gap";
  append_vec_header(header, "sigma_true", n_v);
  append_vec_header(header, "sigma_hat", n_v);
  append_vec_header(header, "vdot_b", n_v);
  append_vec_header(header, "vdot_a", n_v);
  header << ",step_elapsed_ns,feasible";
  out << header.str() << '\n';
  for (const TraceRow& r : trace) {
    std::ostringstream os;
    os << format_full(r.t);
    append_vec(os, r.v);
    append_vec(os, r.v_star);
    os << ',' << format_full(r.grad_norm) << ',' << format_full(r.cost_gap);
    append_vec(os, r.sigma_true);
    append_vec(os, r.sigma_hat);
    append_vec(os, r.vdot_b);
    append_vec(os, r.vdot_a);
    os << ',' << r.step_elapsed_ns << ',' << (r.feasible ? 1 : 0);
    out << os.str() << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty trace file: " + path.string());

  // Infer the dimension from the header: count of v-columns.
  int n_v = 0;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.size() > 1 && col[0] == 'v' && std::isdigit(static_cast<unsigned char>(col[1]))) {
        ++n_v;
      }
    }
    if (n_v == 0) throw ConfigError("trace header has no v columns");
  }

  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    const size_t expected = 1 + 6 * static_cast<size_t>(n_v) + 4;
    if (cells.size() != expected) {
      throw ConfigError("trace row has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(expected));
    }
    size_t k = 0;
    auto next = [&]() { return std::strtod(cells[k++].c_str(), nullptr); };
    auto next_vec = [&](int n) {
      Vec v(n);
      for (int i = 0; i < n; ++i) v(i) = next();
      return v;
    };
    TraceRow r;
    r.t = next();
    r.v = next_vec(n_v);
    r.v_star = next_vec(n_v);
    r.grad_norm = next();
    r.cost_gap = next();
    r.sigma_true = next_vec(n_v);
    r.sigma_hat = next_vec(n_v);
    r.vdot_b = next_vec(n_v);
    r.vdot_a = next_vec(n_v);
    r.step_elapsed_ns = static_cast<std::int64_t>(next());
    r.feasible = next() != 0.0;
    rows.push_back(std::move(r));
  }
  return rows;
}

void recompute_sups(const std::vector<TraceRow>& trace, double& sup_grad_norm,
                    double& sup_variable_error, double& sup_cost_gap) {
  sup_grad_norm = 0.0;
  sup_variable_error = 0.0;
  sup_cost_gap = 0.0;
  for (const TraceRow& row : trace) {
    if (!row.feasible) continue;
    if (std::isfinite(row.grad_norm)) sup_grad_norm = std::max(sup_grad_norm, row.grad_norm);
    if (std::isfinite(row.cost_gap)) sup_cost_gap = std::max(sup_cost_gap, row.cost_gap);
    const double verr = (row.v - row.v_star).norm();
    if (std::isfinite(verr)) sup_variable_error = std::max(sup_variable_error, verr);
  }
}

std::string certificate_text(const TubeCertificate& c) {
  std::ostringstream os;
  auto put = [&](const char* key, double val) {
    os << "certificate." << key << " = " << format_full(val) << '\n';
  };
  put("rho", c.rho);
  put("epsilon_rho", c.epsilon_rho);
  put("V0", c.V0);
  put("alpha_lo", c.alpha_lo);
  put("alpha_hi", c.alpha_hi);
  put("beta", c.beta);
  put("omega", c.omega);
  put("T_s", c.T_s);
  put("m_f", c.m_f);
  os << "certificate.n_v = " << c.n_v << '\n';
  os << "certificate.A_s_diag =";
  for (int i = 0; i < c.a_s_diag.size(); ++i) os << ' ' << format_full(c.a_s_diag(i));
  os << '\n';
  put("delta.vdot_b", c.base.vdot_b);
  put("delta.dV_dgrad", c.base.dV_dgrad);
  put("delta.grad_vt_hat", c.base.grad_vt_hat);
  put("delta.grad_vt_err", c.base.grad_vt_err);
  put("delta.grad_vtt_err", c.base.grad_vtt_err);
  put("delta.grad_vvt_err", c.base.grad_vvt_err);
  put("delta.hess", c.base.hess);
  put("delta.hess_t", c.base.hess_t);
  put("delta.hess_v", c.base.hess_v);
  put("delta.sigma", c.derived.sigma);
  put("delta.sigma_hat", c.derived.sigma_hat);
  put("delta.vdot", c.derived.vdot);
  put("delta.hess_dot", c.derived.hess_dot);
  put("delta.grad_vt_err_dot", c.derived.grad_vt_err_dot);
  put("delta.sigma_dot", c.derived.sigma_dot);
  put("zeta_1", c.z.z1);
  put("zeta_2", c.z.z2);
  put("zeta_3", c.z.z3);
  put("zeta_4", c.z.z4);
  os << "certificate.admissible = " << (c.admissible ? "true" : "false") << '\n';
  if (!c.admissible) os << "certificate.violated = " << c.violated << '\n';
  put("T_s_max", c.T_s_max);
  put("bound_grad", c.bound_grad());
  put("bound_variable", c.bound_variable());
  put("bound_cost_gap", c.bound_cost_gap());
  return os.str();
}

void write_summary(const std::filesystem::path& path, const RunSummary& s,
                   const std::optional<TubeCertificate>& cert) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open summary file for writing: " + path.string());
  out << "scenario = " << s.scenario << '\n';
  out << "method = " << method_name(s.method) << '\n';
  out << "steps = " << s.steps << '\n';
  out << "terminated_early = " << (s.terminated_early ? "true" : "false") << '\n';
  out << "reason = " << s.reason << '\n';
  out << "sup_grad_norm = " << format_full(s.sup_grad_norm) << '\n';
  out << "sup_variable_error = " << format_full(s.sup_variable_error) << '\n';
  out << "sup_cost_gap = " << format_full(s.sup_cost_gap) << '\n';
  out << "max_rate_norm = " << format_full(s.max_rate_norm) << '\n';
  out << "mean_step_elapsed_ns = " << format_full(s.mean_step_elapsed_ns) << '\n';
  out << "mean_oracle_elapsed_ns = " << format_full(s.mean_oracle_elapsed_ns) << '\n';
  if (cert) out << certificate_text(*cert);
}

}  // namespace tvopt
