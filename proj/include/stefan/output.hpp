#pragma once

// Run artifacts: series.csv, events.csv, derivation_report.txt, summary.json
// and, on request, plot.py. Numbers are printed with fixed formats so that
// identical configurations produce identical bytes.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "json.hpp"

#include "stefan/scenario.hpp"

namespace stefan {

inline constexpr const char* kSeriesHeader =
    "t,s,sdot,T0_minus_Tm,norm_T_minus_Tm,norm_T_minus_That,norm_w_tilde,q,q_continuous,d2,gamma_m,m,V1,V,W,log_W";
inline constexpr const char* kEventsHeader = "time,reason,q_j,dwell,d2,gamma_m";

namespace detail {

inline std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline std::string series_csv(const ScenarioResult& r) {
  using detail::g;
  std::string out = std::string(kSeriesHeader) + "\r\n";
  for (const auto& row : r.series) {
    out += g(row.t) + ',' + g(row.s) + ',' + g(row.sdot) + ',' + g(row.T0_excess) + ',' + g(row.norm_u) + ',' +
           g(row.norm_error) + ',' + g(row.norm_w_tilde) + ',' + g(row.q) + ',' + g(row.q_cont) + ',' + g(row.d2) +
           ',' + g(row.gamma_m) + ',' + g(row.m) + ',' + g(row.V1) + ',' + g(row.V) + ',' + g(row.W) + ',' +
           g(row.log_W) + "\r\n";
  }
  return out;
}

inline std::string events_csv(const std::vector<EventRecord>& events) {
  using detail::g;
  std::string out = std::string(kEventsHeader) + "\r\n";
  for (const auto& e : events)
    out += g(e.t) + ',' + to_string(e.reason) + ',' + g(e.q_j) + ',' + g(e.dwell) + ',' + g(e.d2) + ',' +
           g(e.gamma_m) + "\r\n";
  return out;
}

inline nlohmann::ordered_json summary_json(const ScenarioResult& r) {
  using detail::finite_or_null;
  using detail::optional_number;
  const auto& s = r.summary;
  const auto& m = r.monitors;
  const auto& v = s.validity;
  nlohmann::ordered_json j;
  j["kind"] = to_string(r.config.scenario.kind);
  j["completed"] = r.completed();
  if (r.breach)
    j["breach"] = {{"condition", r.breach->condition},
                   {"value", r.breach->value},
                   {"t", r.breach->t},
                   {"message", r.breach->message}};
  j["horizon"] = r.config.scheme.horizon;
  j["steps"] = m.steps;
  j["control_updates"] = s.updates;
  j["threshold_events"] = s.threshold_events;
  j["max_dwell_events"] = s.max_dwell_events;
  j["dwell"] = {{"min", finite_or_null(s.min_dwell)},
                {"mean", finite_or_null(s.mean_dwell)},
                {"max", finite_or_null(s.max_dwell)},
                {"tau", r.derived.tau()},
                {"one_over_c", r.derived.max_dwell()}};
  j["final"] = {{"t", s.final_t}, {"s", s.final_s}, {"abs_s_minus_sr", s.final_abs_X}};
  j["convergence"] = {{"tolerance", s.convergence_tolerance}, {"time", optional_number(s.convergence_time)}};
  j["observer"] = {{"initial_error_norm", s.initial_error_norm},
                   {"final_error_norm", s.final_error_norm},
                   {"w_tilde_decay_rate", optional_number(s.w_tilde_rate)}};
  j["lyapunov"] = {{"log_W_slope", optional_number(s.log_W_slope)}};
  j["validity"] = {{"min_T_minus_Tm", finite_or_null(v.min_excess)},
                   {"min_T0_minus_Tm", finite_or_null(v.min_boundary_excess)},
                   {"min_s", finite_or_null(v.min_s)},
                   {"L_minus_max_s", finite_or_null(v.domain_margin())},
                   {"min_sdot", finite_or_null(v.min_sdot)},
                   {"min_q_j", optional_number(v.min_q)}};
  j["monitors"] = {{"min_step_ds", finite_or_null(m.min_ds)},
                   {"max_s", finite_or_null(m.max_s)},
                   {"min_m", finite_or_null(m.min_m)},
                   {"m_positive", m.m_positive},
                   {"threshold_exceed_steps", m.threshold_exceed_steps},
                   {"threshold_exceed_non_events", m.threshold_exceed_non_events},
                   {"deviation_identity_error", m.max_deviation_identity_error},
                   {"deviation_rate_max_ratio", m.max_deviation_rate_ratio},
                   {"hold_bound_margin", finite_or_null(m.min_hold_margin)}};
  return j;
}

inline std::string plot_script() {
  return R"(# Plots series.csv from this directory with matplotlib.
import csv
import matplotlib.pyplot as plt

def load(name):
    with open(name, newline="") as f:
        rows = list(csv.DictReader(f))
    return {k: [float(r[k]) for r in rows] for k in rows[0]} if rows else {}

s = load("series.csv")
fig, ax = plt.subplots(2, 2, figsize=(10, 7))
ax[0][0].plot(s["t"], s["s"]); ax[0][0].set_title("interface s [cm]")
ax[0][1].step(s["t"], s["q"], where="post"); ax[0][1].set_title("held input q [W/cm^2]")
ax[1][0].semilogy(s["t"], s["norm_T_minus_That"]); ax[1][0].set_title("||T - T_hat||")
ax[1][1].semilogy(s["t"], s["d2"], label="d^2"); ax[1][1].semilogy(s["t"], s["gamma_m"], label="gamma m")
ax[1][1].legend()
for a in ax.flat:
    a.set_xlabel("t [s]")
fig.tight_layout()
fig.savefig("signals.png", dpi=120)
)";
}

/// Output root: STEFAN_OUTPUT_ROOT when set, otherwise the configured directory.
inline std::filesystem::path output_directory(const ScenarioConfig& cfg) {
  if (const char* root = std::getenv("STEFAN_OUTPUT_ROOT"); root && *root)
    return std::filesystem::path(root) / cfg.output.directory;
  return cfg.output.directory;
}

inline void emit_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  detail::write_file(dir / "series.csv", series_csv(r));
  detail::write_file(dir / "events.csv", events_csv(r.events));
  detail::write_file(dir / "derivation_report.txt",
                     derivation_report(r.phys, r.config.controller, r.config.trigger, r.derived));
  detail::write_file(dir / "summary.json", summary_json(r).dump(2) + "\n");
  if (r.config.output.plot_script) detail::write_file(dir / "plot.py", plot_script());
}

}  // namespace stefan
