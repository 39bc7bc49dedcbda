#pragma once

// Closed-loop runs: plant, observer, held control and trigger advanced in
// lock step, with per-step monitors and diagnostics at logged rows.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stefan/config.hpp"
#include "stefan/control.hpp"
#include "stefan/derivation.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/observer.hpp"
#include "stefan/plant.hpp"
#include "stefan/trigger.hpp"

namespace stefan {

/// One logged row. Column order is the series.csv column order.
struct SeriesRow {
  double t{};
  double s{};
  double sdot{};
  double T0_excess{};   // T(0,t) - Tm
  double norm_u{};      // ||T - Tm||
  double norm_error{};  // ||T - T_hat||
  double norm_w_tilde{};
  double q{};       // applied (held) input
  double q_cont{};  // continuous law at t
  double d2{};
  double gamma_m{};
  double m{};
  double V1{};
  double V{};
  double W{};
  double log_W{};
};

struct BreachRecord {
  std::string condition;  // breach name or "numerical_failure"
  double value{};
  double t{};
  std::string message;
};

/// Worst cases gathered on every solver step, not only on logged rows.
struct StepMonitors {
  std::size_t steps{};
  double min_ds{std::numeric_limits<double>::infinity()};
  double max_s{-std::numeric_limits<double>::infinity()};
  double min_excess{std::numeric_limits<double>::infinity()};
  double min_T0_excess{std::numeric_limits<double>::infinity()};
  double min_m{std::numeric_limits<double>::infinity()};
  bool m_positive{true};
  std::size_t threshold_exceed_steps{};       // steps with d^2 > gamma m before any reset
  std::size_t threshold_exceed_non_events{};  // of those, steps that did not fire an event
  double max_deviation_identity_error{};      // |d - (q_cont - q_j)/k| / operand scale
  double max_deviation_rate_ratio{};                  // (d')^2 / bound, between events
  double min_hold_margin{std::numeric_limits<double>::infinity()};  // q - (1 - c(t - t_j)) q_j, over q_j
  double min_q{std::numeric_limits<double>::infinity()};
};

struct ScenarioSummary {
  std::size_t updates{};  // control updates including the initial one
  std::size_t threshold_events{};
  std::size_t max_dwell_events{};
  double min_dwell{std::numeric_limits<double>::quiet_NaN()};
  double mean_dwell{std::numeric_limits<double>::quiet_NaN()};
  double max_dwell{std::numeric_limits<double>::quiet_NaN()};
  double final_t{};
  double final_s{};
  double final_abs_X{};
  std::optional<double> convergence_time;  // first t with |s - s_r| < convergence_tolerance
  double convergence_tolerance{0.02};
  double initial_error_norm{};
  double final_error_norm{};
  std::optional<double> w_tilde_rate;  // least-squares decay rate of ||w_tilde||
  std::optional<double> log_W_slope;   // least-squares slope of log W against t
  ValidityReport validity;
};

struct ScenarioResult {
  ScenarioConfig config;
  PhysicalParams phys;
  TriggerDerived derived;
  std::vector<SeriesRow> series;
  std::vector<EventRecord> events;
  StepMonitors monitors;
  ScenarioSummary summary;
  std::optional<BreachRecord> breach;
  bool completed() const { return !breach; }
};

/// Least-squares slope of y against x.
inline std::optional<double> fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace detail {

inline void summarize(ScenarioResult& r) {
  auto& sum = r.summary;
  sum.updates = r.events.size();
  std::vector<double> dwells;
  for (const auto& e : r.events) {
    if (e.reason == EventReason::threshold) ++sum.threshold_events;
    if (e.reason == EventReason::max_dwell) ++sum.max_dwell_events;
    if (e.reason != EventReason::initial) dwells.push_back(e.dwell);
  }
  if (!dwells.empty()) {
    sum.min_dwell = *std::min_element(dwells.begin(), dwells.end());
    sum.max_dwell = *std::max_element(dwells.begin(), dwells.end());
    double total = 0.0;
    for (double d : dwells) total += d;
    sum.mean_dwell = total / static_cast<double>(dwells.size());
  }
  if (!r.series.empty()) {
    const auto& last = r.series.back();
    sum.final_t = last.t;
    sum.final_s = last.s;
    sum.final_abs_X = std::abs(last.s - r.config.controller.s_r);
    sum.initial_error_norm = r.series.front().norm_error;
    sum.final_error_norm = last.norm_error;

    // ||w_tilde|| decay rate, fitted while the norm stays above round-off scale.
    std::vector<double> t, logw, tw, lw;
    const double w0 = r.series.front().norm_w_tilde;
    for (const auto& row : r.series) {
      if (w0 > 0.0 && row.norm_w_tilde >= 1e-8 * w0) {
        t.push_back(row.t);
        logw.push_back(std::log(row.norm_w_tilde));
      }
      tw.push_back(row.t);
      lw.push_back(row.log_W);
    }
    if (auto slope = fitted_slope(t, logw)) sum.w_tilde_rate = -*slope;
    sum.log_W_slope = fitted_slope(tw, lw);
  }
}

}  // namespace detail

/// Runs one scenario to its horizon or to the first validity breach.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg, DerivationOptions opt = {}) {
  ScenarioResult r;
  r.config = cfg;
  r.phys = derive_physical(cfg.physical);
  const auto& phys = r.phys;
  const auto& ctrl = cfg.controller;
  const auto& trig = cfg.trigger;
  r.derived = derive_trigger(phys, ctrl, trig, opt);
  const auto& der = r.derived;
  const double dt = cfg.scheme.dt;
  const auto mode = cfg.scenario.kind;

  if (mode == ControlMode::event_triggered && !(dt < der.tau()))
    throw ConfigError("scheme.dt = " + format_number(dt) + " s must be below the minimal dwell time tau = " +
                      format_number(der.tau()) + " s for event-triggered runs");
  if (mode == ControlMode::sampled_data && !(cfg.scenario.sampling_period >= dt))
    throw ConfigError("scenario.sampling_period must be at least scheme.dt");

  const InitialData init = cfg.initial_data(phys);
  if (!cfg.scenario.unsafe) {
    const auto rep = validate_initial_data(init, ctrl, phys);
    if (!rep.passed()) {
      std::string failed;
      for (const auto& c : rep.checks)
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
      throw ConfigError("initial data fail validation (" + failed + "); set scenario.unsafe = true to run anyway");
    }
  }

  const auto n = static_cast<std::size_t>(cfg.scheme.nodes);
  PlantState plant = immobilize(init.T0, init.s0, n, phys);
  ObserverState obs = make_observer(init.T0_hat, init.s0, n, phys);
  const TriggerWeights weights = der.weights(trig);
  const TransformConstants& tc = der.transform;

  TriggerState ts;
  ts.m = trig.m0;
  auto& mon = r.monitors;
  ValidityMonitor validity(phys.L);

  const auto steps = static_cast<long>(std::llround(cfg.scheme.horizon / dt));
  const double period = mode == ControlMode::sampled_data ? cfg.scenario.sampling_period : dt;
  long next_sample = 0;  // index into the periodic schedule
  bool have_hold = false;
  std::optional<double> prev_d;  // d on the previous step of the current hold

  for (long it = 0; it <= steps; ++it) {
    const double t = static_cast<double>(it) * dt;
    plant.t = obs.t = t;
    validity.observe(plant);
    mon.min_excess = std::min(mon.min_excess, *std::min_element(plant.u.values.begin(), plant.u.values.end()));
    mon.min_T0_excess = std::min(mon.min_T0_excess, plant.u[0]);
    mon.max_s = std::max(mon.max_s, plant.s);

    const Measurement meas = measure(plant);
    const double X = meas.s - ctrl.s_r;
    const double q_cont = continuous_q(obs, meas.s, ctrl, phys);
    double d = have_hold ? deviation(obs, meas.s, ctrl.s_r, ts.snapshot, ctrl.c, phys.alpha, phys.beta) : 0.0;
    const double uhat_sq = std::pow(l2_norm(obs.u_hat, meas.s), 2);
    const auto err = error_norms(plant, obs);
    const double slope_sq = err.interface_slope * err.interface_slope;

    if (have_hold) {
      const double scale = std::max({std::abs(d), std::abs(q_cont) / phys.k, std::abs(ts.q_j) / phys.k});
      const double gap = std::abs(d - (q_cont - ts.q_j) / phys.k);
      mon.max_deviation_identity_error = std::max(mon.max_deviation_identity_error, scale > 0 ? gap / scale : gap);
      const double elapsed = t - ts.t_j;
      mon.min_hold_margin = std::min(mon.min_hold_margin, (q_cont - (1.0 - ctrl.c * elapsed) * ts.q_j) / ts.q_j);
      if (prev_d) {
        const double rate = (d - *prev_d) / dt;
        const auto& th = der.thetas;
        const double bound = th.theta0 * d * d + th.theta1 * uhat_sq + th.theta2 * X * X + th.theta3 * slope_sq;
        if (bound > 0.0) mon.max_deviation_rate_ratio = std::max(mon.max_deviation_rate_ratio, rate * rate / bound);
      }
    }

    const double d2_pre = d * d;
    const double gamma_m = trig.gamma * ts.m;
    std::optional<EventReason> reason;
    if (!have_hold) {
      reason = EventReason::initial;
    } else if (mode == ControlMode::event_triggered) {
      reason = check_event(ts, d, t, ctrl.c, trig.gamma);
    } else if (t >= static_cast<double>(next_sample) * period - 1e-9 * period) {
      reason = EventReason::schedule;
    }
    if (d2_pre > gamma_m) {
      ++mon.threshold_exceed_steps;
      if (!reason) ++mon.threshold_exceed_non_events;
    }

    try {
      if (reason) {
        const ControlSignal sig = zoh_update(obs, meas.s, ctrl, phys, t, mode);
        r.events.push_back({t, *reason, sig.q, have_hold ? t - ts.t_j : 0.0, d2_pre, gamma_m});
        ts.q_j = sig.q;
        ts.t_j = t;
        ts.snapshot = take_snapshot(obs, meas.s, ctrl.s_r);
        d = 0.0;
        have_hold = true;
        prev_d.reset();
        validity.observe_input(sig.q);
        mon.min_q = std::min(mon.min_q, sig.q);
        if (mode != ControlMode::event_triggered)
          while (static_cast<double>(next_sample) * period <= t + 1e-9 * period) ++next_sample;
      }
      ts.d = d;

      if (it % cfg.scheme.log_stride == 0 || it == steps) {
        SeriesRow row;
        row.t = t;
        row.s = meas.s;
        row.sdot = meas.sdot;
        row.T0_excess = plant.u[0];
        row.norm_u = l2_norm(plant.u, meas.s);
        row.norm_error = err.l2;
        row.norm_w_tilde = l2_norm(transform_error_inverse(error_profile(plant, obs), meas.s, ctrl.lambda, phys.alpha),
                                   meas.s);
        row.q = ts.q_j;
        row.q_cont = q_cont;
        row.d2 = d * d;
        row.gamma_m = trig.gamma * ts.m;
        row.m = ts.m;
        const auto lv = lyapunov_W(plant, obs, ts.m, ctrl.s_r, phys, tc, der.lyapunov);
        row.V1 = lv.V1;
        row.V = lv.V;
        row.W = lv.W;
        row.log_W = lv.log_W;
        r.series.push_back(row);
      }
      if (it == steps) break;

      const MStep ms = step_m(ts.m, d, uhat_sq, X * X, slope_sq, weights, dt);
      ts.m = ms.m;
      mon.min_m = std::min(mon.min_m, ms.m);
      if (ms.violates_positivity) mon.m_positive = false;

      PlantState next = step_plant(plant, ts.q_j, dt, phys);
      obs = step_observer(obs, meas, measure(next), ts.q_j, dt, phys, ctrl.lambda);
      mon.min_ds = std::min(mon.min_ds, next.s - plant.s);
      plant = std::move(next);
      prev_d = d;
      ++mon.steps;
    } catch (const ValidityBreach& e) {
      r.breach = BreachRecord{to_string(e.condition()), e.value(), t, e.what()};
      break;
    } catch (const NumericalFailure& e) {
      r.breach = BreachRecord{"numerical_failure", 0.0, t, e.what()};
      break;
    }
  }
  r.events.shrink_to_fit();
  r.summary.validity = validity.report();
  detail::summarize(r);
  for (const auto& row : r.series) {
    if (std::abs(row.s - ctrl.s_r) < r.summary.convergence_tolerance) {
      r.summary.convergence_time = row.t;
      break;
    }
  }
  return r;
}

struct ComparisonRow {
  std::string kind;
  std::size_t updates{};
  std::size_t threshold_events{};
  double min_dwell{}, mean_dwell{}, max_dwell{};
  std::optional<double> convergence_time;
  double final_abs_X{};
  bool completed{};
};

inline ComparisonRow comparison_row(const ScenarioResult& r) {
  return {to_string(r.config.scenario.kind), r.summary.updates, r.summary.threshold_events, r.summary.min_dwell,
          r.summary.mean_dwell, r.summary.max_dwell, r.summary.convergence_time, r.summary.final_abs_X,
          r.completed()};
}

/// Runs the configurations concurrently; all must share physical and initial data.
inline std::vector<ScenarioResult> compare_scenarios(const std::vector<ScenarioConfig>& configs,
                                                     DerivationOptions opt = {}) {
  if (configs.empty()) return {};
  const auto& ref = configs.front();
  const auto ref_physical = to_ptree(ref).get_child("physical");
  const auto ref_initial = to_ptree(ref).get_child("initial");
  for (const auto& c : configs) {
    if (to_ptree(c).get_child("physical") != ref_physical)
      throw ConfigError("compared scenarios must share the [physical] section");
    if (to_ptree(c).get_child("initial") != ref_initial)
      throw ConfigError("compared scenarios must share the [initial] section");
  }
  std::vector<std::future<ScenarioResult>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, [c, opt] { return run_scenario(c, opt); }));
  std::vector<ScenarioResult> out;
  out.reserve(configs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// The event-triggered default together with its continuous and 50-minute sampled-data baselines.
inline std::vector<ScenarioConfig> reference_comparison(const ScenarioConfig& base) {
  auto et = base;
  et.scenario.kind = ControlMode::event_triggered;
  auto cont = base;
  cont.scenario.kind = ControlMode::continuous;
  auto sd = base;
  sd.scenario.kind = ControlMode::sampled_data;
  sd.scenario.sampling_period = 3000.0;
  return {et, sd, cont};
}

}  // namespace stefan
