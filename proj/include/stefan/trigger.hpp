#pragma once

// Dynamic event trigger: an event fires when d^2 > gamma m or when the hold
// has lasted 1/c. m obeys
//   m' = -eta m - sigma d^2 + mu1 ||u_hat||^2 + mu2 X^2 + mu3 u_tilde_x(s)^2.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stefan/numerics.hpp"
#include "stefan/observer.hpp"
#include "stefan/params.hpp"

namespace stefan {

enum class EventReason { initial, threshold, max_dwell, schedule };

inline const char* to_string(EventReason r) {
  switch (r) {
    case EventReason::initial: return "initial";
    case EventReason::threshold: return "threshold";
    case EventReason::max_dwell: return "max_dwell";
    case EventReason::schedule: return "schedule";
  }
  return "unknown";
}

/// int_0^s u_hat dx and X = s - s_r at the last event.
struct Snapshot {
  double integral{};
  double X{};
};

struct EventRecord {
  double t{};
  EventReason reason{};
  double q_j{};
  double dwell{};  // t - previous event time; 0 for the initial event
  double d2{};     // d^2 on the supervised step that fired
  double gamma_m{};
};

struct TriggerWeights {
  double eta{}, gamma{}, sigma{}, mu1{}, mu2{}, mu3{};
};

struct TriggerState {
  double m{};
  double d{};
  double q_j{};
  double t_j{};
  Snapshot snapshot;
  std::vector<EventRecord> events;
};

inline Snapshot take_snapshot(const ObserverState& obs, double s, double s_r) {
  return {trapezoid(obs.u_hat, s), s - s_r};
}

/// d = (c/alpha)(I_j - I) + (c/beta)(X_j - X); equals (q_cont - q_j)/k.
inline double deviation(const ObserverState& obs, double s, double s_r, const Snapshot& snap, double c, double alpha,
                        double beta) {
  const Snapshot now = take_snapshot(obs, s, s_r);
  return c / alpha * (snap.integral - now.integral) + c / beta * (snap.X - now.X);
}

struct MStep {
  double m{};
  bool violates_positivity{};
};

/// One classical RK4 step of the m-equation with the sources frozen over dt.
inline MStep step_m(double m, double d, double uhat_norm_sq, double X_sq, double utilde_slope_sq,
                    const TriggerWeights& w, double dt) {
  const double source = -w.sigma * d * d + w.mu1 * uhat_norm_sq + w.mu2 * X_sq + w.mu3 * utilde_slope_sq;
  auto f = [&](double mm) { return -w.eta * mm + source; };
  const double k1 = f(m);
  const double k2 = f(m + 0.5 * dt * k1);
  const double k3 = f(m + 0.5 * dt * k2);
  const double k4 = f(m + dt * k3);
  const double next = m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return {next, !(next > 0.0)};
}

/// Threshold takes precedence when both conditions hold on the same step.
inline std::optional<EventReason> check_event(const TriggerState& st, double d, double t, double c, double gamma) {
  if (d * d > gamma * st.m) return EventReason::threshold;
  const double max_dwell = 1.0 / c;
  if (t - st.t_j >= max_dwell * (1.0 - 1e-9)) return EventReason::max_dwell;
  return std::nullopt;
}

}  // namespace stefan
