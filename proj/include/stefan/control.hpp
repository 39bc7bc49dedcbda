#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/numerics.hpp"
#include "stefan/observer.hpp"
#include "stefan/params.hpp"

namespace stefan {

enum class ControlMode { continuous, event_triggered, sampled_data };

inline const char* to_string(ControlMode m) {
  switch (m) {
    case ControlMode::continuous: return "continuous";
    case ControlMode::event_triggered: return "event_triggered";
    case ControlMode::sampled_data: return "sampled_data";
  }
  return "unknown";
}

struct ControlSignal {
  double q{};
  ControlMode mode{ControlMode::event_triggered};
  double held_since{};
};

/// q = -c (k/alpha int_0^s u_hat dx + k/beta (s - s_r)).
inline double continuous_q(const ObserverState& obs, double s, const ControllerConfig& ctrl,
                           const PhysicalParams& phys) {
  const double integral = trapezoid(obs.u_hat, s);
  return -ctrl.c * (phys.k / phys.alpha * integral + phys.k / phys.beta * (s - ctrl.s_r));
}

/// Samples the continuous law at an update instant. Nonpositive heat is a hard stop.
inline ControlSignal zoh_update(const ObserverState& obs, double s, const ControllerConfig& ctrl,
                                const PhysicalParams& phys, double t_event, ControlMode mode) {
  const double q = continuous_q(obs, s, ctrl, phys);
  if (!std::isfinite(q)) throw NumericalFailure("control input is not finite");
  if (q <= 0.0)
    throw ValidityBreach(Breach::NonPositiveInput, q,
                         "held input is not positive at t = " + std::to_string(t_event) + ": q = " + std::to_string(q));
  return {q, mode, t_event};
}

/// Update instants 0, period, 2 period, ... up to and including horizon.
inline std::vector<double> sampled_data_schedule(double period, double horizon) {
  if (!(period > 0.0)) throw ConfigError("scenario.sampling_period must be positive");
  std::vector<double> times;
  for (long j = 0;; ++j) {
    const double t = static_cast<double>(j) * period;
    if (t > horizon) break;
    times.push_back(t);
  }
  return times;
}

}  // namespace stefan
