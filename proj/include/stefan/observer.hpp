#pragma once

// Backstepping observer on the plant's measured domain [0, s(t)]. The output
// injection p(x, s) (T_x(s) - T_hat_x(s)) is taken implicitly: the measured
// slope is the post-step value and T_hat_x(s) couples the unknowns through a
// rank-one term, so the discrete error dynamics is a backward-Euler step.

#include <cmath>
#include <vector>

#include "stefan/kernels.hpp"
#include "stefan/numerics.hpp"
#include "stefan/params.hpp"
#include "stefan/plant.hpp"

namespace stefan {

struct ObserverState {
  Profile u_hat;  // T_hat - Tm
  double t{};
};

inline ObserverState make_observer(const std::function<double(double)>& T0_hat, double s0, std::size_t n,
                                   const PhysicalParams& phys) {
  ObserverState obs;
  obs.u_hat = Profile::sample(n, [&](double xi) { return T0_hat(xi * s0) - phys.Tm; });
  obs.u_hat[n - 1] = 0.0;
  return obs;
}

/// Advances the observer from the frame (s, sdot) at level n to the post-step measurement.
inline ObserverState step_observer(const ObserverState& obs, const Measurement& frame, const Measurement& next,
                                   double q, double dt, const PhysicalParams& phys, double lambda) {
  if (!std::isfinite(q)) throw NumericalFailure("heat flux is not finite");
  const Profile& u = obs.u_hat;
  auto sys = detail::assemble_step(u, frame.s, frame.sdot, q, dt, phys);
  ObserverState out;
  out.t = obs.t + dt;
  if (lambda == 0.0) {
    out.u_hat = detail::finish_profile(solve_tridiagonal(sys.lower, sys.diag, sys.upper, sys.rhs));
    return out;
  }
  const std::size_t m = u.n() - 1;
  const double h = u.h();
  const double measured = next.slope(phys.beta);
  // T_hat_x(s) = (3*0 - 4 u_{n-2} + u_{n-3}) / (2 h s') = v . u.
  std::vector<double> gain(m), v(m, 0.0);
  v[m - 1] = -4.0 / (2.0 * h * next.s);
  v[m - 2] = 1.0 / (2.0 * h * next.s);
  for (std::size_t i = 0; i < m; ++i) {
    const double p = observer_gain(u.xi(i) * frame.s, frame.s, lambda, phys.alpha);
    gain[i] = dt * p;
    sys.rhs[i] += dt * p * measured;
  }
  out.u_hat = detail::finish_profile(solve_tridiagonal_rank_one(sys.lower, sys.diag, sys.upper, sys.rhs, gain, v));
  return out;
}

struct ErrorNorms {
  double l2{};          // ||T - T_hat||
  double gradient_l2{}; // ||T_x - T_hat_x||
  double interface_slope{};  // (T - T_hat)_x at x = s
};

inline Profile error_profile(const PlantState& plant, const ObserverState& obs) {
  Profile e(plant.u.n());
  for (std::size_t i = 0; i < e.n(); ++i) e[i] = plant.u[i] - obs.u_hat[i];
  return e;
}

inline ErrorNorms error_norms(const PlantState& plant, const ObserverState& obs) {
  const Profile e = error_profile(plant, obs);
  auto g = gradient(e.view(), e.h());
  for (auto& v : g) v /= plant.s;
  return {l2_norm(e, plant.s), l2_norm(Profile(g), plant.s), g.back()};
}

}  // namespace stefan
