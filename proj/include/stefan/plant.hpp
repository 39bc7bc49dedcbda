#pragma once

// One-phase Stefan plant on the immobilized grid xi = x/s(t):
//   u_t = (alpha/s^2) u_xixi + (xi sdot/s) u_xi,  u_xi(0) = -s q/k,  u(1) = 0,
//   sdot = -(beta/s) u_xi(1).
// Diffusion is implicit with s and sdot frozen at level n; advection is explicit upwind.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/numerics.hpp"
#include "stefan/params.hpp"

namespace stefan {

struct PlantState {
  Profile u;  // T - Tm
  double s{};
  double sdot{};
  double t{};
};

struct Measurement {
  double s{};
  double sdot{};
  /// T_x(s, t) recovered from the Stefan condition.
  double slope(double beta) const { return -sdot / beta; }
};

namespace detail {

inline void check_interface(double s, double L) {
  if (!std::isfinite(s)) throw NumericalFailure("interface position is not finite");
  if (s <= 0.0)
    throw ValidityBreach(Breach::InterfaceNonPositive, s, "interface left the domain: s = " + std::to_string(s));
  if (s >= L)
    throw ValidityBreach(Breach::InterfaceBeyondDomain, s,
                         "interface reached the domain end: s = " + std::to_string(s));
}

inline double interface_velocity(const Profile& u, double s, double beta) {
  return -beta * end_slope(u.view(), u.h()) / s;
}

/// Tridiagonal system for the unknowns u_0..u_{n-2} of one semi-implicit step.
struct StepSystem {
  std::vector<double> lower, diag, upper, rhs;
};

inline StepSystem assemble_step(const Profile& u, double s, double sdot, double q, double dt,
                                const PhysicalParams& phys) {
  const std::size_t n = u.n();
  const std::size_t m = n - 1;
  const double h = u.h();
  const double r = dt * phys.alpha / (s * s * h * h);
  StepSystem sys{std::vector<double>(m, -r), std::vector<double>(m, 1.0 + 2.0 * r), std::vector<double>(m, -r),
                 std::vector<double>(m)};
  // Ghost node u_{-1} = u_1 - 2h G with G = u_xi(0) = -s q/k.
  sys.upper[0] = -2.0 * r;
  const double G = -s * q / phys.k;
  const double speed = sdot / s;
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = u.xi(i);
    const double a = xi * speed;
    // Upwind for the transport velocity -a: forward difference when a >= 0.
    const double left = i > 0 ? u[i - 1] : u[i + 1] - 2.0 * h * G;
    const double adv = a >= 0.0 ? a * (u[i + 1] - u[i]) / h : a * (u[i] - left) / h;
    sys.rhs[i] = u[i] + dt * adv;
  }
  sys.rhs[0] -= 2.0 * r * h * G;
  // u_{n-1} = 0 contributes nothing to the last row.
  return sys;
}

inline Profile finish_profile(std::vector<double> interior) {
  interior.push_back(0.0);
  Profile out(std::move(interior));
  if (!out.finite()) throw NumericalFailure("temperature profile became non-finite");
  return out;
}

}  // namespace detail

/// Plant state from a physical profile T0 on [0, s0]; u(1) = 0 is enforced.
inline PlantState immobilize(const std::function<double(double)>& T0, double s0, std::size_t n,
                             const PhysicalParams& phys) {
  if (n < 3) throw ConfigError("scheme.nodes must be at least 3");
  if (!(s0 > 0.0 && s0 < phys.L))
    throw ValidityBreach(s0 <= 0.0 ? Breach::InterfaceNonPositive : Breach::InterfaceBeyondDomain, s0,
                         "initial interface outside (0, L): s0 = " + std::to_string(s0));
  PlantState st;
  st.u = Profile::sample(n, [&](double xi) { return T0(xi * s0) - phys.Tm; });
  st.u[n - 1] = 0.0;
  st.s = s0;
  st.sdot = detail::interface_velocity(st.u, s0, phys.beta);
  return st;
}

/// Plant state from samples of T0 - Tm at uniform physical points on [0, s0], resampled by linear interpolation.
inline PlantState immobilize(std::span<const double> samples, double s0, std::size_t n, const PhysicalParams& phys) {
  if (samples.size() < 2) throw ConfigError("initial profile needs at least two samples");
  const double last = static_cast<double>(samples.size() - 1);
  auto interp = [&](double x) {
    const double pos = std::clamp(x / s0, 0.0, 1.0) * last;
    const auto i = std::min(static_cast<std::size_t>(pos), samples.size() - 2);
    const double w = pos - static_cast<double>(i);
    return phys.Tm + (1.0 - w) * samples[i] + w * samples[i + 1];
  };
  return immobilize(interp, s0, n, phys);
}

/// Advances the plant by dt under the held flux q.
inline PlantState step_plant(const PlantState& st, double q, double dt, const PhysicalParams& phys) {
  if (!std::isfinite(q)) throw NumericalFailure("heat flux is not finite");
  auto sys = detail::assemble_step(st.u, st.s, st.sdot, q, dt, phys);
  PlantState next;
  next.u = detail::finish_profile(solve_tridiagonal(sys.lower, sys.diag, sys.upper, sys.rhs));
  next.s = st.s + dt * st.sdot;
  detail::check_interface(next.s, phys.L);
  next.sdot = detail::interface_velocity(next.u, next.s, phys.beta);
  next.t = st.t + dt;
  return next;
}

inline Measurement measure(const PlantState& st) { return {st.s, st.sdot}; }

/// (1/alpha) int_0^s u dx + s/beta; its rate equals q/k along exact solutions.
inline double energy(const PlantState& st, const PhysicalParams& phys) {
  return trapezoid(st.u, st.s) / phys.alpha + st.s / phys.beta;
}

/// Physical L2 norm of a profile on [0, s].
inline double l2_norm(const Profile& u, double s) {
  std::vector<double> sq(u.n());
  for (std::size_t i = 0; i < u.n(); ++i) sq[i] = u[i] * u[i];
  return std::sqrt(trapezoid(sq, s));
}

}  // namespace stefan
