#pragma once

// Physical, controller and trigger parameters, and the closed-form constants
// that the stability and dwell-time guarantees are stated in.
//
// Units throughout: cm, s, degC, J (so k is W/(cm degC), rho is kg/cm^3).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stefan/errors.hpp"

namespace stefan {

/// Raw material constants as supplied by a configuration.
struct MaterialConstants {
  double k{};                    // W / (cm degC)
  double rho{};                  // kg / cm^3
  double cp{};                   // J / (kg degC)
  double latent_heat{};          // J / kg
  double length{};               // cm
  double melting_temperature{};  // degC
};

struct PhysicalParams {
  double k{};
  double rho{};
  double cp{};
  double dH{};
  double L{};
  double Tm{};
  double alpha{};  // k / (rho cp), cm^2/s
  double beta{};   // k / (rho dH), cm^2/(degC s)
};

inline PhysicalParams derive_physical(const MaterialConstants& raw) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("physical.") + name + " must be a positive finite number, got " +
                        std::to_string(v));
  };
  require_positive(raw.k, "k");
  require_positive(raw.rho, "rho");
  require_positive(raw.cp, "cp");
  require_positive(raw.latent_heat, "latent_heat");
  require_positive(raw.length, "length");
  if (!std::isfinite(raw.melting_temperature))
    throw ConfigError("physical.melting_temperature must be finite");

  PhysicalParams p;
  p.k = raw.k;
  p.rho = raw.rho;
  p.cp = raw.cp;
  p.dH = raw.latent_heat;
  p.L = raw.length;
  p.Tm = raw.melting_temperature;
  p.alpha = raw.k / (raw.rho * raw.cp);
  p.beta = raw.k / (raw.rho * raw.latent_heat);
  return p;
}

struct ControllerConfig {
  double c{};        // control gain, 1/s
  double lambda{};   // observer gain parameter, 1/s
  double epsilon{};  // controller transform parameter, degC/cm
  double s_r{};      // interface setpoint, cm
};

struct TriggerConfig {
  double eta{};    // decay rate of m, 1/s
  double gamma{};  // threshold scale
  double delta{};  // dwell-time parameter, 0 < delta < 1/(1+c)
  double m0{};     // m(0), (degC/cm)^2
  double A{};      // Lyapunov scale, 1/cm^3
  std::optional<double> b_star;  // w_tilde gradient weight floor; 2 mu3/(A alpha) when empty
};

/// Initial plant and observer data. Profiles are absolute temperatures of physical x in [0, s0].
struct InitialData {
  double s0{};
  std::function<double(double)> T0;
  std::function<double(double)> T0_hat;
  // Lipschitz and sandwich constants; derived from sampled profiles when empty.
  std::optional<double> H;
  std::optional<double> H_hat_l;
  std::optional<double> H_hat_u;
};

struct Thetas {
  double theta0{}, theta1{}, theta2{}, theta3{};
};

/// Coefficients bounding the growth of the squared deviation rate.
inline Thetas compute_thetas(double c, double L, double alpha, double beta, double upsilon) {
  const double c2 = c * c;
  return {4.0 * c2, 4.0 * c2 * c2 * L / (alpha * alpha), 4.0 * c2 * c2 / (beta * beta),
          4.0 * c2 * upsilon * upsilon};
}

struct Mus {
  double mu1{}, mu2{}, mu3{};
};

inline Mus compute_mus(const Thetas& th, double gamma, double delta) {
  if (!(gamma > 0.0)) throw ConfigError("trigger.gamma must be positive");
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("trigger.delta must lie in [0, 1)");
  const double scale = gamma * (1.0 - delta);
  return {th.theta1 / scale, th.theta2 / scale, th.theta3 / scale};
}

struct LowerBoundA {
  double gradient_term{};  // 96 mu1 L^2/alpha (1 + beta^2 (zeta^2+eps^2) L^2/alpha^2)
  double interface_term{}; // 4 beta (3 mu1 (zeta^2+eps^2) L + mu2) / (eps alpha c)
  double value() const { return std::max(gradient_term, interface_term); }
};

/// The Lyapunov scale A must strictly exceed this.
inline LowerBoundA min_A(double mu1, double mu2, double L, double alpha, double beta, double epsilon, double c,
                         double zeta) {
  const double ze = zeta * zeta + epsilon * epsilon;
  LowerBoundA b;
  b.gradient_term = 96.0 * mu1 * L * L / alpha * (1.0 + beta * beta * ze * L * L / (alpha * alpha));
  b.interface_term = 4.0 * beta * (3.0 * mu1 * ze * L + mu2) / (epsilon * alpha * c);
  return b;
}

/// Trigger damping sigma = 4 A alpha L.
inline double compute_sigma(double A, double alpha, double L) { return 4.0 * A * alpha * L; }

/// R = 2 sqrt(alpha c)/beta, the bound on |psi(-x)|.
inline double psi_bound(double alpha, double beta, double c) { return 2.0 * std::sqrt(alpha * c) / beta; }

/// h(e) = C - B e - A e^2 with C = alpha c/(4 beta).
struct EpsilonQuadratic {
  double constant{}, linear{}, quadratic{};
  double operator()(double e) const { return constant - linear * e - quadratic * e * e; }
};

inline EpsilonQuadratic epsilon_quadratic(double alpha, double beta, double c, double L) {
  const double R = psi_bound(alpha, beta, c);
  const double R2 = R * R;
  EpsilonQuadratic h;
  h.constant = alpha * c / (4.0 * beta);
  h.linear = 4.0 * beta * beta * R2 * L / alpha + 7.0 * alpha / (16.0 * L);
  h.quadratic = 4.0 * beta + beta * beta * beta * R2 * L * L / (2.0 * alpha * alpha);
  return h;
}

/// Positive root of the downward-opening quadratic h.
inline double epsilon_star(double alpha, double beta, double c, double L) {
  const auto h = epsilon_quadratic(alpha, beta, c, L);
  // 2C / (B + sqrt(B^2 + 4AC)) avoids cancellation in the textbook formula.
  return 2.0 * h.constant / (h.linear + std::sqrt(h.linear * h.linear + 4.0 * h.quadratic * h.constant));
}

struct EpsilonBounds {
  double R{};
  double sqrt_bound{};      // sqrt(alpha c)/beta
  double gradient_bound{};  // alpha / (8 beta L (8 + beta^2 R^2 L^2/alpha^2))
  double eps_star{};
  double upper() const { return std::min({sqrt_bound, gradient_bound, eps_star}); }
  bool admits(double epsilon) const { return epsilon > 0.0 && epsilon < upper(); }
};

inline EpsilonBounds epsilon_bounds(double alpha, double beta, double c, double L) {
  EpsilonBounds b;
  b.R = psi_bound(alpha, beta, c);
  b.sqrt_bound = std::sqrt(alpha * c) / beta;
  const double ratio = beta * b.R * L / alpha;
  b.gradient_bound = alpha / (8.0 * beta * L * (8.0 + ratio * ratio));
  b.eps_star = epsilon_star(alpha, beta, c, L);
  return b;
}

/// Closed form of int_0^1 ds / (a1 s^2 + a2 s + a3) for a1, a2 >= 0, a3 > 0.
inline double dwell_integral(double a1, double a2, double a3) {
  if (a1 == 0.0) {
    if (a2 == 0.0) return 1.0 / a3;
    return std::log1p(a2 / a3) / a2;
  }
  const double disc = a2 * a2 - 4.0 * a1 * a3;
  if (disc > 0.0) {
    // Two real roots, both negative; log((2a1+a2-r)(a2+r) / ((2a1+a2+r)(a2-r))) / r.
    const double r = std::sqrt(disc);
    const double a2_minus_r = 4.0 * a1 * a3 / (a2 + r);
    const double denom = (2.0 * a1 + a2 + r) * a2_minus_r;
    return std::log1p(4.0 * a1 * r / denom) / r;
  }
  if (disc < 0.0) {
    const double r = std::sqrt(-disc);
    return 2.0 / r * std::atan(2.0 * a1 * r / (r * r + a2 * (2.0 * a1 + a2)));
  }
  return 4.0 * a1 / (a2 * (2.0 * a1 + a2));
}

struct DwellTime {
  double a1{}, a2{}, a3{};
  double tau{};             // closed form
  double tau_quadrature{};  // composite Simpson, 10^4 panels
  double max_dwell{};       // 1/c
};

inline DwellTime min_dwell_time(double theta0, double gamma, double sigma, double eta, double delta, double c) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("trigger.delta must lie in (0, 1)");
  DwellTime d;
  d.a1 = gamma * delta * sigma;
  d.a2 = 1.0 + theta0 + 2.0 * gamma * (1.0 - delta) * sigma + eta;
  d.a3 = (1.0 + theta0 + gamma * (1.0 - delta) * sigma + eta) * (1.0 - delta) / delta;
  d.tau = dwell_integral(d.a1, d.a2, d.a3);

  constexpr int panels = 10000;
  const double h = 1.0 / panels;
  auto f = [&](double s) { return 1.0 / ((d.a1 * s + d.a2) * s + d.a3); };
  double sum = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
  d.tau_quadrature = sum * h / 3.0;

  d.max_dwell = 1.0 / c;
  if (!(d.tau < d.max_dwell))
    throw InternalConsistency("minimal dwell time " + std::to_string(d.tau) +
                              " s is not below the maximal dwell 1/c = " + std::to_string(d.max_dwell) +
                              " s; delta must satisfy delta < 1/(1+c)");
  return d;
}

struct ValidationCheck {
  std::string name;
  bool passed{};
  double margin{};  // positive when satisfied
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  double H{}, H_hat_l{}, H_hat_u{};

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

// Max and min of (T(x)-Tm)/(s0-x) on x in [0, s0), with the x -> s0 limit from the endpoint slope.
struct SlopeRange {
  double lo{std::numeric_limits<double>::infinity()};
  double hi{-std::numeric_limits<double>::infinity()};
};

inline SlopeRange lipschitz_range(const std::function<double(double)>& T, double Tm, double s0, int samples) {
  SlopeRange r;
  const double dx = s0 / samples;
  for (int i = 0; i < samples; ++i) {
    const double x = i * dx;
    const double v = (T(x) - Tm) / (s0 - x);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  const double end = -(3.0 * T(s0) - 4.0 * T(s0 - dx) + T(s0 - 2.0 * dx)) / (2.0 * dx);
  r.lo = std::min(r.lo, end);
  r.hi = std::max(r.hi, end);
  return r;
}

// Largest jump between consecutive difference quotients.
inline double slope_jump(const std::function<double(double)>& T, double s0, int samples) {
  const double dx = s0 / samples;
  double prev = (T(dx) - T(0.0)) / dx;
  double jump = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double next = (T((i + 1) * dx) - T(i * dx)) / dx;
    jump = std::max(jump, std::abs(next - prev));
    prev = next;
  }
  return jump;
}

}  // namespace detail

/// Checks the initial data against the conditions that guarantee positive heat input,
/// well-posedness and the model validity conditions. Report-style: never throws on failure.
inline ValidationReport validate_initial_data(const InitialData& init, const ControllerConfig& ctrl,
                                              const PhysicalParams& phys, int samples = 2000) {
  ValidationReport rep;
  const double s0 = init.s0;
  const double Tm = phys.Tm;
  const double rel = 1e-12;
  auto add = [&](std::string name, double margin, double scale, std::string detail) {
    rep.checks.push_back({std::move(name), margin >= -rel * std::max(1.0, std::abs(scale)), margin,
                          std::move(detail)});
  };
  auto add_strict = [&](std::string name, double margin, std::string detail) {
    rep.checks.push_back({std::move(name), margin > 0.0, margin, std::move(detail)});
  };

  add_strict("s0_in_domain", std::min(s0, phys.L - s0), "0 < s0 < L");
  if (!(s0 > 0.0 && s0 < phys.L) || !init.T0 || !init.T0_hat) {
    if (!init.T0 || !init.T0_hat) add_strict("profiles_present", -1.0, "T0 and T0_hat must be given");
    return rep;
  }

  double min_excess = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) min_excess = std::min(min_excess, init.T0(s0 * i / samples) - Tm);
  add("T0_above_melting", min_excess, 1.0, "T0(x) >= Tm on [0, s0]");

  const double jump_coarse = detail::slope_jump(init.T0, s0, samples);
  const double jump_fine = detail::slope_jump(init.T0, s0, 2 * samples);
  const double smooth_margin = jump_coarse <= 1e-9 ? 1.0 : 0.75 * jump_coarse - jump_fine;
  add_strict("T0_continuously_differentiable", smooth_margin,
             "difference-quotient jumps shrink under refinement (" + std::to_string(jump_coarse) + " -> " +
                 std::to_string(jump_fine) + ")");

  const auto plant_range = detail::lipschitz_range(init.T0, Tm, s0, samples);
  const auto obs_range = detail::lipschitz_range(init.T0_hat, Tm, s0, samples);
  rep.H = init.H.value_or(plant_range.hi);
  rep.H_hat_l = init.H_hat_l.value_or(obs_range.lo);
  rep.H_hat_u = init.H_hat_u.value_or(obs_range.hi);

  add("T0_lipschitz_bound", rep.H - plant_range.hi, rep.H, "0 <= T0(x)-Tm <= H (s0-x)");
  add("sandwich_upper_not_below_lower", rep.H_hat_u - rep.H_hat_l, rep.H_hat_u, "H_hat_u >= H_hat_l");
  add_strict("sandwich_lower_exceeds_H", rep.H_hat_l - rep.H, "H_hat_l > H");
  add("observer_sandwich", std::min(obs_range.lo - rep.H_hat_l, rep.H_hat_u - obs_range.hi),
      std::max(rep.H_hat_l, rep.H_hat_u),
      "Tm + H_hat_l (s0-x) <= T0_hat(x) <= Tm + H_hat_u (s0-x)");

  const double lambda_max = 4.0 * phys.alpha / (s0 * s0) * (rep.H_hat_l - rep.H) / rep.H_hat_u;
  add_strict("observer_gain_bound", lambda_max - ctrl.lambda,
             "lambda < 4 alpha/s0^2 (H_hat_l - H)/H_hat_u = " + std::to_string(lambda_max));

  const double sr_min = s0 + phys.beta * s0 * s0 / (2.0 * phys.alpha) * rep.H_hat_u;
  add_strict("setpoint_window", std::min(phys.L - ctrl.s_r, ctrl.s_r - sr_min),
             "L > s_r > s0 + beta s0^2 H_hat_u/(2 alpha) = " + std::to_string(sr_min));
  return rep;
}

}  // namespace stefan
