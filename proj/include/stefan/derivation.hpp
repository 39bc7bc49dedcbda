#pragma once

// The full chain from configuration to every constant the trigger, the
// dwell-time bound and the Lyapunov monitor need, plus a printable report.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "stefan/diagnostics.hpp"
#include "stefan/errors.hpp"
#include "stefan/kernels.hpp"
#include "stefan/params.hpp"
#include "stefan/trigger.hpp"

namespace stefan {

struct TriggerDerived {
  Thetas thetas;
  KernelBound upsilon;
  Mus mus;
  double sigma{};
  LowerBoundA A_min;
  DwellTime dwell;
  EpsilonBounds eps_bounds;
  TransformConstants transform;
  KernelBound f_max;
  double b_star{};
  LyapunovConfig lyapunov;

  double R() const { return eps_bounds.R; }
  double tau() const { return dwell.tau; }
  double max_dwell() const { return dwell.max_dwell; }
  TriggerWeights weights(const TriggerConfig& trig) const {
    return {trig.eta, trig.gamma, sigma, mus.mu1, mus.mu2, mus.mu3};
  }
};

struct DerivationOptions {
  int s_points = 256;
  int quad_points = 512;
};

inline TriggerDerived derive_trigger(const PhysicalParams& phys, const ControllerConfig& ctrl,
                                     const TriggerConfig& trig, DerivationOptions opt = {}) {
  if (!(ctrl.c > 0.0)) throw ConfigError("controller.c must be positive");
  if (!(ctrl.lambda >= 0.0)) throw ConfigError("controller.lambda must be nonnegative");
  if (!(trig.eta > 0.0)) throw ConfigError("trigger.eta must be positive");
  if (!(trig.gamma > 0.0)) throw ConfigError("trigger.gamma must be positive");
  if (!(trig.m0 > 0.0)) throw ConfigError("trigger.m0 must be positive");
  if (!(trig.A > 0.0)) throw ConfigError("trigger.A must be positive");
  if (!(trig.delta > 0.0 && trig.delta < 1.0 / (1.0 + ctrl.c)))
    throw ConfigError("trigger.delta must lie in (0, 1/(1+c)) = (0, " + std::to_string(1.0 / (1.0 + ctrl.c)) + ")");

  TriggerDerived d;
  d.upsilon = compute_upsilon(phys.alpha, ctrl.lambda, phys.L, opt.s_points, opt.quad_points);
  d.thetas = compute_thetas(ctrl.c, phys.L, phys.alpha, phys.beta, d.upsilon.value);
  d.mus = compute_mus(d.thetas, trig.gamma, trig.delta);
  d.sigma = compute_sigma(trig.A, phys.alpha, phys.L);
  d.transform = make_transform_constants(phys, ctrl);
  d.A_min = min_A(d.mus.mu1, d.mus.mu2, phys.L, phys.alpha, phys.beta, ctrl.epsilon, ctrl.c, d.transform.zeta);
  d.dwell = min_dwell_time(d.thetas.theta0, trig.gamma, d.sigma, trig.eta, trig.delta, ctrl.c);
  d.eps_bounds = epsilon_bounds(phys.alpha, phys.beta, ctrl.c, phys.L);
  d.f_max = f_max(phys.alpha, ctrl.lambda, phys.L, d.transform, opt.s_points, opt.quad_points);
  const double floor = d.mus.mu3 / (trig.A * phys.alpha);
  d.b_star = trig.b_star.value_or(2.0 * floor);
  if (!(d.b_star > floor))
    throw ConfigError("trigger.b_star must exceed mu3/(A alpha) = " + std::to_string(floor));
  d.lyapunov = make_lyapunov_config(phys, ctrl, trig.A, d.f_max.value, d.b_star);
  return d;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline std::string relative_gap(double value, double reference) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%+.2f%%", 100.0 * (value - reference) / reference);
  return buf;
}

}  // namespace detail

/// Human-readable listing of every derived constant with the formula it comes from.
/// Reference values quoted in SI units (metres) are compared after converting ours.
inline std::string derivation_report(const PhysicalParams& phys, const ControllerConfig& ctrl,
                                     const TriggerConfig& trig, const TriggerDerived& d) {
  using detail::fmt;
  std::ostringstream os;
  auto line = [&](const std::string& name, double v, const std::string& formula) {
    os << "  " << name << std::string(name.size() < 14 ? 14 - name.size() : 1, ' ') << fmt(v) << "   " << formula
       << '\n';
  };
  os << "units: cm, s, degC, J\n\n[physical]\n";
  line("k", phys.k, "W/(cm degC)");
  line("rho", phys.rho, "kg/cm^3");
  line("cp", phys.cp, "J/(kg degC)");
  line("dH", phys.dH, "J/kg");
  line("L", phys.L, "cm");
  line("Tm", phys.Tm, "degC");
  line("alpha", phys.alpha, "k/(rho cp)");
  line("beta", phys.beta, "k/(rho dH)");

  os << "\n[controller]\n";
  line("c", ctrl.c, "control gain, 1/s");
  line("lambda", ctrl.lambda, "observer gain parameter, 1/s");
  line("epsilon", ctrl.epsilon, "transform parameter, degC/cm");
  line("s_r", ctrl.s_r, "setpoint, cm");

  os << "\n[transform]\n";
  line("nu", d.transform.nu, "beta eps/(2 alpha)");
  line("omega", d.transform.omega, "sqrt((4 alpha c - (eps beta)^2)/(4 alpha^2))");
  line("zeta", d.transform.zeta, "-(2 alpha c - (eps beta)^2)/(2 alpha beta omega)");
  line("R", d.R(), "2 sqrt(alpha c)/beta");

  os << "\n[epsilon bounds]\n";
  line("sqrt_bound", d.eps_bounds.sqrt_bound, "sqrt(alpha c)/beta");
  line("grad_bound", d.eps_bounds.gradient_bound, "alpha/(8 beta L (8 + beta^2 R^2 L^2/alpha^2))");
  line("eps_star", d.eps_bounds.eps_star, "positive root of h");
  os << "  epsilon = " << fmt(ctrl.epsilon) << (d.eps_bounds.admits(ctrl.epsilon) ? " satisfies" : " VIOLATES")
     << " all three bounds\n";
  const double literal = 10.0;
  if (ctrl.epsilon != literal) {
    os << "  literal epsilon = 10 degC/cm: " << (literal < d.eps_bounds.sqrt_bound ? "below" : "above")
       << " sqrt_bound, " << (literal < d.eps_bounds.gradient_bound ? "below" : "above") << " grad_bound, "
       << (literal < d.eps_bounds.eps_star ? "below" : "above") << " eps_star"
       << (d.eps_bounds.admits(literal) ? "" : " (inadmissible; 10 degC/m = 0.1 degC/cm is the admissible reading)")
       << '\n';
  }

  os << "\n[kernels]\n";
  line("Upsilon", d.upsilon.value, "max_s |1 - (1/alpha) int_0^s p(y,s) dy|");
  os << "  Upsilon refinement change " << fmt(d.upsilon.relative_change())
     << (d.upsilon.accurate() ? "" : "  WARNING: above 1e-6") << '\n';
  line("f_max", d.f_max.value, "sqrt(max_s int_0^s f(x,s)^2 dx)");
  os << "  f_max refinement change " << fmt(d.f_max.relative_change())
     << (d.f_max.accurate() ? "" : "  WARNING: above 1e-6") << '\n';

  os << "\n[trigger]\n";
  line("eta", trig.eta, "decay rate of m");
  line("gamma", trig.gamma, "threshold scale");
  line("delta", trig.delta, "dwell-time parameter, < 1/(1+c)");
  line("m0", trig.m0, "m(0)");
  line("A", trig.A, "Lyapunov scale, 1/cm^3");
  line("theta0", d.thetas.theta0, "4 c^2");
  line("theta1", d.thetas.theta1, "4 c^4 L/alpha^2");
  line("theta2", d.thetas.theta2, "4 c^4/beta^2");
  line("theta3", d.thetas.theta3, "4 c^2 Upsilon^2");
  line("mu1", d.mus.mu1, "theta1/(gamma (1-delta))");
  line("mu2", d.mus.mu2, "theta2/(gamma (1-delta))");
  line("mu3", d.mus.mu3, "theta3/(gamma (1-delta))");
  line("sigma", d.sigma, "4 A alpha L");
  line("A_min", d.A_min.value(), "max of gradient and interface brackets");
  line("  gradient", d.A_min.gradient_term, "96 mu1 L^2/alpha (1 + beta^2 (zeta^2+eps^2) L^2/alpha^2)");
  line("  interface", d.A_min.interface_term, "4 beta (3 mu1 (zeta^2+eps^2) L + mu2)/(eps alpha c)");
  os << "  A " << (trig.A > d.A_min.value() ? "exceeds" : "DOES NOT exceed") << " A_min\n";
  line("a1", d.dwell.a1, "gamma delta sigma");
  line("a2", d.dwell.a2, "1 + theta0 + 2 gamma (1-delta) sigma + eta");
  line("a3", d.dwell.a3, "(1 + theta0 + gamma (1-delta) sigma + eta)(1-delta)/delta");
  line("tau", d.dwell.tau, "int_0^1 ds/(a1 s^2 + a2 s + a3), closed form");
  line("tau_simpson", d.dwell.tau_quadrature, "same integral, 10^4-panel Simpson");
  line("max_dwell", d.dwell.max_dwell, "1/c");

  os << "\n[lyapunov]\n";
  line("b_star", d.b_star, "w_tilde gradient weight floor (default 2 mu3/(A alpha))");
  line("B", d.lyapunov.B, "4 L^2 f_max^2/alpha^2 + eps beta/(2c) + b_star");
  line("xi", d.lyapunov.xi, "max{c L/beta, (beta/(alpha eps))(eps^2 + c/beta)}");

  // Reference values are quoted in metres; ours convert by powers of 100.
  struct Ref {
    const char* name;
    double ours_si;
    double reference;
  };
  const Ref refs[] = {
      {"mu1", d.mus.mu1 * 1e6, 1.42e-4},
      {"mu2", d.mus.mu2 * 1e8, 36.85},
      {"mu3", d.mus.mu3, 2.2079e14},
      {"sigma", d.sigma, 6.19e-5},
      {"A", trig.A * 1e6, 4.42e3},
  };
  os << "\n[reference comparison, SI units]\n";
  for (const auto& r : refs)
    os << "  " << r.name << std::string(14 - std::string(r.name).size(), ' ') << fmt(r.ours_si) << "   reference "
       << fmt(r.reference) << "   " << detail::relative_gap(r.ours_si, r.reference) << '\n';
  line("A_min (SI)", d.A_min.value() * 1e6, "1/m^3");
  return os.str();
}

}  // namespace stefan
