#pragma once

// Backstepping transforms, Lyapunov functionals and validity margins. None of
// this feeds back into the closed loop; it exists to check the analysis.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stefan/kernels.hpp"
#include "stefan/numerics.hpp"
#include "stefan/observer.hpp"
#include "stefan/plant.hpp"

namespace stefan {

namespace detail {

// out_i = int_{x_i}^{s} K(x_i, y) f(y) dy by trapezoid on the grid nodes.
template <class Kernel>
std::vector<double> volterra(const Profile& f, double s, Kernel&& K) {
  const std::size_t n = f.n();
  const double dy = s * f.h();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double x = f.xi(i) * s;
    double sum = 0.5 * (K(x, x) * f[i] + K(x, s) * f[n - 1]);
    for (std::size_t j = i + 1; j + 1 < n; ++j) sum += K(x, f.xi(j) * s) * f[j];
    out[i] = dy * sum;
  }
  return out;
}

}  // namespace detail

/// u_tilde = w_tilde + int_x^s P(x,y) w_tilde(y) dy.
inline Profile transform_error_direct(const Profile& w, double s, double lambda, double alpha) {
  auto I = detail::volterra(w, s, [&](double x, double y) { return kernel_P(x, y, lambda, alpha); });
  Profile out(w.n());
  for (std::size_t i = 0; i < w.n(); ++i) out[i] = w[i] + I[i];
  return out;
}

/// w_tilde = u_tilde - int_x^s Q(x,y) u_tilde(y) dy.
inline Profile transform_error_inverse(const Profile& u, double s, double lambda, double alpha) {
  auto I = detail::volterra(u, s, [&](double x, double y) { return kernel_Q(x, y, lambda, alpha); });
  Profile out(u.n());
  for (std::size_t i = 0; i < u.n(); ++i) out[i] = u[i] - I[i];
  return out;
}

/// w_hat = u_hat - (beta/alpha) int_x^s phi(x-y) u_hat(y) dy - phi(x-s) X.
inline Profile transform_controller_direct(const Profile& u, double X, double s, double alpha,
                                           const TransformConstants& tc) {
  auto I = detail::volterra(u, s, [&](double x, double y) { return tc.phi(x - y); });
  Profile out(u.n());
  for (std::size_t i = 0; i < u.n(); ++i) {
    const double x = u.xi(i) * s;
    out[i] = u[i] - tc.beta / alpha * I[i] - tc.phi(x - s) * X;
  }
  return out;
}

/// u_hat = w_hat - (beta/alpha) int_x^s psi(x-y) w_hat(y) dy - psi(x-s) X.
inline Profile transform_controller_inverse(const Profile& w, double X, double s, double alpha,
                                            const TransformConstants& tc) {
  auto I = detail::volterra(w, s, [&](double x, double y) { return tc.psi(x - y); });
  Profile out(w.n());
  for (std::size_t i = 0; i < w.n(); ++i) {
    const double x = w.xi(i) * s;
    out[i] = w[i] - tc.beta / alpha * I[i] - tc.psi(x - s) * X;
  }
  return out;
}

struct LyapunovConfig {
  double A{};
  double B{};
  double xi{};
  double b_star{};
  double epsilon{};
  double lambda{};
};

/// B = 4 L^2 f_max^2/alpha^2 + eps beta/(2c) + b*, xi = max{cL/beta, (beta/(alpha eps))(eps^2 + c/beta)}.
inline LyapunovConfig make_lyapunov_config(const PhysicalParams& phys, const ControllerConfig& ctrl, double A,
                                           double f_max_value, double b_star) {
  LyapunovConfig cfg;
  cfg.A = A;
  cfg.b_star = b_star;
  cfg.epsilon = ctrl.epsilon;
  cfg.lambda = ctrl.lambda;
  cfg.B = 4.0 * phys.L * phys.L * f_max_value * f_max_value / (phys.alpha * phys.alpha) +
          ctrl.epsilon * phys.beta / (2.0 * ctrl.c) + b_star;
  cfg.xi = std::max(ctrl.c * phys.L / phys.beta,
                    phys.beta / (phys.alpha * ctrl.epsilon) * (ctrl.epsilon * ctrl.epsilon + ctrl.c / phys.beta));
  return cfg;
}

struct LyapunovValues {
  double V1{}, V{}, W{};
  double log_W{};  // evaluated without forming W, which underflows for large xi s
};

inline LyapunovValues lyapunov_W(const PlantState& plant, const ObserverState& obs, double m, double s_r,
                                 const PhysicalParams& phys, const TransformConstants& tc,
                                 const LyapunovConfig& cfg) {
  const double s = plant.s;
  const double X = s - s_r;
  const Profile w_hat = transform_controller_direct(obs.u_hat, X, s, phys.alpha, tc);
  const Profile w_tilde = transform_error_inverse(error_profile(plant, obs), s, cfg.lambda, phys.alpha);
  auto wx = gradient(w_tilde.view(), w_tilde.h());
  for (auto& v : wx) v /= s;
  auto sq = [](double v) { return v * v; };
  const double V1 = 0.5 * sq(l2_norm(w_hat, s)) + cfg.epsilon * phys.alpha / (2.0 * phys.beta) * X * X +
                    0.5 * sq(l2_norm(w_tilde, s)) + 0.5 * cfg.B * sq(l2_norm(Profile(wx), s));
  const double V = cfg.A * V1 + m;
  return {V1, V, V * std::exp(-cfg.xi * s), std::log(V) - cfg.xi * s};
}

/// Worst-case margins of the physical validity conditions over a run.
struct ValidityReport {
  std::size_t samples{};
  double min_excess{std::numeric_limits<double>::infinity()};           // min (T - Tm) on the grid
  double min_boundary_excess{std::numeric_limits<double>::infinity()};  // min T(0,t) - Tm
  double min_s{std::numeric_limits<double>::infinity()};
  double max_s{-std::numeric_limits<double>::infinity()};
  double min_sdot{std::numeric_limits<double>::infinity()};
  std::optional<double> min_q;  // over all applied q_j
  double L{};

  bool empty() const { return samples == 0; }
  double domain_margin() const { return L - max_s; }
  /// All margins nonnegative within tol.
  bool ok(double tol) const {
    if (empty()) return true;
    return min_excess >= -tol && min_s > 0.0 && max_s < L && min_sdot >= -tol && (!min_q || *min_q > 0.0);
  }
};

class ValidityMonitor {
 public:
  explicit ValidityMonitor(double L) { report_.L = L; }

  void observe(const PlantState& st) {
    ++report_.samples;
    for (double v : st.u.values) report_.min_excess = std::min(report_.min_excess, v);
    report_.min_boundary_excess = std::min(report_.min_boundary_excess, st.u[0]);
    report_.min_s = std::min(report_.min_s, st.s);
    report_.max_s = std::max(report_.max_s, st.s);
    report_.min_sdot = std::min(report_.min_sdot, st.sdot);
  }
  void observe_input(double q) { report_.min_q = report_.min_q ? std::min(*report_.min_q, q) : q; }

  const ValidityReport& report() const { return report_; }

 private:
  ValidityReport report_;
};

template <class PlantRange, class InputRange>
ValidityReport validity_report(const PlantRange& states, const InputRange& inputs, double L) {
  ValidityMonitor mon(L);
  for (const auto& st : states) mon.observe(st);
  for (double q : inputs) mon.observe_input(q);
  return mon.report();
}

}  // namespace stefan
