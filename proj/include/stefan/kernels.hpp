#pragma once

// Backstepping kernels: the observer gain p, the observer-error transform
// kernels P and Q, the controller transform kernels phi and psi, the kernel f
// that couples the two target systems, and the sup-type bounds built from them.

#include <algorithm>
#include <cmath>
#include <vector>

#include "stefan/errors.hpp"
#include "stefan/numerics.hpp"
#include "stefan/params.hpp"

namespace stefan {

/// Observer gain p(x, s) = -lambda s I1(z)/z with z = sqrt(lambda (s^2 - x^2)/alpha).
inline double observer_gain(double x, double s, double lambda, double alpha) {
  if (lambda == 0.0) return 0.0;
  const double w = std::max(0.0, lambda * (s * s - x * x) / alpha);
  return -lambda * s * ratio_i1_sqrt(w);
}

/// Kernel of the map from the error target state to the observer error.
inline double kernel_P(double x, double y, double lambda, double alpha) {
  if (lambda == 0.0) return 0.0;
  const double w = std::max(0.0, lambda * (y * y - x * x) / alpha);
  return lambda / alpha * y * ratio_i1_sqrt(w);
}

/// Kernel of the inverse map (observer error to error target state).
inline double kernel_Q(double x, double y, double lambda, double alpha) {
  if (lambda == 0.0) return 0.0;
  const double w = std::max(0.0, lambda * (y * y - x * x) / alpha);
  return lambda / alpha * y * ratio_j1_sqrt(w);
}

/// nu, omega, zeta of the inverse controller kernel psi.
struct TransformConstants {
  double c{}, beta{}, epsilon{};
  double nu{};
  double omega{};
  double zeta{};
  double R{};  // 2 sqrt(alpha c)/beta

  double phi(double x) const { return c / beta * x - epsilon; }
  double psi(double x) const {
    return std::exp(nu * x) * (zeta * std::sin(omega * x) + epsilon * std::cos(omega * x));
  }
};

inline TransformConstants make_transform_constants(double alpha, double beta, double c, double epsilon) {
  const double eb = epsilon * beta;
  const double R = psi_bound(alpha, beta, c);
  if (!(epsilon > 0.0) || !(epsilon < R))
    throw ConfigError("controller.epsilon must lie in (0, 2 sqrt(alpha c)/beta) = (0, " + std::to_string(R) + ")");
  TransformConstants k;
  k.c = c;
  k.beta = beta;
  k.epsilon = epsilon;
  k.R = R;
  k.nu = eb / (2.0 * alpha);
  k.omega = std::sqrt((4.0 * alpha * c - eb * eb) / (4.0 * alpha * alpha));
  k.zeta = -(2.0 * alpha * c - eb * eb) / (2.0 * alpha * beta * k.omega);
  if (epsilon < std::sqrt(alpha * c) / beta &&
      !(k.zeta * k.zeta + epsilon * epsilon < 4.0 * alpha * c / (beta * beta)))
    throw InternalConsistency("zeta^2 + epsilon^2 >= 4 alpha c/beta^2 although epsilon < sqrt(alpha c)/beta");
  return k;
}

inline TransformConstants make_transform_constants(const PhysicalParams& phys, const ControllerConfig& ctrl) {
  return make_transform_constants(phys.alpha, phys.beta, ctrl.c, ctrl.epsilon);
}

/// Sup-type quantity computed on an s-grid, with its value under doubled resolution.
struct KernelBound {
  double value{};
  double refined{};
  double relative_change() const { return std::abs(refined - value) / std::max(std::abs(refined), 1e-300); }
  bool accurate() const { return relative_change() < 1e-6; }
};

namespace detail {

inline double upsilon_at(double s, double lambda, double alpha, int quad_points) {
  if (s == 0.0) return 1.0;
  std::vector<double> p(quad_points);
  for (int i = 0; i < quad_points; ++i) {
    const double y = i + 1 == quad_points ? s : s * i / (quad_points - 1);
    p[i] = observer_gain(y, s, lambda, alpha);
  }
  return std::abs(1.0 - trapezoid(p, s) / alpha);
}

inline double upsilon_max(double alpha, double lambda, double L, int s_points, int quad_points) {
  double best = 0.0;
  for (int j = 0; j < s_points; ++j) {
    const double s = j + 1 == s_points ? L : L * j / (s_points - 1);
    best = std::max(best, upsilon_at(s, lambda, alpha, quad_points));
  }
  return best;
}

// f(x_i, s) at the nodes x_i = s i/(n-1), by trapezoid with p tabulated on the same nodes.
inline std::vector<double> f_kernel_nodes(double s, double lambda, double alpha, const TransformConstants& tc,
                                          int n) {
  std::vector<double> x(n), p(n), f(n);
  for (int i = 0; i < n; ++i) {
    x[i] = i + 1 == n ? s : s * i / (n - 1);
    p[i] = observer_gain(x[i], s, lambda, alpha);
  }
  const double dy = s / (n - 1);
  // Tail integrals int_x^s p and int_x^s y p, accumulated from the right.
  double tail_p = 0.0, tail_yp = 0.0;
  const double beta_over_alpha = tc.beta / alpha;
  for (int i = n - 1; i >= 0; --i) {
    if (i + 1 < n) {
      tail_p += 0.5 * dy * (p[i] + p[i + 1]);
      tail_yp += 0.5 * dy * (x[i] * p[i] + x[i + 1] * p[i + 1]);
    }
    const double phi_integral = tc.c / tc.beta * (x[i] * tail_p - tail_yp) - tc.epsilon * tail_p;
    f[i] = p[i] - beta_over_alpha * phi_integral + tc.beta * tc.phi(x[i] - s);
  }
  return f;
}

inline double f_max_squared(double alpha, double lambda, double L, const TransformConstants& tc, int s_points,
                            int quad_points) {
  double best = 0.0;
  for (int j = 1; j < s_points; ++j) {
    const double s = j + 1 == s_points ? L : L * j / (s_points - 1);
    auto f = f_kernel_nodes(s, lambda, alpha, tc, quad_points);
    for (auto& v : f) v *= v;
    best = std::max(best, trapezoid(f, s));
  }
  return best;
}

}  // namespace detail

/// max over 0 <= s <= L of |1 - (1/alpha) int_0^s p(y, s) dy|.
inline KernelBound compute_upsilon(double alpha, double lambda, double L, int s_points = 256,
                                   int quad_points = 512) {
  return {detail::upsilon_max(alpha, lambda, L, s_points, quad_points),
          detail::upsilon_max(alpha, lambda, L, 2 * s_points, 2 * quad_points)};
}

/// f(x, s) = p(x,s) - (beta/alpha) int_x^s phi(x-y) p(y,s) dy + beta phi(x-s).
inline double f_kernel(double x, double s, double lambda, double alpha, const TransformConstants& tc,
                       int quad_points = 512) {
  std::vector<double> y(quad_points), g(quad_points);
  for (int i = 0; i < quad_points; ++i) {
    y[i] = i + 1 == quad_points ? s : x + (s - x) * i / (quad_points - 1);
    g[i] = tc.phi(x - y[i]) * observer_gain(y[i], s, lambda, alpha);
  }
  return observer_gain(x, s, lambda, alpha) - tc.beta / alpha * trapezoid(g, s - x) + tc.beta * tc.phi(x - s);
}

/// sqrt(max over 0 <= s <= L of int_0^s f^2(x, s) dx).
inline KernelBound f_max(double alpha, double lambda, double L, const TransformConstants& tc, int s_points = 256,
                         int quad_points = 512) {
  return {std::sqrt(detail::f_max_squared(alpha, lambda, L, tc, s_points, quad_points)),
          std::sqrt(detail::f_max_squared(alpha, lambda, L, tc, 2 * s_points, 2 * quad_points))};
}

}  // namespace stefan
