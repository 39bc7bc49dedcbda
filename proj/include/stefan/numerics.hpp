#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stefan/errors.hpp"

namespace stefan {

/// Samples on the uniform immobilized grid xi_i = i/(n-1), i = 0..n-1.
struct Profile {
  std::vector<double> values;

  Profile() = default;
  explicit Profile(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit Profile(std::vector<double> v) : values(std::move(v)) {}

  template <class F>
  static Profile sample(std::size_t n, F&& f) {
    Profile p(n);
    for (std::size_t i = 0; i < n; ++i) p.values[i] = f(p.xi(i));
    return p;
  }

  std::size_t n() const noexcept { return values.size(); }
  double h() const noexcept { return 1.0 / static_cast<double>(values.size() - 1); }
  double xi(std::size_t i) const noexcept {
    return i + 1 == values.size() ? 1.0 : static_cast<double>(i) * h();
  }
  double& operator[](std::size_t i) noexcept { return values[i]; }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  std::span<const double> view() const noexcept { return values; }

  bool finite() const noexcept {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

namespace detail {

inline void check_bessel_argument(double z, const char* name) {
  if (!(z >= 0.0) || z > 700.0)
    throw std::domain_error(std::string(name) + ": argument outside [0, 700]: " + std::to_string(z));
}

// (1/2) * sum_k (sign*w/4)^k / (k! (k+1)!), i.e. I1(sqrt w)/sqrt w for sign=+1, J1 for sign=-1.
template <class Real>
Real half_bessel_ratio_series(Real w, int sign) {
  Real term = Real(0.5);
  Real sum = term;
  const Real x = Real(sign) * w / Real(4);
  for (int k = 0; k < 60; ++k) {
    term *= x / (Real(k + 1) * Real(k + 2));
    sum += term;
    if (std::abs(term) <= Real(1e-17) * std::abs(sum)) break;
  }
  return sum;
}

// Hankel expansion of I1 for large z: e^z/sqrt(2 pi z) * sum (-1)^k a_k / z^k.
inline double bessel_i1_asymptotic(double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (4.0 - odd * odd) / (8.0 * k * z);
    if (std::abs(next) > std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(z) / std::sqrt(2.0 * std::numbers::pi * z) * sum;
}

}  // namespace detail

/// Modified Bessel function of the first kind, order one, for 0 <= z <= 700.
inline double bessel_i1(double z) {
  detail::check_bessel_argument(z, "bessel_i1");
  if (z <= 30.0) return z * detail::half_bessel_ratio_series<double>(z * z, +1);
  return detail::bessel_i1_asymptotic(z);
}

/// Bessel function of the first kind, order one, for 0 <= z <= 700.
inline double bessel_j1(double z) {
  detail::check_bessel_argument(z, "bessel_j1");
  if (z <= 10.0) {
    const long double zl = z;
    return static_cast<double>(zl * detail::half_bessel_ratio_series<long double>(zl * zl, -1));
  }
  return std::cyl_bessel_j(1.0, z);
}

/// I1(sqrt(w))/sqrt(w), continuous at w = 0 with value 1/2.
inline double ratio_i1_sqrt(double w) {
  if (!(w >= 0.0)) throw std::domain_error("ratio_i1_sqrt: negative argument");
  if (w <= 900.0) return detail::half_bessel_ratio_series<double>(w, +1);
  const double z = std::sqrt(w);
  return bessel_i1(z) / z;
}

/// J1(sqrt(w))/sqrt(w), continuous at w = 0 with value 1/2.
inline double ratio_j1_sqrt(double w) {
  if (!(w >= 0.0)) throw std::domain_error("ratio_j1_sqrt: negative argument");
  if (w <= 100.0)
    return static_cast<double>(detail::half_bessel_ratio_series<long double>(w, -1));
  const double z = std::sqrt(w);
  return bessel_j1(z) / z;
}

/// Composite trapezoid of uniform samples over [0, length].
inline double trapezoid(std::span<const double> f, double length) {
  if (f.size() < 2) return 0.0;
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return length * sum / static_cast<double>(f.size() - 1);
}

inline double trapezoid(const Profile& p, double length) { return trapezoid(p.view(), length); }

/// Second-order one-sided derivative d/dxi at the last node.
inline double end_slope(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
}

/// d/dxi at every node: central inside, second-order one-sided at both ends.
inline std::vector<double> gradient(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> g(n);
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  g[n - 1] = end_slope(f, h);
  return g;
}

/// Thomas algorithm. lower[0] and upper[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  assert(lower.size() == n && upper.size() == n && rhs.size() == n);
#ifndef NDEBUG
  for (std::size_t i = 0; i < n; ++i) {
    const double off = (i > 0 ? std::abs(lower[i]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
    assert(std::abs(diag[i]) >= off && "tridiagonal system is not diagonally dominant");
  }
#endif
  std::vector<double> c_star(n), d_star(n), x(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw SingularSystem("solve_tridiagonal: zero pivot at row 0");
  c_star[0] = n > 1 ? upper[0] / pivot : 0.0;
  d_star[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - lower[i] * c_star[i - 1];
    if (pivot == 0.0) throw SingularSystem("solve_tridiagonal: zero pivot at row " + std::to_string(i));
    c_star[i] = i + 1 < n ? upper[i] / pivot : 0.0;
    d_star[i] = (rhs[i] - lower[i] * d_star[i - 1]) / pivot;
  }
  x[n - 1] = d_star[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d_star[i] - c_star[i] * x[i + 1];
  return x;
}

/// Solves (T + u v^T) x = rhs for tridiagonal T by Sherman-Morrison.
inline std::vector<double> solve_tridiagonal_rank_one(std::span<const double> lower, std::span<const double> diag,
                                                      std::span<const double> upper, std::span<const double> rhs,
                                                      std::span<const double> u, std::span<const double> v) {
  auto y = solve_tridiagonal(lower, diag, upper, rhs);
  const auto z = solve_tridiagonal(lower, diag, upper, u);
  double vy = 0.0, vz = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    vy += v[i] * y[i];
    vz += v[i] * z[i];
  }
  const double denom = 1.0 + vz;
  if (denom == 0.0) throw SingularSystem("solve_tridiagonal_rank_one: singular rank-one update");
  const double scale = vy / denom;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= scale * z[i];
  return y;
}

}  // namespace stefan
