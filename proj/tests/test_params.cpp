#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stefan/config.hpp"
#include "stefan/derivation.hpp"
#include "stefan/params.hpp"

using namespace stefan;

namespace {

PhysicalParams paraffin() { return derive_physical(default_config().physical); }

// Composite Gauss-Legendre (5 points) for int_0^1 1/(a1 s^2 + a2 s + a3) on panels graded
// geometrically toward 0, where the integrand peaks with width ~ a3/a2.
double dwell_oracle(double a1, double a2, double a3) {
  const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                       0.2369268850561891};
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double s = mid + half * x[k];
      sum += half * w[k] / (a1 * s * s + a2 * s + a3);
    }
    return sum;
  };
  const int panels = 4000;
  double sum = panel(0.0, 1e-16);
  for (int p = 0; p < panels; ++p)
    sum += panel(std::pow(10.0, -16.0 + 16.0 * p / panels), std::pow(10.0, -16.0 + 16.0 * (p + 1) / panels));
  return sum;
}

double bisect_root(const EpsilonQuadratic& h, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(DerivePhysical, ParaffinDiffusivities) {
  const auto p = paraffin();
  EXPECT_DOUBLE_EQ(p.alpha, 0.0022 / (7.9e-4 * 2380.0));
  EXPECT_DOUBLE_EQ(p.beta, 0.0022 / (7.9e-4 * 2.1e5));
  EXPECT_NEAR(p.alpha, 1.170088e-3, 1e-9);
}

TEST(DerivePhysical, TrivialRatios) {
  const auto p = derive_physical({1.0, 1.0, 1.0, 2.0, 1.0, 0.0 + 1.0});
  EXPECT_EQ(p.alpha, 1.0);
  EXPECT_EQ(p.beta, 0.5);
}

TEST(DerivePhysical, NonPositiveConstantNamesField) {
  try {
    derive_physical({0.0022, -1.0, 2380.0, 2.1e5, 3.0, 37.0});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("physical.rho"), std::string::npos);
  }
}

TEST(Upsilon, ZeroGainGivesOne) {
  const auto u = compute_upsilon(1.0, 0.0, 3.0, 64, 64);
  EXPECT_EQ(u.value, 1.0);
}

TEST(Upsilon, VanishingDomainGivesOne) {
  const auto u = compute_upsilon(paraffin().alpha, 0.1, 1e-9, 64, 64);
  EXPECT_NEAR(u.value, 1.0, 1e-12);
}

TEST(Upsilon, ParaffinRefinementAgreesAndExceedsOne) {
  const auto p = paraffin();
  const auto u = compute_upsilon(p.alpha, 0.1, p.L);
  EXPECT_TRUE(u.accurate()) << u.relative_change();
  EXPECT_LT(u.relative_change(), 1e-6);
  EXPECT_GE(u.value, 1.0);
  for (double lambda : {0.001, 0.01, 0.5}) EXPECT_GE(compute_upsilon(p.alpha, lambda, p.L, 64, 128).value, 1.0);
}

TEST(Thetas, Formulas) {
  EXPECT_NEAR(compute_thetas(3e-4, 1, 1, 1, 1).theta0, 3.6e-7, 1e-20);
  EXPECT_DOUBLE_EQ(compute_thetas(1, 1, 1, 1, 1).theta1, 4.0);
  EXPECT_DOUBLE_EQ(compute_thetas(1, 1, 1, 1, 1).theta3, 4.0);
}

TEST(Mus, TrivialAndErrors) {
  const Thetas one{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(compute_mus(one, 1.0, 0.0).mu2, 1.0);
  const Thetas two{2, 2, 2, 2};
  EXPECT_DOUBLE_EQ(compute_mus(two, 2.0, 0.5).mu3, 2.0);
  EXPECT_THROW(compute_mus(one, 1.0, 1.0), ConfigError);
}

TEST(Mus, RoundTripProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.01, 10.0), D(0.0, 0.99);
  for (int i = 0; i < 100; ++i) {
    const Thetas th{U(rng), U(rng), U(rng), U(rng)};
    const double g = U(rng), d = D(rng);
    const auto mu = compute_mus(th, g, d);
    EXPECT_NEAR(mu.mu1 * g * (1 - d), th.theta1, 1e-13 * th.theta1);
    EXPECT_NEAR(mu.mu2 * g * (1 - d), th.theta2, 1e-13 * th.theta2);
    EXPECT_NEAR(mu.mu3 * g * (1 - d), th.theta3, 1e-13 * th.theta3);
  }
}

TEST(Mus, ReferenceValuesAfterUnitConversion) {
  const auto cfg = default_config();
  const auto p = paraffin();
  const auto d = derive_trigger(p, cfg.controller, cfg.trigger);
  // Reference values are quoted in metres: mu1 scales by 1e6, mu2 by 1e8.
  EXPECT_NEAR(d.mus.mu1 * 1e6, 1.42e-4, 0.05 * 1.42e-4);
  EXPECT_NEAR(d.mus.mu2 * 1e8, 36.85, 0.05 * 36.85);
  EXPECT_NEAR(d.mus.mu3, 2.2079e14, 0.05 * 2.2079e14);
}

TEST(MinA, DegenerateAndLinear) {
  EXPECT_EQ(min_A(0, 0, 3, 1e-3, 1e-5, 0.1, 3e-4, 1.0).value(), 0.0);
  const auto a = min_A(1.0, 2.0, 3.0, 1e-3, 1e-5, 0.1, 3e-4, 1.0);
  const auto b = min_A(2.0, 2.0, 3.0, 1e-3, 1e-5, 0.1, 3e-4, 1.0);
  EXPECT_NEAR(b.gradient_term, 2.0 * a.gradient_term, 1e-12 * b.gradient_term);
}

TEST(MinA, ChosenScaleExceedsLowerBound) {
  const auto cfg = default_config();
  const auto d = derive_trigger(paraffin(), cfg.controller, cfg.trigger);
  EXPECT_GT(cfg.trigger.A, d.A_min.value());
  EXPECT_GT(4.42e3, d.A_min.value() * 1e6);  // in 1/m^3
}

TEST(Sigma, ReferenceValue) {
  const auto p = paraffin();
  EXPECT_NEAR(compute_sigma(4.42e-3, p.alpha, p.L), 6.19e-5, 0.02 * 6.19e-5);
  EXPECT_EQ(compute_sigma(1, 1, 1), 4.0);
  EXPECT_EQ(compute_sigma(0, 1, 1), 0.0);
}

TEST(EpsilonStar, RootOfQuadratic) {
  const auto p = paraffin();
  const auto h = epsilon_quadratic(p.alpha, p.beta, 3e-4, p.L);
  const double e = epsilon_star(p.alpha, p.beta, 3e-4, p.L);
  EXPECT_LT(std::abs(h(e)), 1e-12 * h.constant);
  EXPECT_GT(h(e / 2), 0.0);
  for (int i = 1; i < 100; ++i) EXPECT_GT(h(e * i / 100.0), 0.0);
  EXPECT_NEAR(e, bisect_root(h, 0.0, 10.0 * e), 1e-12 * e);
}

TEST(EpsilonStar, RandomInputs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double a = std::pow(10.0, U(rng)), b = std::pow(10.0, U(rng)), c = std::pow(10.0, U(rng)),
                 L = std::pow(10.0, U(rng));
    const auto h = epsilon_quadratic(a, b, c, L);
    const double e = epsilon_star(a, b, c, L);
    EXPECT_GT(e, 0.0);
    EXPECT_LT(std::abs(h(e)), 1e-12 * h.constant);
  }
}

TEST(EpsilonStar, IncreasesWithGain) {
  const auto p = paraffin();
  EXPECT_GT(epsilon_star(p.alpha, p.beta, 6e-4, p.L), epsilon_star(p.alpha, p.beta, 3e-4, p.L));
}

TEST(EpsilonBounds, ComponentsAndAdmissibility) {
  const auto p = paraffin();
  const auto b = epsilon_bounds(p.alpha, p.beta, 3e-4, p.L);
  EXPECT_DOUBLE_EQ(b.R, 2.0 * std::sqrt(p.alpha * 3e-4) / p.beta);
  EXPECT_NEAR(b.sqrt_bound, 44.68, 0.01);
  EXPECT_TRUE(b.admits(0.1));
  // The literal value 10 read as degC/cm breaks the gradient and root bounds.
  EXPECT_LT(10.0, b.sqrt_bound);
  EXPECT_FALSE(b.admits(10.0));
  EXPECT_LT(epsilon_bounds(p.alpha, p.beta, 3e-4, 1e4).gradient_bound, 1e-6);
}

TEST(DwellIntegral, TrivialCases) {
  EXPECT_DOUBLE_EQ(dwell_integral(0, 0, 1), 1.0);
  EXPECT_NEAR(dwell_integral(0, 1, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(dwell_integral(1, 2, 1), 0.5, 1e-15);  // double root at -1
}

TEST(DwellIntegral, RandomCoefficientsAgainstQuadrature) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double a1 = std::pow(10.0, U(rng)), a2 = std::pow(10.0, U(rng)), a3 = std::pow(10.0, U(rng));
    const double ref = dwell_oracle(a1, a2, a3);
    EXPECT_NEAR(dwell_integral(a1, a2, a3), ref, 1e-9 * ref) << a1 << " " << a2 << " " << a3;
  }
}

TEST(MinDwellTime, ParaffinClosedFormMatchesSimpson) {
  const auto cfg = default_config();
  const auto d = derive_trigger(paraffin(), cfg.controller, cfg.trigger);
  EXPECT_NEAR(d.dwell.tau, d.dwell.tau_quadrature, 1e-9 * d.dwell.tau);
  EXPECT_NEAR(d.dwell.tau, dwell_oracle(d.dwell.a1, d.dwell.a2, d.dwell.a3), 1e-9 * d.dwell.tau);
  EXPECT_LT(d.dwell.tau, d.dwell.max_dwell);
  EXPECT_NEAR(d.dwell.tau, 0.65518, 1e-4);
}

TEST(MinDwellTime, BelowMaxDwellForRandomAdmissibleConfigs) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-4.0, 2.0), F(0.01, 0.999);
  for (int i = 0; i < 200; ++i) {
    const double c = std::pow(10.0, U(rng));
    const double delta = F(rng) / (1.0 + c);
    const double d_tau = min_dwell_time(4 * c * c, std::pow(10.0, U(rng)), std::pow(10.0, U(rng)),
                                        std::pow(10.0, U(rng)), delta, c)
                             .tau;
    EXPECT_LT(d_tau, 1.0 / c);
  }
}

TEST(MinDwellTime, RejectsBadDelta) { EXPECT_THROW(min_dwell_time(1, 1, 1, 1, 1.5, 1), ConfigError); }

TEST(DeriveTrigger, DeltaMustRespectGainBound) {
  auto cfg = default_config();
  cfg.trigger.delta = 1.0 / (1.0 + cfg.controller.c);
  EXPECT_THROW(derive_trigger(paraffin(), cfg.controller, cfg.trigger), ConfigError);
}

TEST(ValidateInitialData, DefaultDataPass) {
  const auto cfg = default_config();
  const auto p = paraffin();
  const auto rep = validate_initial_data(cfg.initial_data(p), cfg.controller, p);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " margin " << c.margin;
  EXPECT_NEAR(rep.H, 10.0, 1e-9);
  EXPECT_NEAR(rep.H_hat_l, 100.0, 1e-9);
}

TEST(ValidateInitialData, SetpointAtStartFails) {
  auto cfg = default_config();
  cfg.controller.s_r = cfg.initial.s0;
  const auto p = paraffin();
  const auto rep = validate_initial_data(cfg.initial_data(p), cfg.controller, p);
  EXPECT_FALSE(rep.find("setpoint_window")->passed);
  EXPECT_FALSE(rep.passed());
}

TEST(ValidateInitialData, ObserverEqualToPlantFailsSandwich) {
  auto cfg = default_config();
  cfg.initial.T0_hat = cfg.initial.T0;
  const auto p = paraffin();
  const auto rep = validate_initial_data(cfg.initial_data(p), cfg.controller, p);
  EXPECT_FALSE(rep.find("sandwich_lower_exceeds_H")->passed);
}

TEST(ValidateInitialData, BelowMeltingAndKinkDetected) {
  auto cfg = default_config();
  const auto p = paraffin();
  auto init = cfg.initial_data(p);
  init.T0 = [&](double x) { return p.Tm - 0.5 + x; };
  EXPECT_FALSE(validate_initial_data(init, cfg.controller, p).find("T0_above_melting")->passed);
  init.T0 = [&](double x) { return p.Tm + std::abs(x - 0.05) * 10.0 - 0.5 + 0.5; };
  EXPECT_FALSE(validate_initial_data(init, cfg.controller, p).find("T0_continuously_differentiable")->passed);
}

TEST(ValidateInitialData, InterfaceOutsideDomain) {
  auto cfg = default_config();
  const auto p = paraffin();
  auto init = cfg.initial_data(p);
  init.s0 = 4.0;
  EXPECT_FALSE(validate_initial_data(init, cfg.controller, p).passed());
}
