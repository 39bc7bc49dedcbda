#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "stefan/config.hpp"
#include "stefan/plant.hpp"

using namespace stefan;

namespace {

PhysicalParams paraffin() { return derive_physical(default_config().physical); }

PlantState linear_start(std::size_t n, double amplitude = 1.0) {
  const auto p = paraffin();
  return immobilize([&](double x) { return p.Tm + amplitude * (1.0 - x / 0.1); }, 0.1, n, p);
}

// Runs under constant flux and returns the final state.
PlantState run_constant(PlantState st, double q, double dt, double horizon) {
  const auto p = paraffin();
  const long steps = std::lround(horizon / dt);
  for (long i = 0; i < steps; ++i) st = step_plant(st, q, dt, p);
  return st;
}

}  // namespace

TEST(Immobilize, MeltingTemperatureGivesZero) {
  const auto p = paraffin();
  const auto st = immobilize([&](double) { return p.Tm; }, 0.5, 21, p);
  for (double v : st.u.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(st.sdot, 0.0);
}

TEST(Immobilize, LinearProfileMapsToOneMinusXi) {
  const auto st = linear_start(61);
  for (std::size_t i = 0; i < st.u.n(); ++i) EXPECT_NEAR(st.u[i], 1.0 - st.u.xi(i), 1e-13);
  EXPECT_EQ(st.u[60], 0.0);
}

TEST(Immobilize, ResamplingLinearSamplesIsExact) {
  const auto p = paraffin();
  const std::vector<double> samples{2.0, 1.5, 1.0, 0.5, 0.0};
  const auto st = immobilize(std::span<const double>(samples), 0.4, 33, p);
  for (std::size_t i = 0; i < st.u.n(); ++i) EXPECT_NEAR(st.u[i], 2.0 * (1.0 - st.u.xi(i)), 1e-13);
}

TEST(Immobilize, InterfaceOutsideDomainIsBreach) {
  const auto p = paraffin();
  EXPECT_THROW(immobilize([&](double) { return p.Tm; }, 0.0, 21, p), ValidityBreach);
  EXPECT_THROW(immobilize([&](double) { return p.Tm; }, p.L, 21, p), ValidityBreach);
}

TEST(StepPlant, EquilibriumIsStationary) {
  const auto p = paraffin();
  auto st = immobilize([&](double) { return p.Tm; }, 1.0, 41, p);
  for (int i = 0; i < 100; ++i) st = step_plant(st, 0.0, 0.5, p);
  for (double v : st.u.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(st.s, 1.0);
  EXPECT_EQ(st.sdot, 0.0);
  EXPECT_DOUBLE_EQ(st.t, 50.0);
}

TEST(Measure, LinearProfileVelocity) {
  const auto p = paraffin();
  for (double a : {0.5, 1.0, 3.0}) {
    const auto st = linear_start(61, a);
    const auto m = measure(st);
    EXPECT_NEAR(m.sdot, p.beta * a / 0.1, 1e-12 * p.beta * a / 0.1);
    EXPECT_EQ(m.s, 0.1);
    EXPECT_NEAR(m.slope(p.beta), -a / 0.1, 1e-9);
  }
  EXPECT_EQ(measure(immobilize([&](double) { return p.Tm; }, 1.0, 21, p)).sdot, 0.0);
}

TEST(Measure, ConsistentWithStep) {
  const auto p = paraffin();
  auto st = linear_start(61);
  for (int i = 0; i < 10; ++i) {
    const auto next = step_plant(st, 0.05, 0.5, p);
    EXPECT_NEAR(next.s, st.s + 0.5 * measure(st).sdot, 1e-15);
    st = next;
  }
}

TEST(StepPlant, MonotoneInterfaceAndMaximumPrinciple) {
  const auto p = paraffin();
  auto st = linear_start(61);
  const double h = st.u.h();
  for (int i = 0; i < 4000; ++i) {
    const auto next = step_plant(st, 0.08, 0.5, p);
    EXPECT_GE(next.s, st.s);
    for (double v : next.u.values) ASSERT_GE(v, -10.0 * h * h);
    st = next;
  }
}

TEST(StepPlant, EnergyRateMatchesFlux) {
  const auto p = paraffin();
  auto st = linear_start(61);
  st = run_constant(st, 0.05, 0.5, 200.0);
  const double q = 0.05;
  const auto next = step_plant(st, q, 0.5, p);
  const double rate = (energy(next, p) - energy(st, p)) / 0.5;
  EXPECT_NEAR(rate, q / p.k, 0.01 * q / p.k);
}

TEST(StepPlant, GridConvergenceOfInterface) {
  const double horizon = 1000.0, q = 0.05;
  const double s1 = run_constant(linear_start(31), q, 1.0, horizon).s;
  const double s2 = run_constant(linear_start(61), q, 0.5, horizon).s;
  const double s3 = run_constant(linear_start(121), q, 0.25, horizon).s;
  EXPECT_GE(std::abs(s1 - s2) / std::abs(s2 - s3), 1.8);
}

TEST(StepPlant, LeavingDomainIsBreach) {
  const auto p = paraffin();
  auto st = immobilize([&](double x) { return p.Tm + 50.0 * (1.0 - x / 2.9); }, 2.9, 41, p);
  try {
    for (int i = 0; i < 100000; ++i) st = step_plant(st, 1.0, 0.5, p);
    FAIL() << "expected a breach";
  } catch (const ValidityBreach& e) {
    EXPECT_EQ(e.condition(), Breach::InterfaceBeyondDomain);
    EXPECT_GE(e.value(), p.L);
  }
}

TEST(StepPlant, NonFiniteFluxIsNumericalFailure) {
  EXPECT_THROW(step_plant(linear_start(21), std::nan(""), 0.5, paraffin()), NumericalFailure);
}
