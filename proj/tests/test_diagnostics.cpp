#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "stefan/config.hpp"
#include "stefan/diagnostics.hpp"
#include "stefan/scenario.hpp"

using namespace stefan;

namespace {

PhysicalParams paraffin() { return derive_physical(default_config().physical); }
TransformConstants constants() { return make_transform_constants(paraffin(), default_config().controller); }

const std::vector<std::function<double(double)>>& smooth_profiles() {
  static const std::vector<std::function<double(double)>> f = {
      [](double xi) { return std::cos(std::numbers::pi * xi / 2.0); },
      [](double xi) { return 1.0 - xi * xi; },
      [](double xi) { return std::sin(std::numbers::pi * (1.0 - xi)) + (1.0 - xi); },
  };
  return f;
}

double max_abs_diff(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double error_round_trip(const std::function<double(double)>& f, std::size_t n, double s) {
  const double a = paraffin().alpha;
  const auto u = Profile::sample(n, f);
  return max_abs_diff(transform_error_direct(transform_error_inverse(u, s, 0.1, a), s, 0.1, a), u);
}

double controller_round_trip(const std::function<double(double)>& f, std::size_t n, double s, double X) {
  const double a = paraffin().alpha;
  const auto tc = constants();
  const auto u = Profile::sample(n, f);
  return max_abs_diff(transform_controller_inverse(transform_controller_direct(u, X, s, a, tc), X, s, a, tc), u);
}

}  // namespace

TEST(ErrorTransform, ZeroAndIdentity) {
  const double a = paraffin().alpha;
  const Profile zero(31, 0.0);
  EXPECT_EQ(max_abs_diff(transform_error_direct(zero, 1.0, 0.1, a), zero), 0.0);
  const auto u = Profile::sample(31, smooth_profiles()[1]);
  EXPECT_EQ(max_abs_diff(transform_error_direct(u, 1.0, 0.0, a), u), 0.0);
  EXPECT_EQ(max_abs_diff(transform_error_inverse(u, 1.0, 0.0, a), u), 0.0);
}

TEST(ErrorTransform, RoundTripSecondOrder) {
  for (const auto& f : smooth_profiles()) {
    const double e61 = error_round_trip(f, 61, 0.1);
    EXPECT_LT(e61, 10.0 / (60.0 * 60.0));
    for (double s : {0.1, 1.0, 2.0}) {
      const double coarse = error_round_trip(f, 61, s), fine = error_round_trip(f, 121, s);
      EXPECT_GE(coarse / fine, 1.8) << "s = " << s;
    }
  }
}

TEST(ControllerTransform, ZeroAndBoundaryValue) {
  const double a = paraffin().alpha;
  const auto tc = constants();
  const Profile zero(31, 0.0);
  EXPECT_EQ(max_abs_diff(transform_controller_direct(zero, 0.0, 1.0, a, tc), zero), 0.0);
  const auto u = Profile::sample(31, [](double xi) { return 2.0 * (1.0 - xi); });
  const double X = -0.7;
  const auto w = transform_controller_direct(u, X, 1.3, a, tc);
  EXPECT_NEAR(w[30], tc.epsilon * X, 1e-15);
}

TEST(ControllerTransform, RoundTripSecondOrder) {
  for (const auto& f : smooth_profiles()) {
    for (double s : {0.1, 1.0, 2.0}) {
      const double coarse = controller_round_trip(f, 61, s, -0.5), fine = controller_round_trip(f, 121, s, -0.5);
      EXPECT_LT(coarse, 10.0 / (60.0 * 60.0)) << s;
      EXPECT_GE(coarse / fine, 1.8) << "s = " << s;
    }
  }
}

TEST(Lyapunov, ZeroStatesReduceToM) {
  const auto cfg = default_config();
  const auto p = paraffin();
  const auto d = derive_trigger(p, cfg.controller, cfg.trigger);
  PlantState plant;
  plant.u = Profile(61, 0.0);
  plant.s = cfg.controller.s_r;
  ObserverState obs;
  obs.u_hat = Profile(61, 0.0);
  const auto v = lyapunov_W(plant, obs, cfg.trigger.m0, cfg.controller.s_r, p, d.transform, d.lyapunov);
  EXPECT_EQ(v.V1, 0.0);
  EXPECT_EQ(v.V, cfg.trigger.m0);
  EXPECT_NEAR(v.W, cfg.trigger.m0 * std::exp(-d.lyapunov.xi * plant.s), 1e-30);
  EXPECT_NEAR(v.log_W, std::log(v.W), 1e-12);
}

TEST(Lyapunov, PositiveWithPositiveM) {
  const auto cfg = default_config();
  const auto p = paraffin();
  const auto d = derive_trigger(p, cfg.controller, cfg.trigger);
  const auto init = cfg.initial_data(p);
  const auto plant = immobilize(init.T0, init.s0, 61, p);
  const auto obs = make_observer(init.T0_hat, init.s0, 61, p);
  const auto v = lyapunov_W(plant, obs, 1e-12, cfg.controller.s_r, p, d.transform, d.lyapunov);
  EXPECT_GT(v.W, 0.0);
  EXPECT_GT(v.V1, 0.0);
  EXPECT_GT(d.lyapunov.B, 0.0);
  EXPECT_GT(d.lyapunov.xi, 0.0);
}

TEST(Lyapunov, ScaleConstants) {
  const auto cfg = default_config();
  const auto p = paraffin();
  const auto d = derive_trigger(p, cfg.controller, cfg.trigger);
  EXPECT_NEAR(d.b_star, 2.0 * d.mus.mu3 / (cfg.trigger.A * p.alpha), 1e-6 * d.b_star);
  EXPECT_DOUBLE_EQ(d.lyapunov.xi, std::max(cfg.controller.c * p.L / p.beta,
                                           p.beta / (p.alpha * 0.1) * (0.01 + cfg.controller.c / p.beta)));
}

TEST(ValidityReport, EmptyRun) {
  const auto rep = validity_report(std::vector<PlantState>{}, std::vector<double>{}, 3.0);
  EXPECT_TRUE(rep.empty());
  EXPECT_TRUE(rep.ok(0.0));
  EXPECT_FALSE(rep.min_q.has_value());
}

TEST(ValidityReport, MarginsFromStates) {
  PlantState a;
  a.u = Profile(std::vector<double>{0.5, 0.2, 0.0});
  a.s = 1.0;
  a.sdot = 0.01;
  PlantState b = a;
  b.u = Profile(std::vector<double>{-0.1, 0.3, 0.0});
  b.s = 1.5;
  const auto rep = validity_report(std::vector<PlantState>{a, b}, std::vector<double>{0.3, 0.1}, 3.0);
  EXPECT_EQ(rep.min_excess, -0.1);
  EXPECT_EQ(rep.min_boundary_excess, -0.1);
  EXPECT_EQ(rep.min_s, 1.0);
  EXPECT_EQ(rep.domain_margin(), 1.5);
  EXPECT_EQ(*rep.min_q, 0.1);
  EXPECT_FALSE(rep.ok(0.01));
  EXPECT_TRUE(rep.ok(0.2));
}

TEST(ValidityReport, SetpointBelowStartFlagsNonPositiveHeat) {
  auto cfg = default_config();
  cfg.controller.s_r = 0.05;
  cfg.scenario.unsafe = true;
  cfg.scheme.horizon = 10.0;
  const auto r = run_scenario(cfg);
  ASSERT_TRUE(r.breach.has_value());
  EXPECT_EQ(r.breach->condition, "nonpositive_input");
  EXPECT_LE(r.breach->value, 0.0);
}

TEST(TargetSystem, ResidualShrinksUnderRefinement) {
  // w_tilde_t = alpha w_tilde_xx - lambda w_tilde on interior nodes, with the time
  // derivative at fixed x taken as (w^{n+1} - w^n)/dt - (xi sdot/s) w_xi.
  auto residual = [](std::size_t n, double dt) {
    const auto p = paraffin();
    const auto cfg = default_config();
    const auto init = cfg.initial_data(p);
    auto plant = immobilize(init.T0, init.s0, n, p);
    auto obs = make_observer(init.T0_hat, init.s0, n, p);
    const double q = 0.09;
    const double lambda = cfg.controller.lambda;
    const long steps = std::lround(2.0 / dt);
    double worst = 0.0;
    for (long k = 0; k < steps; ++k) {
      auto next = step_plant(plant, q, dt, p);
      auto next_obs = step_observer(obs, measure(plant), measure(next), q, dt, p, lambda);
      const auto w0 = transform_error_inverse(error_profile(plant, obs), plant.s, lambda, p.alpha);
      const auto w1 = transform_error_inverse(error_profile(next, next_obs), next.s, lambda, p.alpha);
      const double h = w1.h(), s = next.s;
      double sq = 0.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double wxi = (w1[i + 1] - w1[i - 1]) / (2 * h);
        const double wxx = (w1[i + 1] - 2 * w1[i] + w1[i - 1]) / (h * h) / (s * s);
        const double wt = (w1[i] - w0[i]) / dt - w1.xi(i) * next.sdot / s * wxi;
        const double r = wt - p.alpha * wxx + lambda * w1[i];
        sq += r * r;
      }
      worst = std::max(worst, std::sqrt(sq * s * h));
      plant = std::move(next);
      obs = std::move(next_obs);
    }
    return worst;
  };
  const double coarse = residual(61, 0.5), fine = residual(121, 0.125);
  EXPECT_GE(coarse / fine, 1.8) << coarse << " " << fine;
}
