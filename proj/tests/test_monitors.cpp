#include "hyso3/monitors.hpp"
#include "hyso3/random.hpp"
#include "hyso3/scenario.hpp"
#include "test_common.hpp"

#include <gtest/gtest.h>

namespace hyso3 {
namespace {

using test::kPi;
using test::uniform;

RunConfig bundled_run(const std::string& scenario, const std::string& run) {
  for (const RunConfig& rc : resolve_scenario(scenario).runs) {
    if (rc.name == run) return rc;
  }
  throw std::runtime_error("no run " + run + " in " + scenario);
}

LoopState random_loop_state(std::mt19937_64& rng) {
  LoopState s;
  s.Re = random_rotation(rng);
  s.theta = uniform(rng, -kPi, kPi);
  s.omega_e = random_gaussian_vec3(rng, 1.0);
  s.Rr = random_rotation(rng);
  s.omega_r = random_gaussian_vec3(rng, 1.0);
  s.zeta = random_gaussian_vec3(rng, 1.0);
  s.Rtilde = random_rotation(rng);
  s.theta_bar = uniform(rng, -kPi, kPi);
  return s;
}

TEST(Monitors, NonnegativeAwayFromAttractors) {
  const RunConfig rc = bundled_run("fig4", "velocity_free");
  const ClosedLoopSetup su = make_setup(rc);
  std::mt19937_64 rng(50);
  for (int i = 0; i < 100000; ++i) {
    const LoopState s = random_loop_state(rng);
    EXPECT_GT(lyapunov_basic(s.basic(), su.params, su.gains, su.inertia), 0.0);
    EXPECT_GT(lyapunov_smooth(s.smooth(), su.params, su.gains, su.inertia), 0.0);
    EXPECT_GT(lyapunov_vf(s.velocity_free(), su.params, su.gains, su.inertia), 0.0);
  }
}

TEST(Monitors, ValuesAtReferencePoints) {
  const ClosedLoopSetup su = make_setup(bundled_run("fig4", "smooth"));
  const auto& p = su.params;
  const auto& g = su.gains;
  const auto& j = su.inertia;
  const LoopState zero;
  EXPECT_EQ(lyapunov_basic(zero.basic(), p, g, j), 0.0);
  EXPECT_EQ(lyapunov_smooth(zero.smooth(), p, g, j), 0.0);
  EXPECT_EQ(lyapunov_vf(zero.velocity_free(), p, g, j), 0.0);
  EXPECT_EQ(lyapunov_eps(zero.basic(), p, g, j, 0.3), 0.0);

  std::mt19937_64 rng(51);
  for (int i = 0; i < 100; ++i) {
    LoopState s = random_loop_state(rng);
    const double kin = 0.5 * s.omega_e.dot(j.matrix() * s.omega_e);
    EXPECT_NEAR(lyapunov_basic(s.basic(), p, g, j), g.kR * potential(s.Re, s.theta, p) + kin,
                1e-12);
    EXPECT_EQ(lyapunov_eps(s.basic(), p, g, j, 0.0), lyapunov_basic(s.basic(), p, g, j));
    EXPECT_THROW(lyapunov_eps(s.basic(), p, g, j, -1.0), ContractViolation);

    s.zeta = grad_R_psi(s.Re, s.theta, p);
    EXPECT_EQ(lyapunov_smooth(s.smooth(), p, g, j), lyapunov_basic(s.basic(), p, g, j));
    s.Rtilde = Rotation();
    s.theta_bar = 0.0;
    EXPECT_EQ(lyapunov_vf(s.velocity_free(), p, g, j), lyapunov_basic(s.basic(), p, g, j));

    s.omega_e.setZero();
    EXPECT_EQ(lyapunov_basic(s.basic(), p, g, j), g.kR * potential(s.Re, s.theta, p));
  }
}

// d/dt L along the closed-loop flow, by central difference on the packed state.
double lyap_rate(const ClosedLoop& loop, const VecX& x, double h = 1e-6) {
  const ControllerKind k = loop.setup().kind;
  const VecX f = loop.flow(0.0, x);
  return (lyapunov(StateLayout::unpack(k, x + h * f), loop.setup()) -
          lyapunov(StateLayout::unpack(k, x - h * f), loop.setup())) / (2 * h);
}

TEST(Monitors, BasicFlowDerivativeIdentity) {
  ClosedLoopSetup su = make_setup(bundled_run("fig3", "gamma_7"));
  const ClosedLoop loop(su);
  std::mt19937_64 rng(52);
  for (int i = 0; i < 100; ++i) {
    const LoopState s = random_loop_state(rng);
    const VecX x = StateLayout::pack(su.kind, s);
    const double gt = grad_theta(s.Re, s.theta, su.params);
    const double expected = -su.gains.k_omega * s.omega_e.squaredNorm() -
                            su.gains.kR * su.gains.k_theta * gt * gt;
    EXPECT_NEAR(lyap_rate(loop, x), expected, 1e-5 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Monitors, VelocityFreeFlowDerivativeIdentity) {
  ClosedLoopSetup su = make_setup(bundled_run("fig4", "velocity_free"));
  su.noise = NoiseParams{};
  const ClosedLoop loop(su);
  const auto& p = su.params;
  const auto& g = su.gains;
  std::mt19937_64 rng(53);
  for (int i = 0; i < 100; ++i) {
    const LoopState s = random_loop_state(rng);
    const VecX x = StateLayout::pack(su.kind, s);
    const double g1 = grad_theta(s.Re, s.theta, p);
    const double g2 = grad_theta(s.Rtilde, s.theta_bar, p);
    const Vec3 gr = grad_R_psi(s.Rtilde, s.theta_bar, p);
    const double expected = -g.kR * g.k_theta * g1 * g1 - g.k_beta * g.k_theta * g2 * g2 -
                            2 * g.k_beta * gr.dot(g.Gamma * gr);
    EXPECT_NEAR(lyap_rate(loop, x), expected, 1e-5 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Monitors, EpsilonLyapunovPositiveBelowThreshold) {
  const RunConfig rc = bundled_run("fig3", "gamma_7");
  const RunResult r = simulate(rc);
  ASSERT_TRUE(r.setup.has_value());
  const ClosedLoopSetup& su = *r.setup;
  const AssumptionConstants c = assumption_constants(su.params, 20000);
  const double eps1 = epsilon1_star(su.gains, su.inertia, c);
  const double expected = std::sqrt(2 * su.gains.kR * su.inertia.lambda_min() / c.alpha1) /
                          su.inertia.lambda_max();
  EXPECT_NEAR(eps1, expected, 1e-12);
  for (const ArcSample& smp : r.arc.samples) {
    const LoopState s = StateLayout::unpack(su.kind, smp.x);
    if (lyapunov(s, su) < 1e-12) continue;  // below round-off of the eps cross term
    EXPECT_GT(lyapunov_eps(s.basic(), su.params, su.gains, su.inertia, 0.99 * eps1), 0.0);
  }
}

TEST(Monitors, CertifiesBasicRun) {
  const RunResult r = simulate(bundled_run("fig3", "gamma_7"));
  ASSERT_TRUE(r.error.empty()) << r.error;
  EXPECT_TRUE(r.report.pass());
  EXPECT_EQ(r.report.jump_count, 1);
  EXPECT_LE(r.report.jump_count, r.report.jump_bound);
  EXPECT_GE(r.report.min_jump_drop, 0.486 - 1e-9);
  EXPECT_LT(r.report.max_flow_increase, 1e-7);
  EXPECT_NE(r.report.to_text().find("certification = PASS"), std::string::npos);
}

TEST(Monitors, WrongSignGainFailsFlowCheck) {
  RunConfig rc = bundled_run("fig3", "gamma_7");
  // The undamped loop spins up within milliseconds; keep the window short.
  rc.solver.t_max = 0.02;
  rc.solver.dt = 1e-4;
  ClosedLoopSetup su = make_setup(rc);
  su.gains.k_omega = -0.2;
  su.validate_gains = false;
  ClosedLoop loop(su);
  const VecX x0 = StateLayout::pack(su.kind, initial_loop_state(make_initial_conditions(rc)));
  const HybridArc arc = solve(loop, x0, rc.solver);
  const CertificationReport rep = certify_arc(arc, su, su.kind);
  EXPECT_FALSE(rep.flow_ok);
  EXPECT_FALSE(rep.pass());
  EXPECT_GT(rep.max_flow_increase, 1e-7);
}

TEST(Monitors, MismatchedMonitorThrows) {
  RunConfig rc = bundled_run("fig3", "gamma_7");
  rc.solver.t_max = 0.1;
  const RunResult r = simulate(rc);
  EXPECT_THROW(certify_arc(r.arc, *r.setup, ControllerKind::Smooth), MonitorMismatch);
  EXPECT_NO_THROW(certify_arc(r.arc, *r.setup, ControllerKind::Basic));
}

TEST(Monitors, SmoothTorqueIsContinuousAcrossJumps) {
  RunConfig rc = bundled_run("fig4", "smooth");
  rc.noise = false;
  rc.solver.t_max = 3.0;
  const RunResult r = simulate(rc);
  ASSERT_TRUE(r.error.empty()) << r.error;
  ASSERT_GE(r.report.jump_count, 1);
  EXPECT_EQ(r.report.max_torque_jump, 0.0);
  EXPECT_GE(r.report.min_jump_drop, 0.243 - 1e-9);
  EXPECT_TRUE(r.report.pass());
}

TEST(Monitors, ExponentialTailFit) {
  const RunResult r = simulate(bundled_run("fig3", "gamma_3"));
  const ExponentialFit fit = fit_exponential_tail(r.arc, *r.setup);
  ASSERT_TRUE(fit.valid);
  EXPECT_LT(fit.slope, 0.0);
  EXPECT_GT(fit.r2, 0.9);
  EXPECT_GT(fit.n, 100);
}

TEST(Monitors, MeasuredStateWithoutNoiseIsIdentity) {
  std::mt19937_64 rng(54);
  const LoopState s = random_loop_state(rng);
  const LoopState y = measured_state(s, Vec3::Zero(), Vec3::Zero());
  EXPECT_LT((y.Re.matrix() - s.Re.matrix()).norm(), 1e-15);
  EXPECT_LT((y.omega_e - s.omega_e).norm(), 1e-14);
  EXPECT_LT((y.Rtilde.matrix() - s.Rtilde.matrix()).norm(), 1e-15);

  const Vec3 nr(0.05, -0.02, 0.1), nw(0.1, 0.0, -0.1);
  const LoopState m = measured_state(s, nr, nw);
  const Vec3 omega = s.omega_e + s.Re.transpose() * s.omega_r;
  EXPECT_LT((m.omega_e + m.Re.transpose() * s.omega_r - (omega + nw)).norm(), 1e-13);
}

}  // namespace
}  // namespace hyso3
