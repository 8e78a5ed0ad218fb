#include "hyso3/controllers.hpp"
#include "hyso3/random.hpp"
#include "test_common.hpp"

#include <gtest/gtest.h>

#include <type_traits>

namespace hyso3 {
namespace {

using test::kPi;
using test::uniform;

Inertia quad_inertia() { return Inertia::diagonal(Vec3(0.0159, 0.0150, 0.0297)); }

TEST(Controllers, KindNames) {
  for (ControllerKind k : {ControllerKind::Basic, ControllerKind::Smooth,
                           ControllerKind::VelocityFree, ControllerKind::NonHybrid}) {
    EXPECT_EQ(controller_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(to_string(ControllerKind::VelocityFree), "velocity_free");
  EXPECT_THROW(controller_kind_from_string("pid"), ContractViolation);
}

TEST(Controllers, GainValidation) {
  const PotentialParams p = test::fig_params();
  ControllerGains g;
  EXPECT_NO_THROW(g.validate(ControllerKind::Smooth, p));
  g.kR = -1.0;
  EXPECT_THROW(g.validate(ControllerKind::Basic, p), ContractViolation);
  g = ControllerGains{};
  g.delta_prime = 0.4;
  EXPECT_THROW(g.validate(ControllerKind::Smooth, p), ContractViolation);
  g = ControllerGains{};
  g.Gamma = -Mat3::Identity();
  EXPECT_THROW(g.validate(ControllerKind::VelocityFree, p), ContractViolation);
}

TEST(Controllers, GainDiagnostics) {
  const PotentialParams p = test::fig_params();
  const AssumptionConstants c = assumption_constants(p, 2000);
  const ControllerGains g;
  EXPECT_NEAR(rho_bound(p, g, c), 0.162 / 100.0, 1e-12);
  // max{kR (1 + rho c_R)^2 / (rho k_omega), c_theta^2 k_theta rho}
  const double a = 1.5 * std::pow(1 + 0.0146 * std::sqrt(50.0), 2) / (0.0146 * 0.2);
  const double b = std::pow(std::sqrt(50.0) + 10, 2) * 50 * 0.0146;
  EXPECT_NEAR(kzeta_star(g, c), std::max(a, b), 1e-9);
  EXPECT_NEAR(kzeta_star(g, c), 625.24, 0.01);
  EXPECT_EQ(g.warnings(ControllerKind::Smooth, p, c).size(), 2u);
  EXPECT_TRUE(g.warnings(ControllerKind::Basic, p, c).empty());
  ControllerGains ok = g;
  ok.rho = 0.001;
  ok.k_zeta = 2.0 * kzeta_star(ok, c);
  EXPECT_TRUE(ok.warnings(ControllerKind::Smooth, p, c).empty());
}

TEST(Controllers, ThetaFlow) {
  const PotentialParams p = test::fig_params();
  const ControllerGains g;
  EXPECT_EQ(theta_flow(Rotation(), 0.0, p, g), 0.0);
  // With T = I the rotational coupling vanishes and only the quadratic pull remains.
  const double th = 0.7;
  const Rotation r = angle_axis(th, p.u()).transpose();
  EXPECT_NEAR(theta_flow(r, th, p, g), -g.k_theta * p.gamma() * th, 1e-12);

  std::mt19937_64 rng(40);
  for (int i = 0; i < 1000; ++i) {
    const Rotation q = random_rotation(rng);
    const double t = uniform(rng, -kPi, kPi);
    EXPECT_LE(theta_flow(q, t, p, g) * grad_theta(q, t, p), 0.0);
  }
}

TEST(Controllers, ThetaJumpDecreasesPotential) {
  const PotentialParams p = test::fig_params();
  std::mt19937_64 rng(41);
  int in_jump = 0;
  for (int i = 0; i < 20000; ++i) {
    const Rotation r = random_rotation(rng);
    const double t = uniform(rng, -kPi, kPi);
    EXPECT_EQ(theta_jump(r, p), 0.9 * kPi);
    if (in_jump_set(r, t, p)) {
      ++in_jump;
      EXPECT_LE(potential(r, theta_jump(r, p), p), potential(r, t, p) - p.delta() + 1e-12);
    }
  }
  EXPECT_GT(in_jump, 100);
}

TEST(Controllers, ThetaJumpTieBreak) {
  const Mat3 a = Vec3(2, 4, 6).asDiagonal();
  const PotentialParams pa = construct_params(a, {-1.0, 1.0}, 0.5, 0.5);
  const PotentialParams pb = construct_params(a, {1.0, -1.0}, 0.5, 0.5);
  ASSERT_EQ(potential(Rotation(), 1.0, pa), potential(Rotation(), -1.0, pa));
  EXPECT_EQ(theta_jump(Rotation(), pa), -1.0);
  EXPECT_EQ(theta_jump(Rotation(), pb), 1.0);
}

TEST(Controllers, SetMembership) {
  const PotentialParams p = test::fig_params();
  EXPECT_TRUE(in_flow_set(Rotation(), 0.0, p));
  EXPECT_FALSE(in_jump_set(Rotation(), 0.0, p));
  for (const ExtendedState& x : undesired_critical_points(p).points) {
    EXPECT_TRUE(in_jump_set(x.R, x.theta, p));
    EXPECT_FALSE(in_flow_set(x.R, x.theta, p));
  }

  // Place the boundary exactly on a chosen state by taking delta = mu_U there.
  const Mat3 a = Vec3(2, 4, 6).asDiagonal();
  const double gamma = p.gamma();
  double lo = 0.9 * kPi, hi = kPi;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (mu_U(Rotation(), mid, p) < 0.2 ? lo : hi) = mid;
  }
  const double mu = mu_U(Rotation(), lo, p);
  const PotentialParams pb = construct_params_absolute(a, {0.9 * kPi}, gamma, mu);
  EXPECT_TRUE(in_flow_set(Rotation(), lo, pb));
  EXPECT_TRUE(in_jump_set(Rotation(), lo, pb));
}

TEST(Controllers, BasicAndNonHybridTorque) {
  const PotentialParams p = test::fig_params();
  const ControllerGains g;
  const Inertia j = quad_inertia();
  EXPECT_EQ(torque_basic(ErrorState{}, 0.0, RefInputs{}, p, g, j).norm(), 0.0);

  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const ErrorState e{random_rotation(rng), random_gaussian_vec3(rng, 1.0)};
    const RefInputs ref{random_gaussian_vec3(rng, 1.0), random_gaussian_vec3(rng, 1.0)};
    EXPECT_EQ(torque_non_hybrid(e, ref, p, g, j), torque_basic(e, 0.0, ref, p, g, j));
    const double th = uniform(rng, -kPi, kPi);
    const Vec3 expected = upsilon(e.Re, ref.omega_r, ref.z, j) -
                          2 * g.kR * grad_R_psi(e.Re, th, p) - g.k_omega * e.omega_e;
    EXPECT_LT((torque_basic(e, th, ref, p, g, j) - expected).norm(), 1e-13);
  }

  // Near the half-turn about e3 the non-hybrid feedback vanishes.
  const ErrorState near{angle_axis(kPi - 1e-9, Vec3::UnitZ()), Vec3::Zero()};
  EXPECT_LT(torque_non_hybrid(near, RefInputs{}, p, g, j).norm(), 1e-7);
  EXPECT_LT(psi(p.A() * angle_axis(kPi, Vec3::UnitZ()).matrix()).norm(), 1e-15);
}

TEST(Controllers, SmoothTorqueAndFilter) {
  const PotentialParams p = test::fig_params();
  const ControllerGains g;
  const Inertia j = quad_inertia();
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const ErrorState e{random_rotation(rng), random_gaussian_vec3(rng, 1.0)};
    const RefInputs ref{random_gaussian_vec3(rng, 1.0), random_gaussian_vec3(rng, 1.0)};
    const Vec3 zeta = random_gaussian_vec3(rng, 1.0);
    const double th = uniform(rng, -kPi, kPi);
    const Vec3 expected = upsilon(e.Re, ref.omega_r, ref.z, j) - 2 * g.kR * zeta -
                          g.k_omega * e.omega_e;
    EXPECT_LT((torque_smooth(e, zeta, ref, g, j) - expected).norm(), 1e-13);

    const Vec3 grad = grad_R_psi(e.Re, th, p);
    EXPECT_LT(zeta_flow(e, th, grad, p, g, ZetaVariant::Standard).norm(), 1e-15);
    const Vec3 std_flow = -g.k_zeta * (zeta - grad);
    EXPECT_LT((zeta_flow(e, th, zeta, p, g, ZetaVariant::Standard) - std_flow).norm(), 1e-12);
    const Vec3 relaxed = psi_dot(e.Re, th, e.omega_e, theta_flow(e.Re, th, p, g), p) +
                         e.omega_e / g.rho + std_flow;
    EXPECT_LT((zeta_flow(e, th, zeta, p, g, ZetaVariant::Relaxed) - relaxed).norm(), 1e-10);
  }
}

TEST(Controllers, SmoothPotential) {
  const PotentialParams p = test::fig_params();
  EXPECT_EQ(W(Rotation(), 0.0, Vec3::Zero(), p, 0.0146), 0.0);
  std::mt19937_64 rng(44);
  for (int i = 0; i < 100; ++i) {
    const Rotation r = random_rotation(rng);
    const double th = uniform(rng, -kPi, kPi);
    EXPECT_EQ(W(r, th, grad_R_psi(r, th, p), p, 0.0146), potential(r, th, p));
    const Vec3 zeta = random_gaussian_vec3(rng, 1.0);
    const double expected =
        potential(r, th, p) + 0.0146 * (zeta - grad_R_psi(r, th, p)).squaredNorm();
    EXPECT_NEAR(W(r, th, zeta, p, 0.0146), expected, 1e-12);
  }
  // Below the admissible rho every undesired critical point stays in the smooth jump set.
  ControllerGains g;
  g.rho = 0.0015;
  for (const ExtendedState& x : undesired_critical_points(p).points) {
    EXPECT_GT(mu_W(x.R, x.theta, Vec3::Zero(), p, g.rho), g.delta_prime);
    EXPECT_TRUE(in_jump_set_smooth(x.R, x.theta, Vec3::Zero(), p, g));
  }
  EXPECT_TRUE(in_flow_set_smooth(Rotation(), 0.0, Vec3::Zero(), p, g));
  EXPECT_FALSE(in_jump_set_smooth(Rotation(), 0.0, Vec3::Zero(), p, g));
}

TEST(Controllers, SmoothJumpMinimizesW) {
  const PotentialParams p = test::fig_params();
  std::mt19937_64 rng(45);
  for (int i = 0; i < 1000; ++i) {
    const Rotation r = random_rotation(rng);
    const Vec3 zeta = random_gaussian_vec3(rng, 2.0);
    const double th = uniform(rng, -kPi, kPi);
    const double tp = theta_jump_smooth(r, zeta, p, 0.0146);
    EXPECT_NEAR(W(r, th, zeta, p, 0.0146) - W(r, tp, zeta, p, 0.0146),
                mu_W(r, th, zeta, p, 0.0146), 1e-12);
  }
}

TEST(Controllers, AuxiliarySystem) {
  const PotentialParams p = test::fig_params();
  const ControllerGains g;
  EXPECT_EQ(beta(Rotation(), 0.0, p, g).norm(), 0.0);
  const AuxTangent rest = aux_flow(Rotation(), 0.0, Vec3::Zero(), p, g);
  EXPECT_EQ(rest.dR.norm(), 0.0);
  EXPECT_EQ(rest.dtheta, 0.0);
  EXPECT_LT((2 * g.k_beta * g.Gamma.inverse() - g.k_omega * Mat3::Identity()).norm(), 1e-15);

  std::mt19937_64 rng(46);
  const Rotation rt = random_rotation(rng);
  const Vec3 we = random_gaussian_vec3(rng, 1.0);
  const AuxTangent d = aux_flow(rt, 0.4, we, p, g);
  const Vec3 b = g.Gamma * grad_R_psi(rt, 0.4, p);
  EXPECT_LT((d.dR - rt.matrix() * skew(we - b)).norm(), 1e-12);
  EXPECT_NEAR(d.dtheta, theta_flow(rt, 0.4, p, g), 1e-15);
}

TEST(Controllers, VelocityFreeTorque) {
  // The law cannot receive an angular velocity: its parameter list is fixed here.
  using Expected = Vec3 (*)(const Rotation&, double, const Rotation&, double, const RefInputs&,
                            const PotentialParams&, const ControllerGains&, const Inertia&);
  static_assert(std::is_same_v<decltype(&torque_velocity_free), Expected>);

  const PotentialParams p = test::fig_params();
  const ControllerGains g;
  const Inertia j = quad_inertia();
  EXPECT_EQ(torque_velocity_free(Rotation(), 0.0, Rotation(), 0.0, RefInputs{}, p, g, j).norm(),
            0.0);
  std::mt19937_64 rng(47);
  const Rotation re = random_rotation(rng), rt = random_rotation(rng);
  const RefInputs ref{random_gaussian_vec3(rng, 1.0), random_gaussian_vec3(rng, 1.0)};
  const Vec3 expected = upsilon(re, ref.omega_r, ref.z, j) - 2 * g.kR * grad_R_psi(re, 0.3, p) -
                        2 * g.k_beta * grad_R_psi(rt, -0.2, p);
  EXPECT_LT((torque_velocity_free(re, 0.3, rt, -0.2, ref, p, g, j) - expected).norm(), 1e-13);
}

}  // namespace
}  // namespace hyso3
