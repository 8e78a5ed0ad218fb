#pragma once

#include "hyso3/potential.hpp"
#include "hyso3/rigid_body.hpp"

#include <string>
#include <vector>

namespace hyso3 {

enum class ControllerKind { Basic, Smooth, VelocityFree, NonHybrid };
enum class ZetaVariant { Standard, Relaxed };

std::string to_string(ControllerKind k);
ControllerKind controller_kind_from_string(const std::string& s);

struct ControllerGains {
  double kR = 1.5;
  double k_omega = 0.2;
  double k_theta = 50.0;
  double k_zeta = 150.0;
  double k_beta = 3.0;
  Mat3 Gamma = 30.0 * Mat3::Identity();
  double rho = 0.0146;
  double delta_prime = 0.162;

  /// Throws ContractViolation on any gain the controller of kind `k` cannot use.
  void validate(ControllerKind k, const PotentialParams& p) const;

  /// Non-fatal diagnostics: rho above its admissible bound, k_zeta at or below
  /// the high-gain threshold.
  std::vector<std::string> warnings(ControllerKind k, const PotentialParams& p,
                                    const AssumptionConstants& c) const;
};

/// (delta - delta') / c_psi^2
double rho_bound(const PotentialParams& p, const ControllerGains& g, const AssumptionConstants& c);

/// max{kR (1 + rho c_R)^2 / (rho k_omega), c_theta^2 k_theta rho}
double kzeta_star(const ControllerGains& g, const AssumptionConstants& c);

struct RefInputs {
  Vec3 omega_r = Vec3::Zero();
  Vec3 z = Vec3::Zero();
};

struct BasicLoopState {
  Rotation Re;
  double theta = 0.0;
  Vec3 omega_e = Vec3::Zero();
  Rotation Rr;
  Vec3 omega_r = Vec3::Zero();
};

struct SmoothLoopState : BasicLoopState {
  Vec3 zeta = Vec3::Zero();
};

struct VelocityFreeLoopState : BasicLoopState {
  Rotation Rtilde;
  double theta_bar = 0.0;

  /// Rbar = Re Rtilde^T
  Rotation Rbar() const { return Re * Rtilde.transpose(); }
};

/// -k_theta grad_theta U(R, theta)
double theta_flow(const Rotation& r, double theta, const PotentialParams& p,
                  const ControllerGains& g);

/// The first element of Theta attaining min U(R, .).
double theta_jump(const Rotation& r, const PotentialParams& p);

bool in_flow_set(const Rotation& r, double theta, const PotentialParams& p);
bool in_jump_set(const Rotation& r, double theta, const PotentialParams& p);

/// Upsilon - 2 kR grad_R_psi(Re, theta) - k_omega omega_e
Vec3 torque_basic(const ErrorState& e, double theta, const RefInputs& ref,
                  const PotentialParams& p, const ControllerGains& g, const Inertia& j);

/// Upsilon - 2 kR psi(A Re) - k_omega omega_e
Vec3 torque_non_hybrid(const ErrorState& e, const RefInputs& ref, const PotentialParams& p,
                       const ControllerGains& g, const Inertia& j);

/// Upsilon - 2 kR zeta - k_omega omega_e
Vec3 torque_smooth(const ErrorState& e, const Vec3& zeta, const RefInputs& ref,
                   const ControllerGains& g, const Inertia& j);

/**
 * Filter state derivative.
 *
 * Standard:  -k_zeta (zeta - grad_R_psi)
 * Relaxed:   psi_dot + omega_e / rho - k_zeta (zeta - grad_R_psi)
 *
 * psi_dot is taken along the closed-loop theta flow.
 */
Vec3 zeta_flow(const ErrorState& e, double theta, const Vec3& zeta, const PotentialParams& p,
               const ControllerGains& g, ZetaVariant variant);

/// U + rho ||zeta - grad_R_psi||^2
double W(const Rotation& r, double theta, const Vec3& zeta, const PotentialParams& p, double rho);

/// W(R, theta, zeta) - min over theta' in Theta of W(R, theta', zeta)
double mu_W(const Rotation& r, double theta, const Vec3& zeta, const PotentialParams& p,
            double rho);

/// The first element of Theta attaining min W(R, ., zeta).
double theta_jump_smooth(const Rotation& r, const Vec3& zeta, const PotentialParams& p,
                         double rho);

bool in_flow_set_smooth(const Rotation& r, double theta, const Vec3& zeta,
                        const PotentialParams& p, const ControllerGains& g);
bool in_jump_set_smooth(const Rotation& r, double theta, const Vec3& zeta,
                        const PotentialParams& p, const ControllerGains& g);

/// Gamma grad_R_psi(Rtilde, theta_bar)
Vec3 beta(const Rotation& r_tilde, double theta_bar, const PotentialParams& p,
          const ControllerGains& g);

struct AuxTangent {
  Mat3 dR = Mat3::Zero();
  double dtheta = 0.0;
};

/// dRtilde/dt = Rtilde (omega_e - beta)^x, dtheta_bar/dt = theta_flow(Rtilde, theta_bar)
AuxTangent aux_flow(const Rotation& r_tilde, double theta_bar, const Vec3& omega_e,
                    const PotentialParams& p, const ControllerGains& g);

/// Upsilon - 2 kR grad_R_psi(Re, theta) - 2 k_beta grad_R_psi(Rtilde, theta_bar).
/// Takes no angular velocity of the body.
Vec3 torque_velocity_free(const Rotation& re, double theta, const Rotation& r_tilde,
                          double theta_bar, const RefInputs& ref, const PotentialParams& p,
                          const ControllerGains& g, const Inertia& j);

}  // namespace hyso3
