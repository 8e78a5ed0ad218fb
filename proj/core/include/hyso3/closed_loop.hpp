#pragma once

#include "hyso3/controllers.hpp"
#include "hyso3/hybrid.hpp"

#include <cstdint>
#include <optional>

namespace hyso3 {

struct ClosedLoopSetup {
  ControllerKind kind = ControllerKind::Basic;
  ZetaVariant zeta_variant = ZetaVariant::Standard;
  PotentialParams params;
  ControllerGains gains;
  Inertia inertia = Inertia(Mat3::Identity());
  ReferenceSignal reference = ReferenceSignal::named("zero", 1.0, 1e6);
  NoiseParams noise;
  std::uint64_t seed = 0;
  /// Off only for negative tests that need an inadmissible gain.
  bool validate_gains = true;
};

/// Union of the per-controller loop states; fields unused by a kind stay at defaults.
struct LoopState {
  Rotation Re;
  double theta = 0.0;
  Vec3 omega_e = Vec3::Zero();
  Rotation Rr;
  Vec3 omega_r = Vec3::Zero();
  Vec3 zeta = Vec3::Zero();
  Rotation Rtilde;
  double theta_bar = 0.0;

  BasicLoopState basic() const { return {Re, theta, omega_e, Rr, omega_r}; }
  SmoothLoopState smooth() const;
  VelocityFreeLoopState velocity_free() const;
  ErrorState error() const { return {Re, omega_e}; }
};

/**
 * Packed state layout (column-major 3x3 blocks):
 *
 *   [Re(9) theta omega_e(3) Rr(9) omega_r(3)]      basic, non_hybrid
 *   ... + [zeta(3)]                                smooth
 *   ... + [Rtilde(9) theta_bar]                    velocity_free
 */
struct StateLayout {
  static constexpr int kRe = 0;
  static constexpr int kTheta = 9;
  static constexpr int kOmegaE = 10;
  static constexpr int kRr = 13;
  static constexpr int kOmegaR = 22;
  static constexpr int kExtra = 25;

  static int dim(ControllerKind k);
  static VecX pack(ControllerKind k, const LoopState& s);
  /// Rotations are re-projected; valid on intermediate RK4 stages too.
  static LoopState unpack(ControllerKind k, const VecX& x);
};

/// Record layout emitted per arc sample: [tau(3), in_jump_set, n_R(3), n_omega(3)].
struct RecordLayout {
  static constexpr int kTau = 0;
  static constexpr int kInJump = 3;
  static constexpr int kNoiseR = 4;
  static constexpr int kNoiseW = 7;
  static constexpr int kDim = 10;
};

/**
 * The closed-loop hybrid system for one controller kind.
 *
 * The plant integrates the true state. With noise enabled, a fresh pair
 * (n_R, n_omega) is drawn at the start of every step and held; controller
 * terms and set membership are evaluated on the measured
 * Re_y = Re exp(n_R), omega_e_y = omega + n_omega - Re_y^T omega_r.
 */
class ClosedLoop : public HybridSystem {
 public:
  explicit ClosedLoop(ClosedLoopSetup setup);

  VecX flow(double t, const VecX& x) const override;
  VecX jump(double t, const VecX& x) const override;
  double jump_indicator(double t, const VecX& x) const override;
  VecX normalize(const VecX& x) const override;
  void begin_step(double t) override;
  VecX record(double t, const VecX& x) const override;

  const ClosedLoopSetup& setup() const { return setup_; }
  int dim() const { return StateLayout::dim(setup_.kind); }

  /// Control torque at state s under the currently held noise.
  Vec3 torque(double t, const LoopState& s) const;

 private:
  struct Measured {
    ErrorState e;
    Rotation Rtilde;
  };
  Measured measure(const LoopState& s) const;
  RefInputs ref_inputs(double t, const LoopState& s) const;

  ClosedLoopSetup setup_;
  NoiseModel noise_;
};

/// The state as seen through the measurements R_y = R exp(n_R), omega_y = omega + n_omega:
/// Re and Rtilde are right-multiplied by exp(n_R) and omega_e is rebuilt from omega_y.
LoopState measured_state(const LoopState& s, const Vec3& n_R, const Vec3& n_omega);

/// Initial data from body/reference attitudes. Rbar0 defaults to R0^T.
struct InitialConditions {
  Rotation R0;
  Vec3 omega0 = Vec3::Zero();
  Rotation Rr0;
  Vec3 omega_r0 = Vec3::Zero();
  double theta0 = 0.0;
  Vec3 zeta0 = Vec3::Zero();
  std::optional<Rotation> Rbar0;
  double theta_bar0 = 0.0;
};

LoopState initial_loop_state(const InitialConditions& ic);

}  // namespace hyso3
