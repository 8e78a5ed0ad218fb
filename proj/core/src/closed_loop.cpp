#include "hyso3/closed_loop.hpp"

#include <sstream>

namespace hyso3 {

namespace {

void put_mat(VecX& x, int off, const Mat3& m) {
  x.segment<9>(off) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(m.data());
}

Mat3 get_mat(const VecX& x, int off) {
  return Eigen::Map<const Mat3>(x.data() + off);
}

}  // namespace

SmoothLoopState LoopState::smooth() const {
  SmoothLoopState s;
  static_cast<BasicLoopState&>(s) = basic();
  s.zeta = zeta;
  return s;
}

VelocityFreeLoopState LoopState::velocity_free() const {
  VelocityFreeLoopState s;
  static_cast<BasicLoopState&>(s) = basic();
  s.Rtilde = Rtilde;
  s.theta_bar = theta_bar;
  return s;
}

int StateLayout::dim(ControllerKind k) {
  switch (k) {
    case ControllerKind::Smooth:
      return kExtra + 3;
    case ControllerKind::VelocityFree:
      return kExtra + 10;
    default:
      return kExtra;
  }
}

VecX StateLayout::pack(ControllerKind k, const LoopState& s) {
  VecX x(dim(k));
  put_mat(x, kRe, s.Re.matrix());
  x[kTheta] = s.theta;
  x.segment<3>(kOmegaE) = s.omega_e;
  put_mat(x, kRr, s.Rr.matrix());
  x.segment<3>(kOmegaR) = s.omega_r;
  if (k == ControllerKind::Smooth) {
    x.segment<3>(kExtra) = s.zeta;
  } else if (k == ControllerKind::VelocityFree) {
    put_mat(x, kExtra, s.Rtilde.matrix());
    x[kExtra + 9] = s.theta_bar;
  }
  return x;
}

LoopState StateLayout::unpack(ControllerKind k, const VecX& x) {
  if (x.size() != dim(k)) {
    std::ostringstream os;
    os << "packed state has " << x.size() << " entries, expected " << dim(k) << " for "
       << to_string(k);
    throw ContractViolation(os.str());
  }
  LoopState s;
  s.Re = Rotation::project(get_mat(x, kRe));
  s.theta = x[kTheta];
  s.omega_e = x.segment<3>(kOmegaE);
  s.Rr = Rotation::project(get_mat(x, kRr));
  s.omega_r = x.segment<3>(kOmegaR);
  if (k == ControllerKind::Smooth) {
    s.zeta = x.segment<3>(kExtra);
  } else if (k == ControllerKind::VelocityFree) {
    s.Rtilde = Rotation::project(get_mat(x, kExtra));
    s.theta_bar = x[kExtra + 9];
  }
  return s;
}

ClosedLoop::ClosedLoop(ClosedLoopSetup setup)
    : setup_(std::move(setup)), noise_(setup_.noise, setup_.seed) {
  if (setup_.params.theta_set().empty()) {
    throw ContractViolation("closed loop requires constructed potential parameters");
  }
  if (setup_.validate_gains) setup_.gains.validate(setup_.kind, setup_.params);
}

LoopState measured_state(const LoopState& s, const Vec3& n_R, const Vec3& n_omega) {
  LoopState y = s;
  const Rotation en = exp_so3(n_R);
  y.Re = s.Re * en;
  // omega_y = omega + n_omega with omega = omega_e + Re^T omega_r
  const Vec3 omega_y = s.omega_e + s.Re.transpose() * s.omega_r + n_omega;
  y.omega_e = omega_y - y.Re.transpose() * s.omega_r;
  y.Rtilde = s.Rtilde * en;
  return y;
}

ClosedLoop::Measured ClosedLoop::measure(const LoopState& s) const {
  if (!noise_.enabled()) {
    return {{s.Re, s.omega_e}, s.Rtilde};
  }
  const LoopState y = measured_state(s, noise_.n_R(), noise_.n_omega());
  return {{y.Re, y.omega_e}, y.Rtilde};
}

RefInputs ClosedLoop::ref_inputs(double t, const LoopState& s) const {
  return {s.omega_r, setup_.reference.z(t)};
}

Vec3 ClosedLoop::torque(double t, const LoopState& s) const {
  const Measured y = measure(s);
  const RefInputs ref = ref_inputs(t, s);
  const PotentialParams& p = setup_.params;
  const ControllerGains& g = setup_.gains;
  const Inertia& j = setup_.inertia;
  switch (setup_.kind) {
    case ControllerKind::Basic:
      return torque_basic(y.e, s.theta, ref, p, g, j);
    case ControllerKind::Smooth:
      return torque_smooth(y.e, s.zeta, ref, g, j);
    case ControllerKind::VelocityFree:
      return torque_velocity_free(y.e.Re, s.theta, y.Rtilde, s.theta_bar, ref, p, g, j);
    case ControllerKind::NonHybrid:
      return torque_non_hybrid(y.e, ref, p, g, j);
  }
  throw std::logic_error("unhandled controller kind");
}

VecX ClosedLoop::flow(double t, const VecX& x) const {
  const ControllerKind k = setup_.kind;
  const LoopState s = StateLayout::unpack(k, x);
  const Measured y = measure(s);
  const RefInputs ref = ref_inputs(t, s);
  const PotentialParams& p = setup_.params;
  const ControllerGains& g = setup_.gains;
  const Vec3 tau = torque(t, s);

  const Tangent de = error_flow(s.error(), ref.omega_r, ref.z, tau, setup_.inertia);
  const Tangent dr = ref_flow({s.Rr, s.omega_r}, ref.z, setup_.reference.m_bound(), t);

  VecX dx = VecX::Zero(x.size());
  put_mat(dx, StateLayout::kRe, de.dR);
  dx.segment<3>(StateLayout::kOmegaE) = de.domega;
  put_mat(dx, StateLayout::kRr, dr.dR);
  dx.segment<3>(StateLayout::kOmegaR) = dr.domega;
  if (k != ControllerKind::NonHybrid) {
    dx[StateLayout::kTheta] = theta_flow(y.e.Re, s.theta, p, g);
  }
  if (k == ControllerKind::Smooth) {
    dx.segment<3>(StateLayout::kExtra) =
        zeta_flow(y.e, s.theta, s.zeta, p, g, setup_.zeta_variant);
  } else if (k == ControllerKind::VelocityFree) {
    // Rtilde = Rbar^T Re with dRbar/dt = Rbar (Rtilde_y beta_y)^x evaluated on measurements.
    const Vec3 b = beta(y.Rtilde, s.theta_bar, p, g);
    const Mat3 d_rt =
        s.Rtilde.matrix() * skew(s.omega_e) - skew(y.Rtilde * b) * s.Rtilde.matrix();
    put_mat(dx, StateLayout::kExtra, d_rt);
    dx[StateLayout::kExtra + 9] = theta_flow(y.Rtilde, s.theta_bar, p, g);
  }
  return dx;
}

double ClosedLoop::jump_indicator(double /*t*/, const VecX& x) const {
  const ControllerKind k = setup_.kind;
  if (k == ControllerKind::NonHybrid) return -1.0;
  const LoopState s = StateLayout::unpack(k, x);
  const Measured y = measure(s);
  const PotentialParams& p = setup_.params;
  switch (k) {
    case ControllerKind::Basic:
      return mu_U(y.e.Re, s.theta, p) - p.delta();
    case ControllerKind::Smooth:
      return mu_W(y.e.Re, s.theta, s.zeta, p, setup_.gains.rho) - setup_.gains.delta_prime;
    case ControllerKind::VelocityFree:
      return std::max(mu_U(y.e.Re, s.theta, p), mu_U(y.Rtilde, s.theta_bar, p)) - p.delta();
    default:
      return -1.0;
  }
}

VecX ClosedLoop::jump(double /*t*/, const VecX& x) const {
  const ControllerKind k = setup_.kind;
  const LoopState s = StateLayout::unpack(k, x);
  const Measured y = measure(s);
  const PotentialParams& p = setup_.params;
  VecX xp = x;
  switch (k) {
    case ControllerKind::Basic:
      xp[StateLayout::kTheta] = theta_jump(y.e.Re, p);
      break;
    case ControllerKind::Smooth:
      xp[StateLayout::kTheta] = theta_jump_smooth(y.e.Re, s.zeta, p, setup_.gains.rho);
      break;
    case ControllerKind::VelocityFree:
      if (hyso3::in_jump_set(y.e.Re, s.theta, p)) {
        xp[StateLayout::kTheta] = theta_jump(y.e.Re, p);
      }
      if (hyso3::in_jump_set(y.Rtilde, s.theta_bar, p)) {
        xp[StateLayout::kExtra + 9] = theta_jump(y.Rtilde, p);
      }
      break;
    case ControllerKind::NonHybrid:
      break;
  }
  return xp;
}

VecX ClosedLoop::normalize(const VecX& x) const {
  return StateLayout::pack(setup_.kind, StateLayout::unpack(setup_.kind, x));
}

void ClosedLoop::begin_step(double /*t*/) {
  if (noise_.enabled()) noise_.draw();
}

VecX ClosedLoop::record(double t, const VecX& x) const {
  const LoopState s = StateLayout::unpack(setup_.kind, x);
  setup_.reference.check_omega_r(s.omega_r, t);
  VecX out(RecordLayout::kDim);
  out.segment<3>(RecordLayout::kTau) = torque(t, s);
  out[RecordLayout::kInJump] = jump_indicator(t, x) >= 0.0 ? 1.0 : 0.0;
  out.segment<3>(RecordLayout::kNoiseR) = noise_.n_R();
  out.segment<3>(RecordLayout::kNoiseW) = noise_.n_omega();
  return out;
}

LoopState initial_loop_state(const InitialConditions& ic) {
  const ErrorState e = error_from({ic.R0, ic.omega0}, {ic.Rr0, ic.omega_r0});
  LoopState s;
  s.Re = e.Re;
  s.omega_e = e.omega_e;
  s.theta = ic.theta0;
  s.Rr = ic.Rr0;
  s.omega_r = ic.omega_r0;
  s.zeta = ic.zeta0;
  const Rotation rbar = ic.Rbar0 ? *ic.Rbar0 : ic.R0.transpose();
  s.Rtilde = rbar.transpose() * e.Re;
  s.theta_bar = ic.theta_bar0;
  return s;
}

}  // namespace hyso3
