#include "hyso3/controllers.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace hyso3 {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "gain " << name << " must be positive and finite (got " << v << ")";
    throw ContractViolation(os.str());
  }
}

}  // namespace

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::Basic:
      return "basic";
    case ControllerKind::Smooth:
      return "smooth";
    case ControllerKind::VelocityFree:
      return "velocity_free";
    case ControllerKind::NonHybrid:
      return "non_hybrid";
  }
  return "unknown";
}

ControllerKind controller_kind_from_string(const std::string& s) {
  if (s == "basic") return ControllerKind::Basic;
  if (s == "smooth") return ControllerKind::Smooth;
  if (s == "velocity_free") return ControllerKind::VelocityFree;
  if (s == "non_hybrid") return ControllerKind::NonHybrid;
  throw ContractViolation("unknown controller kind '" + s +
                          "' (expected basic, smooth, velocity_free or non_hybrid)");
}

void ControllerGains::validate(ControllerKind k, const PotentialParams& p) const {
  require_positive(kR, "kR");
  if (k != ControllerKind::NonHybrid) require_positive(k_theta, "k_theta");
  if (k != ControllerKind::VelocityFree) require_positive(k_omega, "k_omega");
  if (k == ControllerKind::Smooth) {
    require_positive(k_zeta, "k_zeta");
    require_positive(rho, "rho");
    if (!(delta_prime > 0.0 && delta_prime < p.delta())) {
      std::ostringstream os;
      os << "delta_prime must lie in (0, delta = " << p.delta() << "), got " << delta_prime;
      throw ContractViolation(os.str());
    }
  }
  if (k == ControllerKind::VelocityFree) {
    require_positive(k_beta, "k_beta");
    if (!Gamma.allFinite() || (Gamma - Gamma.transpose()).norm() > 1e-12 * Gamma.norm()) {
      throw ContractViolation("Gamma must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(Gamma);
    if (es.eigenvalues()[0] <= 0.0) {
      throw ContractViolation("Gamma must be positive definite");
    }
  }
}

double rho_bound(const PotentialParams& p, const ControllerGains& g,
                 const AssumptionConstants& c) {
  return (p.delta() - g.delta_prime) / (c.c_psi * c.c_psi);
}

double kzeta_star(const ControllerGains& g, const AssumptionConstants& c) {
  const double a = 1.0 + g.rho * c.c_R;
  return std::max(g.kR * a * a / (g.rho * g.k_omega), c.c_theta * c.c_theta * g.k_theta * g.rho);
}

std::vector<std::string> ControllerGains::warnings(ControllerKind k, const PotentialParams& p,
                                                   const AssumptionConstants& c) const {
  std::vector<std::string> out;
  if (k != ControllerKind::Smooth) return out;
  const double rb = rho_bound(p, *this, c);
  if (rho >= rb) {
    std::ostringstream os;
    os << "rho = " << rho << " is not below (delta - delta')/c_psi^2 = " << rb
       << "; undesired critical points of W are not guaranteed to lie in the jump set";
    out.push_back(os.str());
  }
  const double ks = kzeta_star(*this, c);
  if (k_zeta <= ks) {
    std::ostringstream os;
    os << "k_zeta = " << k_zeta << " does not exceed the high-gain threshold " << ks
       << "; flow monotonicity of the Lyapunov function is not guaranteed";
    out.push_back(os.str());
  }
  return out;
}

double theta_flow(const Rotation& r, double theta, const PotentialParams& p,
                  const ControllerGains& g) {
  return -g.k_theta * grad_theta(r, theta, p);
}

double theta_jump(const Rotation& r, const PotentialParams& p) {
  double best = std::numeric_limits<double>::infinity();
  double arg = p.theta_set().front();
  for (double tp : p.theta_set()) {
    const double u = potential(r, tp, p);
    if (u < best) {
      best = u;
      arg = tp;
    }
  }
  return arg;
}

bool in_flow_set(const Rotation& r, double theta, const PotentialParams& p) {
  return mu_U(r, theta, p) <= p.delta();
}

bool in_jump_set(const Rotation& r, double theta, const PotentialParams& p) {
  return mu_U(r, theta, p) >= p.delta();
}

Vec3 torque_basic(const ErrorState& e, double theta, const RefInputs& ref,
                  const PotentialParams& p, const ControllerGains& g, const Inertia& j) {
  return upsilon(e.Re, ref.omega_r, ref.z, j) - 2.0 * g.kR * grad_R_psi(e.Re, theta, p) -
         g.k_omega * e.omega_e;
}

Vec3 torque_non_hybrid(const ErrorState& e, const RefInputs& ref, const PotentialParams& p,
                       const ControllerGains& g, const Inertia& j) {
  return upsilon(e.Re, ref.omega_r, ref.z, j) - 2.0 * g.kR * psi(p.A() * e.Re.matrix()) -
         g.k_omega * e.omega_e;
}

Vec3 torque_smooth(const ErrorState& e, const Vec3& zeta, const RefInputs& ref,
                   const ControllerGains& g, const Inertia& j) {
  return upsilon(e.Re, ref.omega_r, ref.z, j) - 2.0 * g.kR * zeta - g.k_omega * e.omega_e;
}

Vec3 zeta_flow(const ErrorState& e, double theta, const Vec3& zeta, const PotentialParams& p,
               const ControllerGains& g, ZetaVariant variant) {
  const Vec3 filt = -g.k_zeta * (zeta - grad_R_psi(e.Re, theta, p));
  if (variant == ZetaVariant::Standard) return filt;
  const double v = theta_flow(e.Re, theta, p, g);
  return psi_dot(e.Re, theta, e.omega_e, v, p) + e.omega_e / g.rho + filt;
}

double W(const Rotation& r, double theta, const Vec3& zeta, const PotentialParams& p,
         double rho) {
  return potential(r, theta, p) + rho * (zeta - grad_R_psi(r, theta, p)).squaredNorm();
}

double mu_W(const Rotation& r, double theta, const Vec3& zeta, const PotentialParams& p,
            double rho) {
  double best = std::numeric_limits<double>::infinity();
  for (double tp : p.theta_set()) best = std::min(best, W(r, tp, zeta, p, rho));
  return W(r, theta, zeta, p, rho) - best;
}

double theta_jump_smooth(const Rotation& r, const Vec3& zeta, const PotentialParams& p,
                         double rho) {
  double best = std::numeric_limits<double>::infinity();
  double arg = p.theta_set().front();
  for (double tp : p.theta_set()) {
    const double w = W(r, tp, zeta, p, rho);
    if (w < best) {
      best = w;
      arg = tp;
    }
  }
  return arg;
}

bool in_flow_set_smooth(const Rotation& r, double theta, const Vec3& zeta,
                        const PotentialParams& p, const ControllerGains& g) {
  return mu_W(r, theta, zeta, p, g.rho) <= g.delta_prime;
}

bool in_jump_set_smooth(const Rotation& r, double theta, const Vec3& zeta,
                        const PotentialParams& p, const ControllerGains& g) {
  return mu_W(r, theta, zeta, p, g.rho) >= g.delta_prime;
}

Vec3 beta(const Rotation& r_tilde, double theta_bar, const PotentialParams& p,
          const ControllerGains& g) {
  return g.Gamma * grad_R_psi(r_tilde, theta_bar, p);
}

AuxTangent aux_flow(const Rotation& r_tilde, double theta_bar, const Vec3& omega_e,
                    const PotentialParams& p, const ControllerGains& g) {
  AuxTangent d;
  d.dR = r_tilde.matrix() * skew(omega_e - beta(r_tilde, theta_bar, p, g));
  d.dtheta = theta_flow(r_tilde, theta_bar, p, g);
  return d;
}

Vec3 torque_velocity_free(const Rotation& re, double theta, const Rotation& r_tilde,
                          double theta_bar, const RefInputs& ref, const PotentialParams& p,
                          const ControllerGains& g, const Inertia& j) {
  return upsilon(re, ref.omega_r, ref.z, j) - 2.0 * g.kR * grad_R_psi(re, theta, p) -
         2.0 * g.k_beta * grad_R_psi(r_tilde, theta_bar, p);
}

}  // namespace hyso3
