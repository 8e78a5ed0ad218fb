#include "hyso3/rigid_body.hpp"

#include "hyso3/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace hyso3 {

Inertia::Inertia(const Mat3& j) : j_(j) {
  if (!j.allFinite()) {
    throw ContractViolation("inertia has non-finite entries");
  }
  if ((j - j.transpose()).norm() > 1e-12 * std::max(1.0, j.norm())) {
    throw ContractViolation("inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(j);
  lambda_min_ = es.eigenvalues()[0];
  lambda_max_ = es.eigenvalues()[2];
  if (lambda_min_ <= 0.0) {
    throw ContractViolation("inertia must be positive definite");
  }
  j_inv_ = j.inverse();
}

Tangent body_flow(const BodyState& s, const Vec3& tau, const Inertia& j) {
  Tangent d;
  d.dR = s.R.matrix() * skew(s.omega);
  d.domega = j.inverse() * (-s.omega.cross(j.matrix() * s.omega) + tau);
  return d;
}

ReferenceSignal::ReferenceSignal(std::string name, std::function<Vec3(double)> z, double m_bound,
                                 double omega_r_bound)
    : name_(std::move(name)), z_(std::move(z)), m_bound_(m_bound), omega_r_bound_(omega_r_bound) {
  if (!(m_bound_ >= 0.0)) {
    throw ContractViolation("reference bound m must be nonnegative");
  }
  if (!(omega_r_bound_ > 0.0)) {
    throw ContractViolation("reference angular velocity bound must be positive");
  }
}

ReferenceSignal ReferenceSignal::named(const std::string& name, double m_bound,
                                       double omega_r_bound) {
  if (name == "tracking_sine") {
    return ReferenceSignal(
        name, [](double t) { return Vec3(std::sin(0.1 * t), -std::cos(0.3 * t), 0.1); }, m_bound,
        omega_r_bound);
  }
  if (name == "zero") {
    return ReferenceSignal(name, [](double) { return Vec3::Zero().eval(); }, m_bound,
                           omega_r_bound);
  }
  throw ContractViolation("unknown reference signal '" + name + "'");
}

std::vector<std::string> ReferenceSignal::registry_names() { return {"tracking_sine", "zero"}; }

Vec3 ReferenceSignal::z(double t) const {
  const Vec3 v = z_(t);
  if (v.norm() > m_bound_ + 1e-12) {
    std::ostringstream os;
    os << "reference '" << name_ << "': ||z(" << t << ")|| = " << v.norm() << " exceeds m = "
       << m_bound_;
    throw ReferenceBoundError(os.str(), t);
  }
  return v;
}

void ReferenceSignal::check_omega_r(const Vec3& omega_r, double t) const {
  if (omega_r.norm() > omega_r_bound_) {
    std::ostringstream os;
    os << "reference '" << name_ << "': ||omega_r(" << t << ")|| = " << omega_r.norm()
       << " exceeds the declared bound " << omega_r_bound_;
    throw ReferenceBoundError(os.str(), t);
  }
}

Tangent ref_flow(const RefState& s, const Vec3& z, double m_bound, double t) {
  if (z.norm() > m_bound + 1e-12) {
    std::ostringstream os;
    os << "||z|| = " << z.norm() << " exceeds m = " << m_bound << " at t = " << t;
    throw ReferenceBoundError(os.str(), t);
  }
  Tangent d;
  d.dR = s.Rr.matrix() * skew(s.omega_r);
  d.domega = z;
  return d;
}

ErrorState error_from(const BodyState& body, const RefState& ref) {
  ErrorState e;
  e.Re = ref.Rr.transpose() * body.R;
  e.omega_e = body.omega - e.Re.transpose() * ref.omega_r;
  return e;
}

BodyState body_from(const ErrorState& e, const RefState& ref) {
  BodyState b;
  b.R = ref.Rr * e.Re;
  b.omega = e.omega_e + e.Re.transpose() * ref.omega_r;
  return b;
}

Vec3 upsilon(const Rotation& re, const Vec3& omega_r, const Vec3& z, const Inertia& j) {
  const Vec3 w = re.transpose() * omega_r;
  return j.matrix() * (re.transpose() * z) + w.cross(j.matrix() * w);
}

Mat3 sigma(const Rotation& re, const Vec3& omega_e, const Vec3& omega_r, const Inertia& j) {
  const Mat3& jm = j.matrix();
  const Vec3 w = re.transpose() * omega_r;
  const Mat3 wx = skew(w);
  return skew(jm * omega_e) + skew(jm * w) - (wx * jm + jm * wx);
}

Tangent error_flow(const ErrorState& e, const Vec3& omega_r, const Vec3& z, const Vec3& tau,
                   const Inertia& j) {
  Tangent d;
  d.dR = e.Re.matrix() * skew(e.omega_e);
  d.domega = j.inverse() * (sigma(e.Re, e.omega_e, omega_r, j) * e.omega_e -
                            upsilon(e.Re, omega_r, z, j) + tau);
  return d;
}

NoiseModel::NoiseModel(NoiseParams params, std::uint64_t seed) : params_(params), rng_(seed) {
  if (!(params_.sigma_R >= 0.0) || !(params_.sigma_w >= 0.0)) {
    throw ContractViolation("noise standard deviations must be nonnegative");
  }
}

void NoiseModel::draw() {
  n_r_ = params_.sigma_R > 0.0 ? random_gaussian_vec3(rng_, params_.sigma_R) : Vec3::Zero();
  n_w_ = params_.sigma_w > 0.0 ? random_gaussian_vec3(rng_, params_.sigma_w) : Vec3::Zero();
}

Measurement NoiseModel::measure(const BodyState& body) const {
  return {body.R * exp_so3(n_r_), body.omega + n_w_};
}

Measurement apply_noise(const BodyState& body, double sigma_R, double sigma_w,
                        std::uint64_t rng_seed) {
  NoiseModel m({sigma_R, sigma_w}, rng_seed);
  m.draw();
  return m.measure(body);
}

}  // namespace hyso3
