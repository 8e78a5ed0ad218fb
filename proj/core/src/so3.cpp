#include "hyso3/so3.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hyso3 {

namespace {

constexpr double kSeriesThreshold = 1e-6;

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  if (!m.allFinite()) {
    throw ContractViolation("rotation has non-finite entries");
  }
  const double err = (m.transpose() * m - Mat3::Identity()).norm();
  if (err > tol) {
    std::ostringstream os;
    os << "matrix is not orthonormal: ||R^T R - I||_F = " << err;
    throw ContractViolation(os.str());
  }
  if (m.determinant() <= 0.0) {
    throw ContractViolation("matrix has non-positive determinant");
  }
  return Rotation(m, Unchecked{});
}

Rotation Rotation::project(const Mat3& m) { return project_to_so3(m); }

double Rotation::orthonormality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 skew(const Vec3& x) {
  Mat3 s;
  s << 0.0, -x.z(), x.y(),
       x.z(), 0.0, -x.x(),
       -x.y(), x.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& m) {
  const double asym = (m + m.transpose()).norm();
  if (asym > 1e-12) {
    std::ostringstream os;
    os << "vee: input is not skew-symmetric (||M + M^T||_F = " << asym << ")";
    throw ContractViolation(os.str());
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Mat3 pa(const Mat3& a) { return 0.5 * (a - a.transpose()); }

Vec3 psi(const Mat3& a) {
  return 0.5 * Vec3(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

Mat3 emap(const Mat3& a) { return 0.5 * (a.trace() * Mat3::Identity() - a.transpose()); }

Rotation angle_axis(double theta, const Vec3& axis) {
  if (std::abs(axis.norm() - 1.0) > 1e-12) {
    throw ContractViolation("angle_axis: rotation axis must be a unit vector");
  }
  const Mat3 k = skew(axis);
  const Mat3 r = Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
  return Rotation::from_matrix(r, 1e-9);
}

Rotation exp_so3(const Vec3& w) {
  const double th2 = w.squaredNorm();
  const double th = std::sqrt(th2);
  const Mat3 k = skew(w);
  double a;  // sin(th)/th
  double b;  // (1 - cos(th))/th^2
  if (th < kSeriesThreshold) {
    a = 1.0 - th2 / 6.0;
    b = 0.5 - th2 / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  return Rotation::from_matrix(Mat3::Identity() + a * k + b * k * k, 1e-9);
}

Vec3 log_so3(const Rotation& r) {
  if (rot_distance(r) >= 1.0 - 1e-9) {
    throw BranchAmbiguity("log_so3: rotation angle is pi; principal logarithm is not unique");
  }
  const Mat3& m = r.matrix();
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double th = std::acos(c);
  const Vec3 w(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  if (th < kSeriesThreshold) {
    // th / (2 sin th) ~ 1/2 (1 + th^2/6)
    return 0.5 * (1.0 + th * th / 6.0) * w;
  }
  return (0.5 * th / std::sin(th)) * w;
}

double rot_distance_sq(const Rotation& r) {
  return std::clamp((3.0 - r.matrix().trace()) / 4.0, 0.0, 1.0);
}

double rot_distance(const Rotation& r) { return std::sqrt(rot_distance_sq(r)); }

Rotation project_to_so3(const Mat3& m) {
  if (!m.allFinite()) {
    throw ContractViolation("project_to_so3: non-finite input");
  }
  if (m.determinant() <= 0.0) {
    throw ContractViolation("project_to_so3: input is degenerate or a reflection (det <= 0)");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(m.transpose() * m);
  const Vec3 ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    throw ContractViolation("project_to_so3: input is rank deficient");
  }
  const Mat3& v = es.eigenvectors();
  const Mat3 inv_sqrt = v * ev.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  Mat3 r = m * inv_sqrt;
  const double dist = (m - r).norm();
  if (dist > 0.1) {
    std::ostringstream os;
    os << "project_to_so3: input is " << dist << " away from SO(3) (limit 0.1)";
    throw ContractViolation(os.str());
  }
  // One Newton polish step; brings the result to machine-precision orthonormality.
  r = 0.5 * (r + r.transpose().inverse());
  return Rotation::from_matrix(r, 1e-12);
}

AxisAngle axis_angle_of(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double angle = std::acos(c);
  if (angle < 1e-12) {
    return {Vec3::UnitZ(), 0.0};
  }
  const Vec3 w(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  if (angle < std::numbers::pi - 1e-4) {
    return {w.normalized(), angle};
  }
  // Near a half-turn: (R + R^T)/2 = I + (1 - cos) (a a^T - I), so a a^T can be
  // read off the symmetric part; the antisymmetric part fixes the sign.
  const Mat3 aat = (0.5 * (m + m.transpose()) - c * Mat3::Identity()) / (1.0 - c);
  int k = 0;
  aat.diagonal().maxCoeff(&k);
  Vec3 axis = aat.col(k) / std::sqrt(std::max(aat(k, k), 1e-300));
  axis.normalize();
  if (axis.dot(w) < 0.0) {
    axis = -axis;
  }
  return {axis, angle};
}

}  // namespace hyso3
