#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace hyso3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raised when an operation receives an argument outside its documented domain.
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by log_so3 when the rotation angle is (numerically) pi and the
/// principal logarithm is not unique.
class BranchAmbiguity : public std::domain_error {
 public:
  explicit BranchAmbiguity(const std::string& what) : std::domain_error(what) {}
};

/// Orthonormality drift allowed for a stored rotation: ||R^T R - I||_F.
inline constexpr double kOrthonormalityTol = 1e-9;

/**
 * A 3x3 rotation matrix.
 *
 * Construction through from_matrix() checks the SO(3) invariants; project()
 * maps a nearby matrix onto the group. The stored matrix is never mutated in
 * place, so every Rotation held by value satisfies the invariants.
 */
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Validates ||M^T M - I||_F <= tol and det(M) > 0.
  static Rotation from_matrix(const Mat3& m, double tol = kOrthonormalityTol);

  /// Nearest rotation in the Frobenius sense (polar factor). See project_to_so3.
  static Rotation project(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }
  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_, Unchecked{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// ||R^T R - I||_F
  double orthonormality_error() const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

Mat3 skew(const Vec3& x);

/// Inverse of skew. Throws ContractViolation if ||M + M^T||_F > 1e-12.
Vec3 vee(const Mat3& m);

/// Anti-symmetric projection (A - A^T)/2.
Mat3 pa(const Mat3& a);

/// vee(pa(A)) = 1/2 [a32 - a23, a13 - a31, a21 - a12].
Vec3 psi(const Mat3& a);

/// E(A) = 1/2 (tr(A) I - A^T).
Mat3 emap(const Mat3& a);

/// I + sin(theta) u^x + (1 - cos(theta)) (u^x)^2. The axis must be unit length.
Rotation angle_axis(double theta, const Vec3& axis);

Rotation exp_so3(const Vec3& w);

/// Principal logarithm, ||log R|| in [0, pi). Throws BranchAmbiguity when
/// |R|_I >= 1 - 1e-9.
Vec3 log_so3(const Rotation& r);

/// |R|_I = sqrt(tr(I - R) / 4), in [0, 1].
double rot_distance(const Rotation& r);

/// Squared normalized distance tr(I - R)/4, without the square root.
double rot_distance_sq(const Rotation& r);

/**
 * Polar projection M (M^T M)^{-1/2}.
 *
 * Requires det(M) > 0 and M within Frobenius distance 0.1 of SO(3); anything
 * else is treated as a corrupted state and rejected.
 */
Rotation project_to_so3(const Mat3& m);

/// Rotation axis and angle in [0, pi]. At angle 0 the axis is e3.
struct AxisAngle {
  Vec3 axis;
  double angle;
};
AxisAngle axis_angle_of(const Rotation& r);

}  // namespace hyso3
