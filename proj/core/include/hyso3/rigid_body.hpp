#pragma once

#include "hyso3/so3.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace hyso3 {

/// Symmetric positive definite inertia matrix [kg m^2].
class Inertia {
 public:
  explicit Inertia(const Mat3& j);
  static Inertia diagonal(const Vec3& d) { return Inertia(d.asDiagonal().toDenseMatrix()); }

  const Mat3& matrix() const { return j_; }
  const Mat3& inverse() const { return j_inv_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

 private:
  Mat3 j_;
  Mat3 j_inv_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

struct BodyState {
  Rotation R;
  Vec3 omega = Vec3::Zero();
};

struct RefState {
  Rotation Rr;
  Vec3 omega_r = Vec3::Zero();
};

struct ErrorState {
  Rotation Re;
  Vec3 omega_e = Vec3::Zero();
};

/// Ambient-space time derivative (dR/dt as a 3x3 matrix, d omega/dt).
struct Tangent {
  Mat3 dR = Mat3::Zero();
  Vec3 domega = Vec3::Zero();
};

/// dR/dt = R omega^x,  J domega/dt = -omega x J omega + tau
Tangent body_flow(const BodyState& s, const Vec3& tau, const Inertia& j);

/// Raised when the reference selection leaves its declared bounds.
class ReferenceBoundError : public std::runtime_error {
 public:
  ReferenceBoundError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
  double time;
};

/**
 * Reference angular acceleration z(t) with its declared bound m.
 *
 * The differential inclusion z in mB is realized by a concrete selection from
 * a named registry; ||z(t)|| <= m is checked on every evaluation.
 */
class ReferenceSignal {
 public:
  ReferenceSignal(std::string name, std::function<Vec3(double)> z, double m_bound,
                  double omega_r_bound);

  /// Registry lookup: "tracking_sine" -> [sin(0.1t), -cos(0.3t), 0.1], "zero" -> 0.
  static ReferenceSignal named(const std::string& name, double m_bound, double omega_r_bound);
  static std::vector<std::string> registry_names();

  /// Throws ReferenceBoundError if ||z(t)|| > m.
  Vec3 z(double t) const;
  const std::string& name() const { return name_; }
  double m_bound() const { return m_bound_; }
  double omega_r_bound() const { return omega_r_bound_; }

  /// Throws ReferenceBoundError if ||omega_r|| exceeds the declared bound.
  void check_omega_r(const Vec3& omega_r, double t) const;

 private:
  std::string name_;
  std::function<Vec3(double)> z_;
  double m_bound_;
  double omega_r_bound_;
};

/// dRr/dt = Rr omega_r^x, domega_r/dt = z with ||z|| <= m_bound.
Tangent ref_flow(const RefState& s, const Vec3& z, double m_bound, double t = 0.0);

/// Re = Rr^T R, omega_e = omega - Re^T omega_r
ErrorState error_from(const BodyState& body, const RefState& ref);

/// Inverse of error_from.
BodyState body_from(const ErrorState& e, const RefState& ref);

/// J Re^T z + (Re^T omega_r) x J Re^T omega_r
Vec3 upsilon(const Rotation& re, const Vec3& omega_r, const Vec3& z, const Inertia& j);

/// (J omega_e)^x + (J Re^T omega_r)^x - ((Re^T omega_r)^x J + J (Re^T omega_r)^x); skew-symmetric.
Mat3 sigma(const Rotation& re, const Vec3& omega_e, const Vec3& omega_r, const Inertia& j);

/// dRe/dt = Re omega_e^x,  J domega_e/dt = Sigma omega_e - Upsilon + tau
Tangent error_flow(const ErrorState& e, const Vec3& omega_r, const Vec3& z, const Vec3& tau,
                   const Inertia& j);

struct NoiseParams {
  double sigma_R = 0.0;  // standard deviation per component of n_R [rad]
  double sigma_w = 0.0;  // standard deviation per component of n_omega [rad/s]
};

struct Measurement {
  Rotation Ry;
  Vec3 omega_y = Vec3::Zero();
};

/**
 * Gaussian measurement noise R_y = R exp(n_R), omega_y = omega + n_omega.
 *
 * Owns its random stream; the same seed reproduces the same sequence.
 */
class NoiseModel {
 public:
  NoiseModel(NoiseParams params, std::uint64_t seed);

  /// Draws a fresh (n_R, n_omega) pair.
  void draw();
  const Vec3& n_R() const { return n_r_; }
  const Vec3& n_omega() const { return n_w_; }
  bool enabled() const { return params_.sigma_R > 0.0 || params_.sigma_w > 0.0; }

  /// Applies the most recently drawn pair.
  Measurement measure(const BodyState& body) const;

 private:
  NoiseParams params_;
  std::mt19937_64 rng_;
  Vec3 n_r_ = Vec3::Zero();
  Vec3 n_w_ = Vec3::Zero();
};

/// One-shot helper: a single noisy measurement from a freshly seeded stream.
Measurement apply_noise(const BodyState& body, double sigma_R, double sigma_w,
                        std::uint64_t rng_seed);

}  // namespace hyso3
