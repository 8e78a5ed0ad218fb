#pragma once

#include "hyso3/so3.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace hyso3 {

/// Eigen-structure of the weight matrix A and the quantities derived from it.
struct DerivedSpectral {
  Vec3 eigenvalues;   // ascending
  Mat3 eigenvectors;  // columns, orthonormal, first nonzero component positive
  Mat3 abar;          // (tr(A) I - A)/2
  Mat3 aunder;        // tr(Abar^2) I - 2 Abar^2
  Vec3 alpha;         // coefficients of u in the eigenbasis, nonnegative
  double delta_star = 0.0;
  int case_id = 0;    // which of the three axis constructions fired

  double abar_min() const;
  double abar_max() const;
};

/**
 * Parameters {Theta, A, u, gamma, delta} of the warped trace potential
 *
 *   U(R, theta) = tr(A (I - R Ra(theta, u))) + gamma/2 theta^2.
 *
 * Instances are only created through construct_params() /
 * construct_params_absolute(), which guarantee the gap condition at every
 * undesired critical point.
 */
class PotentialParams {
 public:
  const std::vector<double>& theta_set() const { return theta_set_; }
  const Mat3& A() const { return a_; }
  const Vec3& u() const { return u_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  const DerivedSpectral& spectral() const { return spectral_; }

  /// min over Theta of |theta|
  double theta_min() const;
  /// 4 Delta* / pi^2, the admissible supremum of gamma.
  double gamma_bound() const;
  /// (4 Delta*/pi^2 - gamma) theta_m^2 / 2, the admissible supremum of delta.
  double delta_bound() const;

 private:
  friend PotentialParams construct_params(const Mat3&, const std::vector<double>&, double, double);
  friend PotentialParams construct_params_absolute(const Mat3&, const std::vector<double>&, double,
                                                   double);

  // Axis construction only; gamma and delta are left unset.
  static PotentialParams with_axis(const Mat3& a, const std::vector<double>& theta_set);
  void set_weights(double gamma, double delta);

  std::vector<double> theta_set_;
  Mat3 a_ = Mat3::Identity();
  Vec3 u_ = Vec3::UnitZ();
  double gamma_ = 0.0;
  double delta_ = 0.0;
  DerivedSpectral spectral_;
};

/// Symmetric eigen-decomposition with ascending eigenvalues and sign-fixed
/// eigenvectors. A must be symmetric positive definite.
DerivedSpectral spectral_decomposition(const Mat3& a);

/// Builds params with gamma = gamma_frac * 4Delta*/pi^2 and
/// delta = delta_frac * (4Delta*/pi^2 - gamma) theta_m^2 / 2.
PotentialParams construct_params(const Mat3& a, const std::vector<double>& theta_set,
                                 double gamma_frac, double delta_frac);

/// Same axis construction, but gamma and delta given directly. Throws
/// ContractViolation if either exceeds its admissible bound.
PotentialParams construct_params_absolute(const Mat3& a, const std::vector<double>& theta_set,
                                          double gamma, double delta);

/// Delta(u, v) = u^T (tr(A) I - A - 2 v^T A v (I - v v^T)) u
double delta_fn(const Vec3& u, const Vec3& v, const Mat3& a);

/// T(R, theta) = R Ra(theta, u)
Rotation transform(const Rotation& r, double theta, const PotentialParams& p);

double potential(const Rotation& r, double theta, const PotentialParams& p);

/// psi(R^T grad_R U) = Ra(theta, u) psi(A T)
Vec3 grad_R_psi(const Rotation& r, double theta, const PotentialParams& p);

/// gamma theta + 2 u^T psi(A T)
double grad_theta(const Rotation& r, double theta, const PotentialParams& p);

/// U(R, theta) - min over theta' in Theta of U(R, theta'). May be negative.
double mu_U(const Rotation& r, double theta, const PotentialParams& p);

/// d/dt grad_R_psi along dR/dt = R omega^x, dtheta/dt = v.
Vec3 psi_dot(const Rotation& r, double theta, const Vec3& omega, double v,
             const PotentialParams& p);

struct ExtendedState {
  Rotation R;
  double theta = 0.0;
};

struct CriticalPointSet {
  std::vector<ExtendedState> points;
  /// True when A has a repeated eigenvalue, so the half-turns about the
  /// repeated eigenplane form a continuum and `points` only holds representatives.
  bool non_isolated = false;
};

/// The undesired critical points (Ra(pi, v_i), 0), one per eigenvector column.
CriticalPointSet undesired_critical_points(const PotentialParams& p);

struct AssumptionConstants {
  double alpha1 = 0.0;
  double alpha2_approx = 0.0;
  double alpha_star_min = 0.0;  // sampled min of alpha_A over the flow set
  double alpha_star_p01 = 0.0;  // 1st percentile of the same samples
  double c_psi = 0.0;
  double c_R = 0.0;
  double c_theta = 0.0;
};

/**
 * Closed-form constants of the gradient and rate bounds, plus a sampled
 * estimate of alpha2. The flow-set minimum of alpha_A is not computed
 * exactly; `samples` uniform draws over SO(3) x [-pi, pi] restricted to the
 * flow set stand in for it.
 */
AssumptionConstants assumption_constants(const PotentialParams& p, int samples = 100000,
                                         std::uint64_t seed = 0x5eed);

/// alpha_A(T) = 1 - |T|_I^2 cos^2(angle(a, Abar a)), a the rotation axis of T.
double alpha_A(const Rotation& t, const Mat3& abar);

}  // namespace hyso3
