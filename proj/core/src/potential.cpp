#include "hyso3/potential.hpp"

#include "hyso3/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace hyso3 {

namespace {

constexpr double kPi = std::numbers::pi;

void fix_sign(Eigen::Ref<Vec3> v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void validate_theta_set(const std::vector<double>& theta_set) {
  if (theta_set.empty()) {
    throw ContractViolation("Theta must be nonempty");
  }
  for (double t : theta_set) {
    if (!std::isfinite(t) || t == 0.0 || std::abs(t) > kPi + 1e-15) {
      std::ostringstream os;
      os << "Theta entries must satisfy 0 < |theta| <= pi (got " << t << ")";
      throw ContractViolation(os.str());
    }
  }
}

}  // namespace

double DerivedSpectral::abar_min() const {
  // Abar shares eigenvectors with A; its eigenvalues are (tr A - lambda_i)/2.
  return 0.5 * (eigenvalues.sum() - eigenvalues[2]);
}

double DerivedSpectral::abar_max() const { return 0.5 * (eigenvalues.sum() - eigenvalues[0]); }

double PotentialParams::theta_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double t : theta_set_) m = std::min(m, std::abs(t));
  return m;
}

double PotentialParams::gamma_bound() const { return 4.0 * spectral_.delta_star / (kPi * kPi); }

double PotentialParams::delta_bound() const {
  const double tm = theta_min();
  return (gamma_bound() - gamma_) * tm * tm / 2.0;
}

DerivedSpectral spectral_decomposition(const Mat3& a) {
  if (!a.allFinite()) {
    throw ContractViolation("A has non-finite entries");
  }
  if ((a - a.transpose()).norm() > 1e-12 * std::max(1.0, a.norm())) {
    throw ContractViolation("A must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (a + a.transpose()));
  DerivedSpectral s;
  s.eigenvalues = es.eigenvalues();
  if (s.eigenvalues[0] <= 0.0) {
    throw ContractViolation("A must be positive definite");
  }
  s.eigenvectors = es.eigenvectors();
  for (int i = 0; i < 3; ++i) {
    fix_sign(s.eigenvectors.col(i));
  }
  s.abar = 0.5 * (a.trace() * Mat3::Identity() - a);
  s.aunder = (s.abar * s.abar).trace() * Mat3::Identity() - 2.0 * s.abar * s.abar;
  return s;
}

PotentialParams PotentialParams::with_axis(const Mat3& a, const std::vector<double>& theta_set) {
  validate_theta_set(theta_set);
  DerivedSpectral s = spectral_decomposition(a);
  const double l1 = s.eigenvalues[0];
  const double l2 = s.eigenvalues[1];
  const double l3 = s.eigenvalues[2];
  if (nearly_equal(l2, l3)) {
    throw ContractViolation("A must satisfy lambda2 < lambda3 (axis construction undefined)");
  }

  Vec3 alpha_sq;
  if (nearly_equal(l1, l2)) {
    // Only alpha3 is fixed; the remaining mass goes on v1.
    s.case_id = 1;
    const double a3 = 1.0 - l2 / l3;
    alpha_sq = Vec3(1.0 - a3, 0.0, a3);
    s.delta_star = l1 * (1.0 - l2 / l3);
  } else if (l2 >= l1 * l3 / (l3 - l1)) {
    s.case_id = 2;
    alpha_sq = Vec3(0.0, l2 / (l2 + l3), l3 / (l2 + l3));
    s.delta_star = l1;
  } else {
    s.case_id = 3;
    const double pair_sum = 2.0 * (l1 * l2 + l1 * l3 + l2 * l3);
    alpha_sq = Vec3(1.0 - 4.0 * l2 * l3 / pair_sum, 1.0 - 4.0 * l1 * l3 / pair_sum,
                    1.0 - 4.0 * l1 * l2 / pair_sum);
    s.delta_star = 4.0 * l1 * l2 * l3 / pair_sum;
  }
  s.alpha = alpha_sq.cwiseMax(0.0).cwiseSqrt();

  PotentialParams p;
  p.theta_set_ = theta_set;
  p.a_ = a;
  p.u_ = (s.eigenvectors * s.alpha).normalized();
  p.spectral_ = s;
  return p;
}

void PotentialParams::set_weights(double gamma, double delta) {
  if (!(gamma > 0.0) || !(gamma < gamma_bound())) {
    std::ostringstream os;
    os << "gamma must lie in (0, 4 Delta*/pi^2 = " << gamma_bound() << "), got " << gamma;
    throw ContractViolation(os.str());
  }
  gamma_ = gamma;
  if (!(delta > 0.0) || !(delta < delta_bound())) {
    std::ostringstream os;
    os << "delta must lie in (0, " << delta_bound() << "), got " << delta;
    throw ContractViolation(os.str());
  }
  delta_ = delta;
}

PotentialParams construct_params_absolute(const Mat3& a, const std::vector<double>& theta_set,
                                          double gamma, double delta) {
  PotentialParams p = PotentialParams::with_axis(a, theta_set);
  p.set_weights(gamma, delta);
  return p;
}

PotentialParams construct_params(const Mat3& a, const std::vector<double>& theta_set,
                                 double gamma_frac, double delta_frac) {
  if (!(gamma_frac > 0.0 && gamma_frac < 1.0) || !(delta_frac > 0.0 && delta_frac < 1.0)) {
    throw ContractViolation("gamma_frac and delta_frac must lie in (0, 1)");
  }
  PotentialParams p = PotentialParams::with_axis(a, theta_set);
  const double gamma = gamma_frac * p.gamma_bound();
  const double tm = p.theta_min();
  const double delta = delta_frac * (p.gamma_bound() - gamma) * tm * tm / 2.0;
  p.set_weights(gamma, delta);
  return p;
}

double delta_fn(const Vec3& u, const Vec3& v, const Mat3& a) {
  const Mat3 m = a.trace() * Mat3::Identity() - a -
                 2.0 * v.dot(a * v) * (Mat3::Identity() - v * v.transpose());
  return u.dot(m * u);
}

Rotation transform(const Rotation& r, double theta, const PotentialParams& p) {
  return r * angle_axis(theta, p.u());
}

double potential(const Rotation& r, double theta, const PotentialParams& p) {
  const Rotation t = transform(r, theta, p);
  return (p.A() * (Mat3::Identity() - t.matrix())).trace() + 0.5 * p.gamma() * theta * theta;
}

Vec3 grad_R_psi(const Rotation& r, double theta, const PotentialParams& p) {
  const Rotation ra = angle_axis(theta, p.u());
  const Rotation t = r * ra;
  return ra * psi(p.A() * t.matrix());
}

double grad_theta(const Rotation& r, double theta, const PotentialParams& p) {
  const Rotation t = transform(r, theta, p);
  return p.gamma() * theta + 2.0 * p.u().dot(psi(p.A() * t.matrix()));
}

double mu_U(const Rotation& r, double theta, const PotentialParams& p) {
  double best = std::numeric_limits<double>::infinity();
  for (double tp : p.theta_set()) {
    best = std::min(best, potential(r, tp, p));
  }
  return potential(r, theta, p) - best;
}

Vec3 psi_dot(const Rotation& r, double theta, const Vec3& omega, double v,
             const PotentialParams& p) {
  const Rotation ra = angle_axis(theta, p.u());
  const Mat3 at = p.A() * (r * ra).matrix();
  const Mat3 e = emap(at);
  const Mat3 d_r = ra.matrix() * e * ra.matrix().transpose();
  const Vec3 d_theta = ra.matrix() * e * p.u() - (ra * psi(at)).cross(p.u());
  return d_r * omega + d_theta * v;
}

CriticalPointSet undesired_critical_points(const PotentialParams& p) {
  const DerivedSpectral& s = p.spectral();
  CriticalPointSet out;
  out.non_isolated = nearly_equal(s.eigenvalues[0], s.eigenvalues[1]);
  for (int i = 0; i < 3; ++i) {
    out.points.push_back({angle_axis(kPi, s.eigenvectors.col(i).normalized()), 0.0});
  }
  return out;
}

double alpha_A(const Rotation& t, const Mat3& abar) {
  const AxisAngle aa = axis_angle_of(t);
  const Vec3 ba = abar * aa.axis;
  const double c = aa.axis.dot(ba) / ba.norm();
  return 1.0 - rot_distance_sq(t) * c * c;
}

AssumptionConstants assumption_constants(const PotentialParams& p, int samples,
                                         std::uint64_t seed) {
  const DerivedSpectral& s = p.spectral();
  const double lm = s.abar_min();
  const double lM = s.abar_max();

  AssumptionConstants c;
  c.alpha1 = std::max(7.0 * lM * lM / lm, 6.0 * p.gamma());
  c.c_psi = 2.0 * lM;
  c.c_R = s.abar.norm();
  c.c_theta = c.c_R + 2.0 * lM;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th(-kPi, kPi);
  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int i = 0; i < samples; ++i) {
    const Rotation r = random_rotation(rng);
    const double theta = th(rng);
    if (mu_U(r, theta, p) > p.delta()) continue;
    alphas.push_back(alpha_A(transform(r, theta, p), s.abar));
  }
  if (!alphas.empty()) {
    std::sort(alphas.begin(), alphas.end());
    c.alpha_star_min = alphas.front();
    c.alpha_star_p01 = alphas[alphas.size() / 100];
    c.alpha2_approx = std::min(c.alpha_star_min * lm * lm / (2.0 * lM), p.gamma() / 8.0);
  }
  return c;
}

}  // namespace hyso3
