#pragma once

#include "hyso3/so3.hpp"

#include <random>

namespace hyso3 {

/// Haar-uniform rotation from a normalized Gaussian quaternion.
template <class Engine>
Rotation random_rotation(Engine& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
       2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
       2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return Rotation::project(m);
}

template <class Engine>
Vec3 random_unit_vector(Engine& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

template <class Engine>
Vec3 random_gaussian_vec3(Engine& rng, double stddev) {
  std::normal_distribution<double> n(0.0, stddev);
  const double a = n(rng);
  const double b = n(rng);
  const double c = n(rng);
  return Vec3(a, b, c);
}

}  // namespace hyso3
