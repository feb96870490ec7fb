#include "sbeam/rotation.hpp"

#include <cmath>

namespace sbeam {

Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& w) {
  Eigen::Matrix3d k;
  k << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return k;
}

Eigen::Matrix3d rotation_matrix(const Eigen::Vector3d& w, double t) {
  const double rate = w.norm();
  const double angle = rate * t;
  if (rate == 0.0 || angle == 0.0) return Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d k = cross_matrix(w / rate);
  const double half = std::sin(0.5 * angle);
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (2.0 * half * half) * (k * k);
}

TransverseRotation TransverseRotation::from_vector(double wx, double wy) {
  TransverseRotation r;
  const double angle = std::sqrt(wx * wx + wy * wy);
  if (angle == 0.0) return r;
  r.kx = wx / angle;
  r.ky = wy / angle;
  r.cos_angle = std::cos(angle);
  r.sin_angle = std::sin(angle);
  const double half = std::sin(0.5 * angle);
  r.one_minus_cos = 2.0 * half * half;
  return r;
}

}  // namespace sbeam
