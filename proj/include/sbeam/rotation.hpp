#pragma once

#include <Eigen/Dense>

namespace sbeam {

// [w]_x such that cross_matrix(w) * v == w.cross(v)
Eigen::Matrix3d cross_matrix(const Eigen::Vector3d& w);

// exp(t [w]_x) via the Rodrigues formula; exactly orthogonal up to rounding.
Eigen::Matrix3d rotation_matrix(const Eigen::Vector3d& w, double t);

// Rotation about an axis in the x-y plane. The component formulas are written
// so that a quarter turn of the axis about z commutes with the rotation
// bit-for-bit, which the dynamics relies on.
struct TransverseRotation {
  double kx = 1.0;
  double ky = 0.0;
  double cos_angle = 1.0;
  double sin_angle = 0.0;
  double one_minus_cos = 0.0;

  // generator (wx, wy, 0) applied for unit time
  static TransverseRotation from_vector(double wx, double wy);

  void apply(double& x, double& y, double& z) const {
    const double cx = ky * z;
    const double cy = -(kx * z);
    const double cz = kx * y - ky * x;
    const double kv = kx * x + ky * y;
    const double nx = x * cos_angle + cx * sin_angle + kx * kv * one_minus_cos;
    const double ny = y * cos_angle + cy * sin_angle + ky * kv * one_minus_cos;
    const double nz = z * cos_angle + cz * sin_angle;
    x = nx;
    y = ny;
    z = nz;
  }
};

}  // namespace sbeam
