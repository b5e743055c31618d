#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>

#include "probewarp/errors.hpp"

namespace probewarp {

// Proper rigid motion: x -> R x + t with R^T R = I, det R = +1.
struct RigidTransform {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return R * p + t; }

  RigidTransform inverse() const {
    RigidTransform inv;
    inv.R = R.transpose();
    inv.t = -(inv.R * t);
    return inv;
  }
};

// Unconstrained 3x4 affine [A | t]; the linear block is only rotation-like.
struct Affine3x4 {
  Eigen::Matrix<double, 3, 4> m = identity_matrix();

  static Eigen::Matrix<double, 3, 4> identity_matrix() {
    Eigen::Matrix<double, 3, 4> m;
    m << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
    return m;
  }

  static Affine3x4 identity() { return {}; }

  static Affine3x4 from_rigid(const RigidTransform& T) {
    Affine3x4 a;
    a.m.leftCols<3>() = T.R;
    a.m.col(3) = T.t;
    return a;
  }

  Eigen::Matrix3d linear() const { return m.leftCols<3>(); }
  Eigen::Vector3d translation() const { return m.col(3); }
};

// Frobenius distance of R^T R from the identity.
inline double rotation_deviation(const Eigen::Matrix3d& R) {
  return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
}

inline bool is_rotation(const Eigen::Matrix3d& R, double tol = 1e-9) {
  return rotation_deviation(R) < tol && R.determinant() > 0.0;
}

// Rotation angle in radians, in [0, pi].
inline double rotation_angle(const Eigen::Matrix3d& R) {
  const double c = std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

// Entrywise blend toward an anchor: anchor + alpha * (raw - anchor). The
// default anchor is the 3x4 identity affine.
inline Affine3x4 damp(const Affine3x4& raw, double alpha = 0.05,
                      const Affine3x4& anchor = Affine3x4::identity()) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("damp: alpha must be in [0, 1]");
  Affine3x4 out;
  out.m = anchor.m + alpha * (raw.m - anchor.m);
  return out;
}

// Projects the 3x3 block onto the nearest proper rotation (Frobenius norm)
// via SVD; the translation column passes through unchanged.
inline RigidTransform reorthogonalize(const Affine3x4& M) {
  const Eigen::Matrix3d A = M.linear();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  if (!(sigma(0) > 0.0) || sigma(2) <= sigma(0) * 1e-14)
    throw DegenerateError("reorthogonalize: 3x3 block is singular");
  const double sign =
      (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform out;
  out.R = svd.matrixU() * Eigen::Vector3d(1.0, 1.0, sign).asDiagonal() *
          svd.matrixV().transpose();
  out.t = M.translation();
  return out;
}

// Caps the rotation angle (about the same axis) and the translation norm.
// A motion already within bounds is returned untouched.
inline RigidTransform clamp_motion(const RigidTransform& T, double max_angle, double max_trans) {
  if (!(max_angle > 0.0) || !(max_trans > 0.0))
    throw ArgumentError("clamp_motion: bounds must be > 0");
  RigidTransform out = T;
  const Eigen::AngleAxisd aa(T.R);
  if (aa.angle() > max_angle)
    out.R = Eigen::AngleAxisd(max_angle, aa.axis()).toRotationMatrix();
  const double n = T.t.norm();
  if (n > max_trans) out.t = T.t * (max_trans / n);
  return out;
}

}  // namespace probewarp
