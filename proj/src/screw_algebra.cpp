#include "screwbuild/screw_algebra.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>

#include "screwbuild/error.hpp"

namespace screwbuild {

Quaterniond Pose::quaternion() const {
  Quaterniond q(rotation_);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

Matrix4d Pose::matrix() const {
  Matrix4d m = Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

bool Pose::is_valid(double tol) const {
  if (!rotation_.allFinite() || !translation_.allFinite()) return false;
  const double orth = (rotation_.transpose() * rotation_ - Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return orth <= tol && std::abs(rotation_.determinant() - 1.0) <= tol;
}

Matrix3d skew(const Vector3d& v) {
  Matrix3d s;
  // clang-format off
  s <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Matrix3d rodrigues(const Vector3d& unit_axis, double angle) {
  const Matrix3d k = skew(unit_axis);
  return Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

AxisAngle axis_angle(const Matrix3d& r) {
  // v = sin(θ) ω from the skew part, cos(θ) from the trace.
  const Vector3d v = 0.5 * Vector3d(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double c = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  const double s = v.norm();
  AxisAngle out;
  out.angle = std::atan2(s, c);
  if (s == 0.0 && c > 0.0) return out;
  if (c >= 0.0) {
    out.axis = v / s;
    return out;
  }
  // Past π/2 the symmetric part is better conditioned: (R + Rᵀ)/2 - cI = (1 - c) ωωᵀ.
  const Matrix3d sym = 0.5 * (r + r.transpose()) - c * Matrix3d::Identity();
  Eigen::Index k = 0;
  sym.diagonal().maxCoeff(&k);
  Vector3d axis = sym.col(k) / std::sqrt(std::max(sym(k, k), 1e-300));
  if (axis.dot(v) < 0.0) axis = -axis;
  out.axis = axis.normalized();
  return out;
}

Pose compose(const Pose& a, const Pose& b) {
  Quaterniond q(a.rotation() * b.rotation());
  q.normalize();
  return {q.toRotationMatrix(), a.rotation() * b.translation() + a.translation()};
}

Pose inverse(const Pose& a) {
  const Matrix3d rt = a.rotation().transpose();
  return {rt, -rt * a.translation()};
}

ScrewDisplacement screw_from_pose(const Pose& pose) {
  const AxisAngle aa = axis_angle(pose.rotation());
  const Vector3d& p = pose.translation();
  ScrewDisplacement screw;
  if (aa.angle < kIdentityRotationAngle) {
    const double distance = p.norm();
    if (distance == 0.0) return screw;  // canonical zero screw
    screw.axis = p / distance;
    screw.pitch = kInfinitePitch;
    screw.magnitude = distance;
    return screw;
  }
  const Vector3d& w = aa.axis;
  const double theta = aa.angle;
  // υ = [(I - e^{ω̂θ}) ω̂ + θ ω ωᵀ]⁻¹ p
  const Matrix3d a = (Matrix3d::Identity() - rodrigues(w, theta)) * skew(w) + theta * w * w.transpose();
  Eigen::FullPivLU<Matrix3d> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw Error(ErrorCode::kDegenerate, "screw extraction system is singular");
  const Vector3d upsilon = lu.solve(p);
  screw.axis = w;
  screw.pitch = w.dot(upsilon);
  screw.moment = upsilon - screw.pitch * w;
  screw.magnitude = theta;
  return screw;
}

UnitTwist unit_twist(const ScrewDisplacement& screw) {
  if (screw.infinite_pitch()) return {screw.axis, Vector3d::Zero()};
  return {screw.moment + screw.pitch * screw.axis, screw.axis};
}

Pose exp_screw(const UnitTwist& xi, double theta) {
  if (theta == 0.0) return Pose::identity();
  const double wnorm = xi.angular.norm();
  if (wnorm < 1e-12) return Pose::from_translation(xi.linear * theta);
  const Vector3d w = xi.angular / wnorm;
  const Vector3d v = xi.linear / wnorm;
  const double angle = theta * wnorm;
  const Matrix3d k = skew(w);
  const Matrix3d g = angle * Matrix3d::Identity() + (1.0 - std::cos(angle)) * k + (angle - std::sin(angle)) * k * k;
  return {rodrigues(w, angle), g * v};
}

TwistLog log_pose(const Pose& pose) {
  const ScrewDisplacement screw = screw_from_pose(pose);
  return {unit_twist(screw), screw.magnitude};
}

Pose exp_twist(const Vector6d& twist) {
  const double angle = twist.tail<3>().norm();
  if (angle < 1e-12) return Pose::from_translation(twist.head<3>());
  return exp_screw(UnitTwist::from_coordinates(twist / angle), angle);
}

Vector6d log_twist(const Pose& pose) { return log_pose(pose).scaled(); }

Pose sclerp(const Pose& initial, const Pose& final_pose, double tau) {
  if (tau == 0.0) return initial;
  if (tau == 1.0) return final_pose;
  const TwistLog rel = log_pose(compose(final_pose, inverse(initial)));
  return compose(exp_screw(rel.twist, tau * rel.magnitude), initial);
}

PoseError pose_error(const Pose& a, const Pose& b) {
  return {axis_angle(a.rotation().transpose() * b.rotation()).angle,
          (a.translation() - b.translation()).norm()};
}

Matrix6d adjoint(const Pose& pose) {
  Matrix6d ad = Matrix6d::Zero();
  const Matrix3d& r = pose.rotation();
  ad.topLeftCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = skew(pose.translation()) * r;
  ad.bottomRightCorner<3, 3>() = r;
  return ad;
}

}  // namespace screwbuild
