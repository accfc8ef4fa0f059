#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>

namespace screwbuild {

using Eigen::Matrix3d;
using Eigen::Matrix4d;
using Eigen::Quaterniond;
using Eigen::Vector3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Rotations whose angle is below this are treated as the identity when
// extracting screw parameters.
inline constexpr double kIdentityRotationAngle = 1e-8;

inline constexpr double kInfinitePitch = std::numeric_limits<double>::infinity();

/// Rigid transform (R, p) in SE(3). Maps a point x to R x + p.
class Pose {
 public:
  Pose() : rotation_(Matrix3d::Identity()), translation_(Vector3d::Zero()) {}
  Pose(const Matrix3d& rotation, const Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose identity() { return {}; }
  static Pose from_translation(const Vector3d& p) { return {Matrix3d::Identity(), p}; }
  static Pose from_rotation(const Matrix3d& r) { return {r, Vector3d::Zero()}; }
  /// The quaternion is normalized before use.
  static Pose from_quaternion(const Quaterniond& q, const Vector3d& p) {
    return {q.normalized().toRotationMatrix(), p};
  }
  static Pose from_matrix(const Matrix4d& m) {
    return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  }

  const Matrix3d& rotation() const { return rotation_; }
  const Vector3d& translation() const { return translation_; }

  /// Unit quaternion on the w >= 0 hemisphere.
  Quaterniond quaternion() const;
  Matrix4d matrix() const;
  Vector3d apply(const Vector3d& x) const { return rotation_ * x + translation_; }

  /// Rᵀ R = I and det R = +1 within `tol`, all entries finite.
  bool is_valid(double tol = 1e-9) const;

 private:
  Matrix3d rotation_;
  Vector3d translation_;
};

/// Plücker screw (ω, m), pitch h and magnitude θ. For pure translation the
/// pitch is kInfinitePitch, m = 0 and θ is a distance in meters.
struct ScrewDisplacement {
  Vector3d axis = Vector3d::UnitZ();
  Vector3d moment = Vector3d::Zero();
  double pitch = 0.0;
  double magnitude = 0.0;

  bool infinite_pitch() const { return pitch == kInfinitePitch; }
};

/// Unit twist ξ = [linear; angular]. Linear-first stacking is used for every
/// 6-vector in this library (twists, spatial velocities, Jacobian rows).
struct UnitTwist {
  Vector3d linear = Vector3d::Zero();
  Vector3d angular = Vector3d::UnitZ();

  Vector6d coordinates() const {
    Vector6d xi;
    xi << linear, angular;
    return xi;
  }
  static UnitTwist from_coordinates(const Vector6d& xi) {
    return {xi.head<3>(), xi.tail<3>()};
  }
};

struct TwistLog {
  UnitTwist twist;
  double magnitude = 0.0;

  Vector6d scaled() const { return twist.coordinates() * magnitude; }
};

struct PoseError {
  double rotation = 0.0;     // radians
  double translation = 0.0;  // meters
};

struct AxisAngle {
  Vector3d axis = Vector3d::UnitZ();
  double angle = 0.0;  // in [0, π]
};

Matrix3d skew(const Vector3d& v);
Matrix3d rodrigues(const Vector3d& unit_axis, double angle);
/// Axis-angle of a rotation matrix; stable near 0 and near π.
AxisAngle axis_angle(const Matrix3d& rotation);

/// `a` applied after `b`: x ↦ R_a (R_b x + p_b) + p_a.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& a);

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

ScrewDisplacement screw_from_pose(const Pose& pose);
UnitTwist unit_twist(const ScrewDisplacement& screw);
Pose exp_screw(const UnitTwist& xi, double theta);
TwistLog log_pose(const Pose& pose);

/// Exponential of an arbitrary (not necessarily unit) twist ξθ.
Pose exp_twist(const Vector6d& twist);
/// ξθ such that exp_twist(ξθ) = pose, with θ in [0, π] for the rotation part.
Vector6d log_twist(const Pose& pose);

/// e^{ξ̂τθ} Gi with ξ̂θ = log(Gf Gi⁻¹).
Pose sclerp(const Pose& initial, const Pose& final_pose, double tau);

PoseError pose_error(const Pose& a, const Pose& b);

/// 6×6 adjoint for linear-first twists: [v; ω] ↦ [R v + p × R ω; R ω].
Matrix6d adjoint(const Pose& pose);

}  // namespace screwbuild
