#pragma once

#include <Eigen/Core>

#include <array>
#include <string>

#include "screwbuild/screw_algebra.hpp"

namespace screwbuild {

inline constexpr int kNumJoints = 7;

using JointVector = Eigen::Matrix<double, kNumJoints, 1>;
using SpatialJacobian = Eigen::Matrix<double, 6, kNumJoints>;
using SewJacobian = Eigen::Matrix<double, 1, kNumJoints>;
using AugmentedJacobian = Eigen::Matrix<double, 7, kNumJoints>;

struct JointLimit {
  double lower = 0.0;
  double upper = 0.0;
};

// A point rigidly attached after joint `frame` (1-based; 0 = fixed to the
// base). `point` is its base-frame position at the zero configuration.
struct SewPoint {
  int frame = 0;
  Vector3d point = Vector3d::Zero();
};

/// Product-of-exponentials description of a 7-joint serial arm.
struct RobotModel {
  std::string name;
  std::array<UnitTwist, kNumJoints> joint_twists;  // base frame, zero configuration
  Pose home_pose;                                  // end effector at q = 0, base frame
  std::array<JointLimit, kNumJoints> limits;
  SewPoint shoulder;
  SewPoint elbow;
  SewPoint wrist;
  Pose base_pose;  // world mount

  /// Throws kInvalidSpec when limits are inverted or SEW frames are not
  /// strictly increasing along the chain.
  void validate() const;
};

Pose forward_kinematics(const RobotModel& model, const JointVector& q);

/// Columns are world-frame joint twists at q, linear-first, so that
/// V_s = [v_s; ω_s] = J_s q̇.
SpatialJacobian spatial_jacobian(const RobotModel& model, const JointVector& q);

inline constexpr double kPinvSigmaThreshold = 1e-4;
inline constexpr double kPinvDamping = 1e-3;

struct PseudoInverse {
  Eigen::MatrixXd matrix;
  bool damped = false;
  double min_singular_value = 0.0;
};

/// J† = Jᵀ(J Jᵀ)⁻¹ for full row rank; damped least squares
/// Jᵀ(J Jᵀ + λ² I)⁻¹ when the smallest singular value drops below
/// kPinvSigmaThreshold.
PseudoInverse pseudoinverse(const Eigen::MatrixXd& j);

struct SewPoints {
  Vector3d shoulder;
  Vector3d elbow;
  Vector3d wrist;
};

SewPoints sew_points(const RobotModel& model, const JointVector& q);

/// Signed elbow angle about the shoulder→wrist axis, measured from the plane
/// spanned by that axis and the base ẑ (base x̂ when the axis is within 1e-6
/// rad of ẑ). Throws kSewSingular at degenerate geometry.
double sew_angle(const RobotModel& model, const JointVector& q);
SewJacobian sew_jacobian(const RobotModel& model, const JointVector& q);
AugmentedJacobian augmented_jacobian(const RobotModel& model, const JointVector& q);

enum class LimitClass { kWithinInner = 0, kBetweenBounds = 1, kOutsideOuter = 2 };

struct LimitStatus {
  std::array<LimitClass, kNumJoints> joints{};
  LimitClass worst = LimitClass::kWithinInner;
};

/// Throws kBadEps unless 0 < eps_out < eps_in < ½ min_i(u_i - ℓ_i).
void check_limit_margins(const RobotModel& model, double eps_in, double eps_out);

LimitStatus limit_status(const JointVector& q, const RobotModel& model, double eps_in, double eps_out);

/// Signed distance of each joint to the inner band (positive inside).
JointVector inner_margins(const JointVector& q, const RobotModel& model, double eps_in);

}  // namespace screwbuild
