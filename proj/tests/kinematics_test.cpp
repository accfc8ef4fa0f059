#include <gtest/gtest.h>

#include "screwbuild/error.hpp"
#include "screwbuild/kinematics.hpp"
#include "screwbuild/planner.hpp"
#include "test_support.hpp"

using namespace screwbuild;
using namespace screwbuild::testing;

namespace {

double max_abs_diff(const Pose& a, const Pose& b) { return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff(); }

// Central difference of FK expressed as a spatial twist.
SpatialJacobian numeric_jacobian(const RobotModel& m, const JointVector& q, double h) {
  SpatialJacobian j;
  const Pose f0 = forward_kinematics(m, q);
  for (int i = 0; i < kNumJoints; ++i) {
    JointVector qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    j.col(i) = (oracle_log(forward_kinematics(m, qp) * inverse(f0)) - oracle_log(forward_kinematics(m, qm) * inverse(f0))) /
               (2 * h);
  }
  return j;
}

// Planar 2R arm (links l1, l2 in the xy-plane) followed by five wrist joints
// at the tip.
RobotModel planar_arm(double l1, double l2) {
  RobotModel m;
  m.name = "planar";
  auto revolute = [](const Vector3d& w, const Vector3d& r) { return UnitTwist{-w.cross(r), w}; };
  const Vector3d tip(l1 + l2, 0, 0);
  m.joint_twists = {revolute(Vector3d::UnitZ(), Vector3d::Zero()), revolute(Vector3d::UnitZ(), Vector3d(l1, 0, 0)),
                    revolute(Vector3d::UnitX(), tip), revolute(Vector3d::UnitY(), tip),
                    revolute(Vector3d::UnitZ(), tip), revolute(Vector3d::UnitX(), tip),
                    revolute(Vector3d::UnitY(), tip)};
  m.home_pose = Pose::from_translation(tip);
  for (auto& l : m.limits) l = {-3.0, 3.0};
  m.shoulder = {0, Vector3d::Zero()};
  m.elbow = {2, Vector3d(l1, 0, 0)};
  m.wrist = {3, tip};
  m.validate();
  return m;
}

}  // namespace

TEST(ForwardKinematics, ZeroConfiguration) {
  RobotModel m = panda();
  std::mt19937_64 rng(41);
  m.base_pose = random_pose(rng);
  EXPECT_LT(max_abs_diff(forward_kinematics(m, JointVector::Zero()), m.base_pose * m.home_pose), 1e-15);
}

TEST(ForwardKinematics, FirstJointRotatesAboutItsAxis) {
  const RobotModel& m = panda();
  JointVector q = JointVector::Zero();
  q(0) = 0.6;
  const Pose expected = Pose::from_rotation(rot_z(0.6)) * forward_kinematics(m, JointVector::Zero());
  EXPECT_LT(max_abs_diff(forward_kinematics(m, q), expected), 1e-14);
}

TEST(ForwardKinematics, AgreesWithDenavitHartenbergChain) {
  std::mt19937_64 rng(42);
  for (int n = 0; n < 500; ++n) {
    const JointVector q = random_config(rng, panda(), 0.0);
    EXPECT_LT(max_abs_diff(forward_kinematics(panda(), q), dh_fk(q)), 1e-9);
  }
}

TEST(SpatialJacobian, ZeroConfigurationColumnsAreJointTwists) {
  const SpatialJacobian j = spatial_jacobian(panda(), JointVector::Zero());
  for (int i = 0; i < kNumJoints; ++i) EXPECT_EQ(j.col(i), panda().joint_twists[static_cast<std::size_t>(i)].coordinates());
}

TEST(SpatialJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(43);
  for (int n = 0; n < 100; ++n) {
    const JointVector q = random_config(rng, panda(), 0.0);
    EXPECT_LT((spatial_jacobian(panda(), q) - numeric_jacobian(panda(), q, 1e-6)).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(SpatialJacobian, PlanarTwoLinkSubchain) {
  const double l1 = 0.4, l2 = 0.3;
  const RobotModel m = planar_arm(l1, l2);
  JointVector q = JointVector::Zero();
  q(0) = 0.5;
  q(1) = -1.1;
  const SpatialJacobian js = spatial_jacobian(m, q);
  const Vector3d tip = forward_kinematics(m, q).translation();
  Eigen::Matrix<double, 2, 2> tip_velocity;
  for (int i = 0; i < 2; ++i) {
    const Vector3d v = js.col(i).head<3>() + js.col(i).tail<3>().cross(tip);
    tip_velocity.col(i) = v.head<2>();
  }
  const double s1 = std::sin(q(0)), c1 = std::cos(q(0)), s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
  Eigen::Matrix<double, 2, 2> textbook;
  textbook << -l1 * s1 - l2 * s12, -l2 * s12, l1 * c1 + l2 * c12, l2 * c12;
  EXPECT_LT((tip_velocity - textbook).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Pseudoinverse, PaddedIdentity) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(6, 7);
  j.leftCols(6).setIdentity();
  const PseudoInverse p = pseudoinverse(j);
  EXPECT_FALSE(p.damped);
  EXPECT_LT((p.matrix.topRows(6) - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(p.matrix.row(6).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Pseudoinverse, RightInverseIdentities) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 100; ++n) {
    Eigen::MatrixXd j(6, 7);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 7; ++c) j(r, c) = u(rng);
    const PseudoInverse p = pseudoinverse(j);
    ASSERT_FALSE(p.damped);
    const Eigen::MatrixXd proj = p.matrix * j;
    EXPECT_LT((j * p.matrix - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((proj * proj - proj).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((j * proj - j).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((proj - proj.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Pseudoinverse, RankDeficientIsDamped) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Random(6, 7);
  j.row(5) = j.row(4);
  const PseudoInverse p = pseudoinverse(j);
  EXPECT_TRUE(p.damped);
  EXPECT_TRUE(p.matrix.allFinite());
  EXPECT_LT(p.min_singular_value, kPinvSigmaThreshold);
}

TEST(SewAngle, ReferencePlaneAndMirror) {
  EXPECT_NEAR(sew_angle(panda(), ready_config()), 0.0, 1e-12);
  JointVector q;
  q << 0.3, -0.5, 0.4, -2.0, 0.2, 1.5, 0.1;
  // Reflection through the xz-plane negates the angles of the vertical joints.
  JointVector mirror = q;
  for (int i : {0, 2, 4, 6}) mirror(i) = -q(i);
  const double psi = sew_angle(panda(), q);
  EXPECT_GT(std::abs(psi), 0.1);
  EXPECT_NEAR(sew_angle(panda(), mirror), -psi, 1e-12);
}

TEST(SewAngle, StraightArmIsSingular) {
  try {
    sew_angle(planar_arm(0.4, 0.3), JointVector::Zero());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSewSingular);
  }
}

TEST(SewJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(45);
  int checked = 0;
  while (checked < 100) {
    const JointVector q = random_config(rng, panda(), 0.1);
    SewJacobian fd;
    try {
      for (int i = 0; i < kNumJoints; ++i) {
        JointVector qp = q, qm = q;
        qp(i) += 1e-6;
        qm(i) -= 1e-6;
        fd(i) = (sew_angle(panda(), qp) - sew_angle(panda(), qm)) / 2e-6;
      }
    } catch (const Error&) {
      continue;
    }
    if (fd.cwiseAbs().maxCoeff() > 1e3) continue;  // straddles the ±π seam
    const SewJacobian j = sew_jacobian(panda(), q);
    EXPECT_LT((j - fd).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_EQ(j(5), 0.0);
    EXPECT_EQ(j(6), 0.0);
    ++checked;
  }
}

TEST(AugmentedJacobian, StackingAndProjections) {
  const JointVector q = ready_config();
  const AugmentedJacobian ja = augmented_jacobian(panda(), q);
  EXPECT_EQ(ja.topRows<6>(), spatial_jacobian(panda(), q));
  EXPECT_LT((ja.row(6) - sew_jacobian(panda(), q)).cwiseAbs().maxCoeff(), 1e-15);

  const Eigen::MatrixXd pinv = pseudoinverse(ja).matrix;
  Eigen::Matrix<double, 7, 1> swing = Eigen::Matrix<double, 7, 1>::Zero();
  swing(6) = 1.0;
  EXPECT_LT((spatial_jacobian(panda(), q) * (pinv * swing)).norm(), 1e-8);
  Eigen::Matrix<double, 7, 1> move;
  move << 0.1, -0.2, 0.05, 0.3, 0.1, -0.1, 0.0;
  EXPECT_LT(std::abs(sew_jacobian(panda(), q) * (pinv * move)), 1e-8);
}

TEST(SelfMotion, EndEffectorDriftPerRadian) {
  JointVector q = ready_config();
  const Pose f0 = forward_kinematics(panda(), q);
  const double psi0 = sew_angle(panda(), q);
  for (int n = 0; n < 500; ++n) q = self_motion_step(panda(), q, 1e-3);
  const PoseError e = pose_error(forward_kinematics(panda(), q), f0);
  const double dpsi = std::abs(sew_angle(panda(), q) - psi0);
  EXPECT_NEAR(dpsi, 0.5, 1e-3);
  EXPECT_LT(e.translation / dpsi, 1e-6);
  EXPECT_LT(e.rotation / dpsi, 1e-6);
}

TEST(LimitStatus, Classification) {
  const RobotModel& m = panda();
  const JointLimit l = m.limits[0];
  JointVector q = ready_config();
  q(0) = 0.5 * (l.lower + l.upper);
  EXPECT_EQ(limit_status(q, m, 0.2, 0.01).joints[0], LimitClass::kWithinInner);
  q(0) = l.upper - 0.5 * (0.2 + 0.01);
  LimitStatus s = limit_status(q, m, 0.2, 0.01);
  EXPECT_EQ(s.joints[0], LimitClass::kBetweenBounds);
  EXPECT_EQ(s.worst, LimitClass::kBetweenBounds);
  q(0) = l.upper;
  EXPECT_EQ(limit_status(q, m, 0.2, 0.01).worst, LimitClass::kOutsideOuter);
}

TEST(LimitStatus, MonotoneTowardLimit) {
  const RobotModel& m = panda();
  JointVector q = ready_config();
  int previous = 0;
  for (double x = 0.0; x <= m.limits[2].upper + 0.1; x += 0.001) {
    q(2) = x;
    const int c = static_cast<int>(limit_status(q, m, 0.2, 0.01).joints[2]);
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(LimitStatus, BadEps) {
  for (auto [in, out] : {std::pair{0.01, 0.2}, std::pair{0.2, 0.0}, std::pair{2.0, 0.01}}) {
    try {
      limit_status(ready_config(), panda(), in, out);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadEps);
    }
  }
}

TEST(RobotModel, ValidationRejectsInvertedLimits) {
  RobotModel m = panda();
  m.limits[3] = {0.5, -0.5};
  EXPECT_THROW(m.validate(), Error);
  m = panda();
  m.elbow.frame = m.wrist.frame;
  EXPECT_THROW(m.validate(), Error);
}
