#include <gtest/gtest.h>

#include "screwbuild/activity_harness.hpp"
#include "screwbuild/error.hpp"
#include "screwbuild/planner.hpp"
#include "test_support.hpp"

using namespace screwbuild;
using namespace screwbuild::testing;

namespace {

const PlannerConfig kDefaults;

bool within_inner(const JointVector& q) {
  return limit_status(q, panda(), kDefaults.eps_in, kDefaults.eps_out).worst == LimitClass::kWithinInner;
}

double min_margin(const JointVector& q) { return inner_margins(q, panda(), kDefaults.eps_in).minCoeff(); }

// Joint 7 sits 0.5 rad inside its upper limit and the goal turns the hand
// further that way about its own axis.
struct LimitScenario {
  JointVector q0;
  Pose goal;
};

LimitScenario limit_scenario() {
  JointVector q = ready_config();
  q(6) = 2.4;
  return {q, forward_kinematics(panda(), q) * Pose::from_rotation(rot_z(0.6))};
}

void check_trajectory_invariants(const JointTrajectory& t, const JointVector& q0, const PlannerConfig& c) {
  JointVector prev = q0;
  for (const TrajectoryStep& s : t.steps) {
    EXPECT_LE((s.q - prev).cwiseAbs().maxCoeff(), c.max_joint_step + 1e-12);
    EXPECT_NE(limit_status(s.q, panda(), c.eps_in, c.eps_out).worst, LimitClass::kOutsideOuter);
    EXPECT_LT(pose_error(s.end_effector, forward_kinematics(panda(), s.q)).translation, 1e-9);
    prev = s.q;
  }
}

}  // namespace

TEST(Mode1Step, AtGoalIsStationary) {
  const JointVector q = ready_config();
  const Mode1Step s = mode1_step(q, forward_kinematics(panda(), q), panda(), kDefaults);
  EXPECT_LT((s.q - q).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mode1Step, TranslationErrorDecreases) {
  const JointVector q = ready_config();
  const Pose f = forward_kinematics(panda(), q);
  const Pose goal = Pose::from_translation({0, 0.01, 0}) * f;
  const Mode1Step s = mode1_step(q, goal, panda(), kDefaults);
  EXPECT_LT(pose_error(forward_kinematics(panda(), s.q), goal).translation, pose_error(f, goal).translation);
  EXPECT_FALSE(s.singular);
}

TEST(Mode1Step, ZeroGainIsStationary) {
  const JointVector q = ready_config();
  const Pose goal = Pose::from_translation({0.05, 0, 0}) * forward_kinematics(panda(), q);
  PlannerConfig c;
  c.kappa = 0.0;
  EXPECT_EQ(mode1_step(q, goal, panda(), c).q, q);
  c = PlannerConfig{};
  c.delta_t = 0.0;
  EXPECT_EQ(mode1_step(q, goal, panda(), c).q, q);
}

TEST(SewChange, SingleJointRecovers) {
  JointVector q = ready_config();
  q(6) = panda().limits[6].upper - 0.15;
  ASSERT_FALSE(within_inner(q));
  const double d = calculate_sew_change(q, panda(), kDefaults);
  ASSERT_NE(d, 0.0);
  const JointTrajectory frag = mode2_recovery(q, d, panda(), kDefaults);
  ASSERT_EQ(frag.outcome, PlanOutcome::kReached);
  EXPECT_TRUE(within_inner(final_configuration(frag, q)));
  EXPECT_LT(pose_error(frag.steps.back().end_effector, forward_kinematics(panda(), q)).translation, 1e-4);
}

TEST(SewChange, AntagonisticJointsGiveZero) {
  // Joint 3 at its lower inner edge and joint 7 at its upper: the swing moves
  // them together, so either direction pushes one of them further out.
  JointVector q;
  q << -2.2728400479638355, 1.0285498228922889, -2.7973, -1.3973830628732009, -0.33323185091456464,
      0.29380599428454374, 2.7973;
  EXPECT_EQ(calculate_sew_change(q, panda(), kDefaults), 0.0);
  const double before = std::min(inner_margins(q, panda(), kDefaults.eps_in)(2), inner_margins(q, panda(), kDefaults.eps_in)(6));
  for (double dir : {-1.0, 1.0}) {
    const JointVector m = inner_margins(self_motion_step(panda(), q, dir * 0.01), panda(), kDefaults.eps_in);
    EXPECT_LT(std::min(m(2), m(6)), before);
  }
}

TEST(SewChange, InsideInnerBandGivesZero) {
  EXPECT_EQ(calculate_sew_change(ready_config(), panda(), kDefaults), 0.0);
}

TEST(Mode2Recovery, EmptyForZeroChange) {
  EXPECT_TRUE(mode2_recovery(ready_config(), 0.0, panda(), kDefaults).steps.empty());
}

TEST(Mode2Recovery, PosePreservedAndGainScaling) {
  const JointVector q = ready_config();
  const JointTrajectory a = mode2_recovery(q, 0.4, panda(), kDefaults);
  PlannerConfig fast;
  fast.lambda = 2.0;
  const JointTrajectory b = mode2_recovery(q, 0.4, panda(), fast);
  ASSERT_EQ(a.outcome, PlanOutcome::kReached);
  ASSERT_EQ(b.outcome, PlanOutcome::kReached);
  for (const TrajectoryStep& s : a.steps) EXPECT_EQ(s.mode, StepMode::kMode2);
  const PoseError drift = pose_error(a.steps.back().end_effector, forward_kinematics(panda(), q));
  EXPECT_LT(drift.translation, 1e-4);
  EXPECT_LT(drift.rotation, deg(0.1));
  EXPECT_NEAR(sew_angle(panda(), a.steps.back().q) - sew_angle(panda(), q), 0.4, 2 * kDefaults.sew_tolerance);
  EXPECT_LT((a.steps.back().q - b.steps.back().q).cwiseAbs().maxCoeff(), 1e-2);
  const double ratio = static_cast<double>(b.steps.size()) / static_cast<double>(a.steps.size());
  EXPECT_GT(ratio, 0.35);
  EXPECT_LT(ratio, 0.65);
}

TEST(PlanToPose, AlreadyThere) {
  const JointVector q = ready_config();
  const JointTrajectory t = plan_to_pose(q, forward_kinematics(panda(), q), panda(), kDefaults);
  EXPECT_EQ(t.outcome, PlanOutcome::kReached);
  EXPECT_LE(t.steps.size(), 1u);
}

TEST(PlanToPose, TracksGeodesic) {
  std::mt19937_64 rng(51);
  for (int n = 0; n < 10; ++n) {
    const JointVector q0 = random_config(rng, panda(), 0.6);
    JointVector q1 = q0;
    for (int i = 0; i < kNumJoints; ++i) q1(i) += std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
    const Pose start = forward_kinematics(panda(), q0), goal = forward_kinematics(panda(), q1);
    const JointTrajectory t = plan_to_pose(q0, goal, panda(), kDefaults);
    ASSERT_EQ(t.outcome, PlanOutcome::kReached);
    check_trajectory_invariants(t, q0, kDefaults);
    double prev = pose_error(start, goal).translation + pose_error(start, goal).rotation;
    for (const TrajectoryStep& s : t.steps) {
      if (s.mode != StepMode::kMode1) continue;
      const GeodesicDistance d = geodesic_distance(start, goal, s.end_effector);
      EXPECT_LT(d.translation, 1e-3);
      EXPECT_LT(d.rotation, deg(0.5));
      const PoseError e = pose_error(s.end_effector, goal);
      if (t.recoveries == 0) EXPECT_LE(e.translation + e.rotation, prev + 1e-9);
      prev = e.translation + e.rotation;
    }
    const PoseError final_err = pose_error(t.steps.back().end_effector, goal);
    EXPECT_LT(final_err.translation, kDefaults.goal_tol.translation);
    EXPECT_LT(final_err.rotation, kDefaults.goal_tol.rotation);
  }
}

TEST(PlanToPose, RecoveryReachesWhereBaselineFails) {
  const LimitScenario s = limit_scenario();
  const JointTrajectory ours = plan_to_pose(s.q0, s.goal, panda(), kDefaults);
  PlannerConfig baseline;
  baseline.mode2_enabled = false;
  const JointTrajectory base = plan_to_pose(s.q0, s.goal, panda(), baseline);
  EXPECT_EQ(ours.outcome, PlanOutcome::kReached);
  EXPECT_GT(ours.recoveries, 0);
  EXPECT_EQ(base.outcome, PlanOutcome::kMotionPlanFailed);
  check_trajectory_invariants(ours, s.q0, kDefaults);
  check_trajectory_invariants(base, s.q0, baseline);

  // Every swing keeps the hand in place.
  JointVector before = s.q0;
  for (std::size_t k = 0; k < ours.steps.size(); ++k) {
    if (ours.steps[k].mode == StepMode::kMode2 && (k == 0 || ours.steps[k - 1].mode == StepMode::kMode1)) {
      const Pose start = forward_kinematics(panda(), before);
      std::size_t e = k;
      while (e + 1 < ours.steps.size() && ours.steps[e + 1].mode == StepMode::kMode2) ++e;
      const PoseError drift = pose_error(ours.steps[e].end_effector, start);
      EXPECT_LT(drift.translation, 1e-4);
      EXPECT_LT(drift.rotation, deg(0.1));
    }
    before = ours.steps[k].q;
  }
}

TEST(PlanToPose, Deterministic) {
  const LimitScenario s = limit_scenario();
  const JointTrajectory a = plan_to_pose(s.q0, s.goal, panda(), kDefaults);
  const JointTrajectory b = plan_to_pose(s.q0, s.goal, panda(), kDefaults);
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (std::size_t k = 0; k < a.steps.size(); ++k) EXPECT_EQ(a.steps[k].q, b.steps[k].q);
}

TEST(PlanToPose, StepBudget) {
  PlannerConfig c;
  c.max_steps = 3;
  const JointVector q = ready_config();
  const JointTrajectory t =
      plan_to_pose(q, Pose::from_translation({0.1, 0, 0}) * forward_kinematics(panda(), q), panda(), c);
  EXPECT_EQ(t.outcome, PlanOutcome::kStepBudgetExhausted);
}

TEST(PlanThroughGuidingPoses, CurrentPoseOnly) {
  const JointVector q = ready_config();
  const JointTrajectory t = plan_through_guiding_poses(q, {forward_kinematics(panda(), q)}, panda(), kDefaults);
  EXPECT_EQ(t.outcome, PlanOutcome::kReached);
  EXPECT_LE(t.steps.size(), 1u);
}

TEST(PlanThroughGuidingPoses, VerticalLiftStaysOnLine) {
  const JointVector q = ready_config();
  const Pose f = forward_kinematics(panda(), q);
  const JointTrajectory t =
      plan_through_guiding_poses(q, {f, Pose::from_translation({0, 0, 0.1}) * f}, panda(), kDefaults);
  ASSERT_EQ(t.outcome, PlanOutcome::kReached);
  for (const TrajectoryStep& s : t.steps)
    EXPECT_LT((s.end_effector.translation() - f.translation()).head<2>().norm(), 1e-3);
}

TEST(PlanThroughGuidingPoses, TransferredPickPlace) {
  const ActivitySpec spec = load_activity_spec(data_path("activities/wall_straight_12.json"));
  const GoalSequence goals = generate_goals(spec.layout);
  const std::vector<Pose> picks = spec.pick_station.poses(1);
  std::vector<Pose> guiding = transfer_constraints(spec.demo_model, {picks[0], goals[0].pose});
  ASSERT_EQ(guiding.size(), 4u);
  for (Pose& g : guiding) g = g * spec.grasp_offset;
  const JointTrajectory t = plan_through_guiding_poses(spec.q_start, guiding, spec.robot, spec.planner_config);
  ASSERT_EQ(t.outcome, PlanOutcome::kReached);
  ASSERT_GE(t.segment_ends.size(), 4u);
  // The last three segment ends are the demonstrated boundaries.
  for (std::size_t s = 1; s < guiding.size(); ++s) {
    const TrajectoryStep& end = t.steps[t.segment_ends[t.segment_ends.size() - guiding.size() + s] - 1];
    const PoseError e = pose_error(end.end_effector, guiding[s]);
    EXPECT_LT(e.translation, spec.planner_config.goal_tol.translation);
    EXPECT_LT(e.rotation, spec.planner_config.goal_tol.rotation);
  }
}

TEST(PlannerConfig, RejectsBadMargins) {
  PlannerConfig c;
  c.eps_out = 0.3;
  EXPECT_THROW(c.validate(panda()), Error);
}
