#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "screwbuild/kinematics.hpp"
#include "screwbuild/screw_algebra.hpp"

namespace screwbuild {

enum class StepMode { kMode1, kMode2 };
enum class PlanOutcome { kReached, kMotionPlanFailed, kStepBudgetExhausted };

struct PlannerConfig {
  double eps_in = 0.2;    // radians
  double eps_out = 0.01;  // radians
  double kappa = 1.0;
  double lambda = 1.0;
  double delta_t = 0.01;  // seconds
  PoseError goal_tol{0.05 * std::numbers::pi / 180.0, 1e-4};
  int max_steps = 20000;  // per segment, both modes
  double sew_step = 0.01;              // ψ increment of the recovery search
  double sew_range = std::numbers::pi; // ψ search range in each direction
  double sew_tolerance = 1e-3;         // Mode 2 termination on |ψ_c - ψ_target|
  // Once a recovery reaches the inner band it keeps swinging until every
  // joint clears the band by this much (or the margin stops improving).
  double recovery_margin = 0.1;
  double max_joint_step = 0.05;  // per-step clamp, radians
  bool mode2_enabled = true;

  /// Throws kBadEps / kInvalidSpec.
  void validate(const RobotModel& model) const;
};

struct TrajectoryStep {
  JointVector q;
  StepMode mode = StepMode::kMode1;
  Pose end_effector;
};

/// Configurations produced by the planner; `steps` excludes the start
/// configuration. `segment_ends[s]` is the number of steps recorded when
/// segment s finished.
struct JointTrajectory {
  std::vector<TrajectoryStep> steps;
  PlanOutcome outcome = PlanOutcome::kReached;
  std::vector<std::size_t> segment_ends;
  int singular_steps = 0;
  int recoveries = 0;

  void append(const JointTrajectory& other);
};

struct Mode1Step {
  JointVector q;
  bool singular = false;  // damped pseudoinverse used
};

/// One resolved-rate step along the screw from FK(q) toward `goal`:
/// q + δt κ J_s† log(G_d G_c⁻¹), clamped per joint.
Mode1Step mode1_step(const JointVector& q, const Pose& goal, const RobotModel& model, const PlannerConfig& config);

/// Integrates the self-motion dq/dψ = J_a† [0; 1] over `dpsi` (one RK4 step).
JointVector self_motion_step(const RobotModel& model, const JointVector& q, double dpsi);

/// Signed ψ change that brings the arm back inside the inner band, or the best
/// partial retreat; 0 when no direction helps.
double calculate_sew_change(const JointVector& q, const RobotModel& model, const PlannerConfig& config);

/// Null-space swing toward ψ(q) + psi_change. Outcome is kReached on
/// convergence, kMotionPlanFailed on a SEW singularity, or
/// kStepBudgetExhausted after `max_steps`.
JointTrajectory mode2_recovery(const JointVector& q, double psi_change, const RobotModel& model,
                               const PlannerConfig& config, int max_steps = -1);

JointTrajectory plan_to_pose(const JointVector& q0, const Pose& goal, const RobotModel& model,
                             const PlannerConfig& config);

/// Plans every consecutive pair of guiding poses. If FK(q0) is not already at
/// the first pose, an approach segment to it is planned first.
JointTrajectory plan_through_guiding_poses(const JointVector& q0, const std::vector<Pose>& guiding,
                                           const RobotModel& model, const PlannerConfig& config);

/// Final configuration of a trajectory, or `start` when it is empty.
JointVector final_configuration(const JointTrajectory& traj, const JointVector& start);

}  // namespace screwbuild
