#include "screwbuild/planner.hpp"

#include <algorithm>
#include <cmath>

#include "screwbuild/error.hpp"

namespace screwbuild {

namespace {

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

bool within(const PoseError& e, const PoseError& tol) {
  return e.rotation < tol.rotation && e.translation < tol.translation;
}

JointVector clamp_step(const JointVector& dq, double max_step) {
  const double largest = dq.cwiseAbs().maxCoeff();
  if (largest > max_step) return dq * (max_step / largest);
  return dq;
}

// J_a† [0₆; rate]
JointVector null_space_velocity(const RobotModel& model, const JointVector& q, double rate, bool* damped) {
  const PseudoInverse pinv = pseudoinverse(augmented_jacobian(model, q));
  if (damped != nullptr) *damped = *damped || pinv.damped;
  return pinv.matrix.col(6) * rate;
}

// A joint leaves the inner band, or sinks deeper into the band, on this step.
bool reached_joint_limit(const JointVector& q, const JointVector& q_next, const RobotModel& model,
                         const PlannerConfig& config) {
  const JointVector before = inner_margins(q, model, config.eps_in);
  const JointVector after = inner_margins(q_next, model, config.eps_in);
  for (int i = 0; i < kNumJoints; ++i)
    if (after(i) < 0.0 && after(i) < before(i)) return true;
  return false;
}

TrajectoryStep make_step(const RobotModel& model, const JointVector& q, StepMode mode) {
  return {q, mode, forward_kinematics(model, q)};
}

}  // namespace

void PlannerConfig::validate(const RobotModel& model) const {
  check_limit_margins(model, eps_in, eps_out);
  if (!(kappa > 0.0 && lambda > 0.0 && delta_t > 0.0))
    throw Error(ErrorCode::kInvalidSpec, "kappa, lambda and delta_t must be positive");
  if (!(sew_step > 0.0 && sew_range >= sew_step && sew_tolerance > 0.0 && max_joint_step > 0.0))
    throw Error(ErrorCode::kInvalidSpec, "SEW search and step limits must be positive");
  if (max_steps < 1) throw Error(ErrorCode::kInvalidSpec, "max_steps must be >= 1");
}

void JointTrajectory::append(const JointTrajectory& other) {
  const std::size_t offset = steps.size();
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
  for (std::size_t end : other.segment_ends) segment_ends.push_back(offset + end);
  singular_steps += other.singular_steps;
  recoveries += other.recoveries;
  outcome = other.outcome;
}

JointVector final_configuration(const JointTrajectory& traj, const JointVector& start) {
  return traj.steps.empty() ? start : traj.steps.back().q;
}

Mode1Step mode1_step(const JointVector& q, const Pose& goal, const RobotModel& model, const PlannerConfig& config) {
  const Pose current = forward_kinematics(model, q);
  if (within(pose_error(current, goal), config.goal_tol)) return {q, false};
  // Spatial error twist, the frame J_s maps into.
  const Vector6d twist = log_twist(goal * inverse(current));
  const PseudoInverse pinv = pseudoinverse(spatial_jacobian(model, q));
  const JointVector dq = config.delta_t * config.kappa * pinv.matrix * twist;
  return {q + clamp_step(dq, config.max_joint_step), pinv.damped};
}

JointVector self_motion_step(const RobotModel& model, const JointVector& q, double dpsi) {
  auto f = [&](const JointVector& x) { return null_space_velocity(model, x, 1.0, nullptr); };
  const JointVector k1 = f(q);
  const JointVector k2 = f(q + 0.5 * dpsi * k1);
  const JointVector k3 = f(q + 0.5 * dpsi * k2);
  const JointVector k4 = f(q + dpsi * k3);
  return q + (dpsi / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double calculate_sew_change(const JointVector& q, const RobotModel& model, const PlannerConfig& config) {
  if (limit_status(q, model, config.eps_in, config.eps_out).worst == LimitClass::kWithinInner) return 0.0;

  const int n = static_cast<int>(std::floor(config.sew_range / config.sew_step + 1e-9));
  const double start_margin = inner_margins(q, model, config.eps_in).minCoeff();
  double best_partial = 0.0;
  double best_partial_margin = start_margin;

  std::array<JointVector, 2> state{q, q};
  std::array<bool, 2> alive{true, true};
  const std::array<double, 2> sign{1.0, -1.0};

  for (int k = 1; k <= n; ++k) {
    for (int d = 0; d < 2; ++d) {
      if (!alive[d]) continue;
      try {
        state[d] = self_motion_step(model, state[d], sign[d] * config.sew_step);
      } catch (const Error&) {
        alive[d] = false;
        continue;
      }
      const LimitStatus status = limit_status(state[d], model, config.eps_in, config.eps_out);
      if (status.worst == LimitClass::kOutsideOuter) {
        alive[d] = false;
        continue;
      }
      double margin = inner_margins(state[d], model, config.eps_in).minCoeff();
      if (status.worst == LimitClass::kWithinInner) {
        // Keep swinging while it buys clearance, up to the recovery margin.
        int best = k;
        JointVector x = state[d];
        for (int j = k + 1; j <= n && margin < config.recovery_margin; ++j) {
          try {
            x = self_motion_step(model, x, sign[d] * config.sew_step);
          } catch (const Error&) {
            break;
          }
          const double m = inner_margins(x, model, config.eps_in).minCoeff();
          if (!(m > margin)) break;
          margin = m;
          best = j;
        }
        return sign[d] * best * config.sew_step;
      }
      if (margin > best_partial_margin + 1e-12) {
        best_partial_margin = margin;
        best_partial = sign[d] * k * config.sew_step;
      }
    }
    if (!alive[0] && !alive[1]) break;
  }
  return best_partial;
}

JointTrajectory mode2_recovery(const JointVector& q0, double psi_change, const RobotModel& model,
                               const PlannerConfig& config, int max_steps) {
  JointTrajectory traj;
  if (max_steps < 0) max_steps = config.max_steps;
  JointVector q = q0;
  try {
    const double target = sew_angle(model, q) + psi_change;
    auto rate = [&](const JointVector& x, bool* damped) {
      const double err = wrap_angle(target - sew_angle(model, x));
      return null_space_velocity(model, x, config.lambda * err, damped);
    };
    for (int i = 0;; ++i) {
      if (std::abs(wrap_angle(target - sew_angle(model, q))) < config.sew_tolerance) {
        traj.outcome = PlanOutcome::kReached;
        return traj;
      }
      if (i >= max_steps) {
        traj.outcome = PlanOutcome::kStepBudgetExhausted;
        return traj;
      }
      const double h = config.delta_t;
      bool damped = false;
      const JointVector k1 = rate(q, &damped);
      const JointVector k2 = rate(q + 0.5 * h * k1, &damped);
      const JointVector k3 = rate(q + 0.5 * h * k2, &damped);
      const JointVector k4 = rate(q + h * k3, &damped);
      q += clamp_step((h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), config.max_joint_step);
      if (damped) ++traj.singular_steps;
      traj.steps.push_back(make_step(model, q, StepMode::kMode2));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSewSingular) throw;
    traj.outcome = PlanOutcome::kMotionPlanFailed;
  }
  return traj;
}

JointTrajectory plan_to_pose(const JointVector& q0, const Pose& goal, const RobotModel& model,
                             const PlannerConfig& config) {
  config.validate(model);
  JointTrajectory traj;
  JointVector q = q0;
  int used = 0;
  while (used < config.max_steps) {
    if (within(pose_error(forward_kinematics(model, q), goal), config.goal_tol)) {
      traj.outcome = PlanOutcome::kReached;
      return traj;
    }
    const Mode1Step next = mode1_step(q, goal, model, config);
    if (config.mode2_enabled) {
      if (reached_joint_limit(q, next.q, model, config)) {
        // The search starts from the violating tentative state; the swing
        // itself starts from q, so the tentative step is discarded.
        const double psi_change = calculate_sew_change(next.q, model, config);
        if (psi_change == 0.0) {
          traj.outcome = PlanOutcome::kMotionPlanFailed;
          return traj;
        }
        const JointTrajectory swing = mode2_recovery(q, psi_change, model, config, config.max_steps - used);
        ++traj.recoveries;
        traj.steps.insert(traj.steps.end(), swing.steps.begin(), swing.steps.end());
        traj.singular_steps += swing.singular_steps;
        used += static_cast<int>(swing.steps.size());
        if (swing.outcome == PlanOutcome::kMotionPlanFailed) {
          traj.outcome = PlanOutcome::kMotionPlanFailed;
          return traj;
        }
        if (swing.steps.empty()) {
          // No progress is possible from here.
          traj.outcome = PlanOutcome::kMotionPlanFailed;
          return traj;
        }
        q = swing.steps.back().q;
        continue;
      }
    } else if (limit_status(next.q, model, config.eps_in, config.eps_out).worst == LimitClass::kOutsideOuter) {
      traj.outcome = PlanOutcome::kMotionPlanFailed;
      return traj;
    }
    if (next.singular) ++traj.singular_steps;
    q = next.q;
    traj.steps.push_back(make_step(model, q, StepMode::kMode1));
    ++used;
  }
  traj.outcome = within(pose_error(forward_kinematics(model, q), goal), config.goal_tol)
                     ? PlanOutcome::kReached
                     : PlanOutcome::kStepBudgetExhausted;
  return traj;
}

JointTrajectory plan_through_guiding_poses(const JointVector& q0, const std::vector<Pose>& guiding,
                                           const RobotModel& model, const PlannerConfig& config) {
  if (guiding.empty()) throw Error(ErrorCode::kInvalidSpec, "no guiding poses");
  JointTrajectory traj;
  JointVector q = q0;
  std::size_t first = 0;
  if (within(pose_error(forward_kinematics(model, q0), guiding.front()), config.goal_tol)) {
    first = 1;
    traj.segment_ends.push_back(0);
  }
  for (std::size_t s = first; s < guiding.size(); ++s) {
    JointTrajectory seg = plan_to_pose(q, guiding[s], model, config);
    seg.segment_ends.push_back(seg.steps.size());
    traj.append(seg);
    if (seg.outcome != PlanOutcome::kReached) return traj;
    q = final_configuration(traj, q0);
  }
  traj.outcome = PlanOutcome::kReached;
  return traj;
}

}  // namespace screwbuild
