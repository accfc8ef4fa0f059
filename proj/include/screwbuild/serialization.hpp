#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "screwbuild/demo_pipeline.hpp"
#include "screwbuild/kinematics.hpp"
#include "screwbuild/layout_gen.hpp"
#include "screwbuild/planner.hpp"
#include "screwbuild/screw_algebra.hpp"

namespace screwbuild {

// Insertion-ordered so emitted files have a fixed field order.
using Json = nlohmann::ordered_json;

inline constexpr double kMaxQuaternionDrift = 1e-3;

/// {"t":[x,y,z],"q":[w,x,y,z]}, quaternion on the w >= 0 hemisphere.
Json pose_to_json(const Pose& pose);
/// Throws kMalformed on shape errors, kBadQuaternion when | |q| - 1 | > 1e-3.
Pose pose_from_json(const Json& j);

Json screw_to_json(const ScrewDisplacement& screw);
Json segment_to_json(const ScrewSegment& segment);
void write_segments(std::ostream& out, const std::vector<ScrewSegment>& segments);

void write_demonstration(std::ostream& out, const Demonstration& demo);

std::string_view to_string(LayoutKind kind);
LayoutKind layout_kind_from_string(std::string_view s);
Json layout_to_json(const LayoutSpec& spec);
LayoutSpec layout_from_json(const Json& j);

void write_goals(std::ostream& out, const GoalSequence& goals);
GoalSequence read_goals(std::istream& in);

/// Line-delimited pose records.
void write_poses(std::ostream& out, const std::vector<Pose>& poses);
std::vector<Pose> read_poses(std::istream& in);

Json robot_model_to_json(const RobotModel& model);
RobotModel robot_model_from_json(const Json& j);
RobotModel load_robot_model(const std::string& path);

Json planner_config_to_json(const PlannerConfig& config);
/// Fields absent from `j` keep the values of `defaults`.
PlannerConfig planner_config_from_json(const Json& j, const PlannerConfig& defaults = {});

std::string_view to_string(PlanOutcome outcome);
std::string_view to_string(StepMode mode);
PlanOutcome plan_outcome_from_string(std::string_view s);

/// Header record {"outcome", "steps", "segment_ends"} then one record per step.
void write_trajectory(std::ostream& out, const JointTrajectory& traj);
JointTrajectory read_trajectory(std::istream& in);

Json joint_vector_to_json(const JointVector& q);
JointVector joint_vector_from_json(const Json& j);

/// Reads a whole file; throws kIoFailure.
std::string read_file(const std::string& path);

}  // namespace screwbuild
