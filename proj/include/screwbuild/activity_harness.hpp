#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "screwbuild/demo_pipeline.hpp"
#include "screwbuild/kinematics.hpp"
#include "screwbuild/layout_gen.hpp"
#include "screwbuild/planner.hpp"
#include "screwbuild/screw_algebra.hpp"

namespace screwbuild {

inline constexpr double kPlacementPositionThreshold = 0.0075;                     // meters
inline constexpr double kPlacementYawThreshold = 2.0 * std::numbers::pi / 180.0;  // radians

/// Where the objects come from, expressed in the robot base frame so the pile
/// travels with a moving base. Either a pile (top pose lowered by `pitch` per
/// pick, restocked every `pile_height` picks) or an explicit list.
struct PickStation {
  Pose top;
  double pitch = 0.0508;
  int pile_height = 1;
  std::vector<Pose> explicit_poses;

  std::vector<Pose> poses(int count) const;
};

enum class BasePolicyKind { kFixed, kMoving };

/// FIXED keeps the robot at `base`. MOVING relocates it before every
/// `relocate_every`-th placement: the nominal station is `base` slid along
/// `track_axis` (world) to follow the first goal of the group, then perturbed
/// uniformly within `neighborhood_radius` in the xy-plane and ±`yaw_range`.
struct BasePolicy {
  BasePolicyKind kind = BasePolicyKind::kFixed;
  Pose base;
  int relocate_every = 3;
  Vector3d track_axis = Vector3d::UnitY();
  double neighborhood_radius = 0.05;                      // meters
  double yaw_range = 5.0 * std::numbers::pi / 180.0;      // radians
  std::optional<std::uint64_t> seed;
};

/// Rectangular opening of a ceiling frame. The frame plane is the seat plane
/// under each goal (goal ∘ Z(-h/2)); the opening is centred on the goal and
/// aligned with its x and y axes.
struct CeilingOpening {
  double width_x = 0.0;
  double width_y = 0.0;
  double min_overlap = 0.005;  // lip contact needed on each supported side, meters
};

struct ActivitySpec {
  std::string name;
  LayoutSpec layout;
  ConstraintModel demo_model;
  PickStation pick_station;
  Pose grasp_offset;  // end effector relative to the object
  BasePolicy base_policy;
  PlannerConfig planner_config;
  RobotModel robot;
  JointVector q_start = JointVector::Zero();
  std::optional<CeilingOpening> ceiling;

  /// Throws kInvalidSpec / kBadEps.
  void validate() const;
};

struct PlacementEvaluation {
  double position_error = 0.0;
  double yaw_error = 0.0;
  double rotation_error = 0.0;
  bool success = false;
};

struct PlacementResult {
  GoalIndex index;
  Pose goal;
  Pose achieved;
  double position_error = 0.0;
  double yaw_error = 0.0;
  double rotation_error = 0.0;  // full rotation, recorded but not scored
  bool success = false;
  PlanOutcome trajectory_outcome = PlanOutcome::kReached;
  std::size_t steps = 0;
  int recoveries = 0;
  JointVector final_q = JointVector::Zero();
  Pose base;
  std::optional<bool> containment_ok;  // ceiling activities only
  std::vector<Pose> object_path;       // attached phase; kept in memory, not serialized
};

struct ActivityReport {
  std::string name;
  std::vector<PlacementResult> placements;
  std::size_t bricks_placed_before_failure = 0;
  std::size_t successes = 0;
  double mean_position_error = 0.0;
  double max_yaw_error = 0.0;
  bool completed = false;  // every goal placed and scored a success
  double runtime_seconds = 0.0;
};

struct PairedReport {
  std::string name;
  LayoutKind layout = LayoutKind::kStraightWall;
  std::size_t goals = 0;
  ActivityReport ours;
  ActivityReport baseline;
};

PlacementEvaluation evaluate_placement(const Pose& achieved, const Pose& goal);

struct CeilingEvaluation {
  bool containment_ok = false;
  bool seated = false;
  bool success = false;
  std::size_t first_violation = 0;  // path index, meaningful when !containment_ok
  double tilt = 0.0;                // final tilt against the frame plane, radians
};

/// Swept containment of the tile's cross-section at the frame plane along the
/// path (consecutive poses are subsampled on their screw), then seating on the
/// lips at the final pose.
CeilingEvaluation evaluate_ceiling(const std::vector<Pose>& tile_path, const Pose& seat_goal,
                                   const ObjectDims& tile, const CeilingOpening& opening);

/// Pose of the base for placement `k` (0-based) under `policy`.
std::vector<Pose> base_stations(const BasePolicy& policy, const GoalSequence& goals);

ActivityReport run_activity(const ActivitySpec& spec);

/// Runs the activity with Mode 2 enabled ("ours") and disabled ("baseline").
PairedReport compare_baseline(const ActivitySpec& spec);

void emit_report(const ActivityReport& report, std::ostream& json_out, std::ostream& summary_out);
void emit_report(const PairedReport& report, std::ostream& json_out, std::ostream& summary_out);
/// Writes `path` (JSON) and `path`.txt (summary table). Throws kIoFailure.
void emit_report(const ActivityReport& report, const std::string& path);
void emit_report(const PairedReport& report, const std::string& path);

ActivityReport load_report(std::istream& in);
PairedReport load_paired_report(std::istream& in);

/// Loads an activity spec file; relative paths inside are resolved against
/// the file's directory.
ActivitySpec load_activity_spec(const std::string& path);

}  // namespace screwbuild
