#pragma once

#include <array>
#include <vector>

#include "screwbuild/demo_pipeline.hpp"
#include "screwbuild/screw_algebra.hpp"

namespace screwbuild {

struct ObjectDims {
  double length = 0.1016;   // ℓ, along local x
  double breadth = 0.0508;  // b, along local y
  double height = 0.0508;   // h, along local z
};

enum class LayoutKind { kStraightWall, kCurvedWall, kCornerWall, kCeilingGrid };

// How the layer offset Δ(k, δ) enters the layer-to-layer recurrence.
//   kAlternating: layer k sits at offset Δ(k, δ) from the first layer, so
//                 alternate layers are shifted (running bond).
//   kCumulative:  each lift adds Δ(k, δ) on top of the previous layer.
enum class LayerOffsetMode { kAlternating, kCumulative };

struct LayoutSpec {
  LayoutKind kind = LayoutKind::kStraightWall;
  Pose base;
  int layers = 1;     // α (rows for ceiling grids)
  int per_layer = 1;  // β (columns for ceiling grids)
  double layer_offset_x = 0.0;  // δ_x
  double layer_offset_y = 0.0;  // δ_y
  double spacing_length = 0.0;  // ε_ℓ
  double spacing_breadth = 0.0; // ε_b
  double spacing_height = 0.0;  // ε_h
  double per_step_yaw = 0.0;    // θ, radians
  int corner_index = 0;         // corner walls only, 1-based
  ObjectDims dims;
  LayerOffsetMode offset_mode = LayerOffsetMode::kAlternating;
};

struct GoalIndex {
  int i = 1;
  int j = 1;
  int k = 1;
  bool operator==(const GoalIndex&) const = default;
};

struct Goal {
  GoalIndex index;
  Pose pose;
};

using GoalSequence = std::vector<Goal>;

/// Δ(x, y): y when x is even, 0 otherwise.
double delta_offset(long x, double y);

Pose translate_x(double t);
Pose translate_y(double t);
Pose translate_z(double t);
Pose yaw_rotation(double theta);

/// Throws kInvalidSpec on any invariant violation.
void validate(const LayoutSpec& spec);

GoalSequence wall_goals(const LayoutSpec& spec);
GoalSequence corner_wall_goals(const LayoutSpec& spec);
GoalSequence ceiling_goals(const LayoutSpec& spec);
/// Dispatches on spec.kind.
GoalSequence generate_goals(const LayoutSpec& spec);

std::vector<TaskInstance> make_task_instances(const GoalSequence& goals, const std::vector<Pose>& pick_poses);

/// Pile of objects: pick k is the top pose lowered by k·pitch, the pile being
/// restocked every `pile_height` picks.
std::vector<Pose> pick_stack(const Pose& top, int count, double pitch, int pile_height);

}  // namespace screwbuild
