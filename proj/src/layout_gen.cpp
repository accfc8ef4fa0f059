#include "screwbuild/layout_gen.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "screwbuild/error.hpp"

namespace screwbuild {

double delta_offset(long x, double y) { return x % 2 == 0 ? y : 0.0; }

Pose translate_x(double t) { return Pose::from_translation(Vector3d(t, 0.0, 0.0)); }
Pose translate_y(double t) { return Pose::from_translation(Vector3d(0.0, t, 0.0)); }
Pose translate_z(double t) { return Pose::from_translation(Vector3d(0.0, 0.0, t)); }

Pose yaw_rotation(double theta) {
  Matrix3d r = Matrix3d::Identity();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r(0, 0) = c;
  r(0, 1) = -s;
  r(1, 0) = s;
  r(1, 1) = c;
  return Pose::from_rotation(r);
}

void validate(const LayoutSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSpec, why); };
  if (spec.layers < 1 || spec.per_layer < 1) fail("layers and per_layer must be >= 1");
  if (spec.spacing_length < 0.0 || spec.spacing_breadth < 0.0 || spec.spacing_height < 0.0)
    fail("spacings must be >= 0");
  if (!(spec.dims.length > 0.0 && spec.dims.breadth > 0.0 && spec.dims.height > 0.0))
    fail("object dimensions must be > 0");
  if (!spec.base.is_valid()) fail("base pose is not a rigid transform");
  switch (spec.kind) {
    case LayoutKind::kStraightWall:
      if (spec.per_step_yaw != 0.0) fail("straight wall requires zero per-step yaw");
      break;
    case LayoutKind::kCurvedWall:
      if (spec.per_step_yaw == 0.0) fail("curved wall requires non-zero per-step yaw");
      break;
    case LayoutKind::kCornerWall:
      if (spec.corner_index < 1 || spec.corner_index > spec.per_layer) fail("corner_index out of range");
      break;
    case LayoutKind::kCeilingGrid:
      break;
  }
}

namespace {

// First object of layer k from the first object of layer k - 1.
Pose layer_lift(const LayoutSpec& spec, int k) {
  double dx = delta_offset(k, spec.layer_offset_x);
  double dy = delta_offset(k, spec.layer_offset_y);
  if (spec.offset_mode == LayerOffsetMode::kAlternating) {
    dx -= delta_offset(k - 1, spec.layer_offset_x);
    dy -= delta_offset(k - 1, spec.layer_offset_y);
  }
  return translate_z(spec.dims.height + spec.spacing_height) * translate_x(dx) * translate_y(dy) *
         yaw_rotation(spec.per_step_yaw);
}

void require_kind(const LayoutSpec& spec, std::initializer_list<LayoutKind> kinds) {
  for (LayoutKind k : kinds)
    if (spec.kind == k) return;
  throw Error(ErrorCode::kInvalidSpec, "layout kind does not match the generator");
}

}  // namespace

GoalSequence wall_goals(const LayoutSpec& spec) {
  require_kind(spec, {LayoutKind::kStraightWall, LayoutKind::kCurvedWall});
  validate(spec);
  const Pose step = translate_x(spec.dims.length + spec.spacing_length) * yaw_rotation(spec.per_step_yaw);
  GoalSequence goals;
  goals.reserve(static_cast<std::size_t>(spec.layers * spec.per_layer));
  Pose layer_first = spec.base;
  for (int k = 1; k <= spec.layers; ++k) {
    if (k > 1) layer_first = layer_first * layer_lift(spec, k);
    Pose t = layer_first;
    for (int i = 1; i <= spec.per_layer; ++i) {
      if (i > 1) t = t * step;
      goals.push_back({{i, 1, k}, t});
    }
  }
  return goals;
}

GoalSequence corner_wall_goals(const LayoutSpec& spec) {
  require_kind(spec, {LayoutKind::kCornerWall});
  validate(spec);
  const double corner_pitch = 0.5 * (spec.dims.length + spec.dims.breadth) + spec.spacing_length;
  const Pose straight = translate_x(spec.dims.length + spec.spacing_length);
  // The corner object abuts the end face of its predecessor, turned 90°.
  const Pose corner = translate_x(corner_pitch) * yaw_rotation(std::numbers::pi / 2.0);
  GoalSequence goals;
  Pose layer_first = spec.base;
  for (int k = 1; k <= spec.layers; ++k) {
    if (k > 1) layer_first = layer_first * layer_lift(spec, k);
    Pose t = layer_first;
    for (int i = 1; i <= spec.per_layer; ++i) {
      if (i > 1) t = t * (i == spec.corner_index ? corner : straight);
      goals.push_back({{i, 1, k}, t});
    }
  }
  return goals;
}

GoalSequence ceiling_goals(const LayoutSpec& spec) {
  require_kind(spec, {LayoutKind::kCeilingGrid});
  validate(spec);
  const Pose row_step = translate_y(spec.dims.breadth + spec.spacing_breadth);
  const Pose col_step = translate_x(spec.dims.length + spec.spacing_length);
  GoalSequence goals;
  Pose row_first = spec.base;
  for (int i = 1; i <= spec.layers; ++i) {
    if (i > 1) row_first = row_first * row_step;
    Pose t = row_first;
    for (int j = 1; j <= spec.per_layer; ++j) {
      if (j > 1) t = t * col_step;
      goals.push_back({{i, j, 1}, t});
    }
  }
  return goals;
}

GoalSequence generate_goals(const LayoutSpec& spec) {
  switch (spec.kind) {
    case LayoutKind::kStraightWall:
    case LayoutKind::kCurvedWall:
      return wall_goals(spec);
    case LayoutKind::kCornerWall:
      return corner_wall_goals(spec);
    case LayoutKind::kCeilingGrid:
      return ceiling_goals(spec);
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown layout kind");
}

std::vector<TaskInstance> make_task_instances(const GoalSequence& goals, const std::vector<Pose>& pick_poses) {
  if (goals.size() != pick_poses.size())
    throw Error(ErrorCode::kLengthMismatch, std::to_string(goals.size()) + " goals vs " +
                                                std::to_string(pick_poses.size()) + " pick poses");
  std::vector<TaskInstance> out;
  out.reserve(goals.size());
  for (std::size_t k = 0; k < goals.size(); ++k) out.push_back({pick_poses[k], goals[k].pose});
  return out;
}

std::vector<Pose> pick_stack(const Pose& top, int count, double pitch, int pile_height) {
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  const int period = pile_height > 0 ? pile_height : std::max(count, 1);
  for (int k = 0; k < count; ++k) out.push_back(top * translate_z(-pitch * (k % period)));
  return out;
}

}  // namespace screwbuild
