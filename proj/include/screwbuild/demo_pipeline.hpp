#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "screwbuild/screw_algebra.hpp"

namespace screwbuild {

struct DemoSample {
  double time = 0.0;  // seconds
  Pose pose;
};

/// Recorded motion of the manipulated object.
struct Demonstration {
  std::string object_id;
  std::vector<DemoSample> samples;
};

/// Initial and goal pose of the manipulated object for one repetition.
struct TaskInstance {
  Pose initial;
  Pose goal;
};

struct FitTolerance {
  double rotation = 0.02;      // radians
  double translation = 0.005;  // meters
};

inline constexpr double kDefaultRoiRadius = 0.15;  // meters

struct ScrewSegment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
  ScrewDisplacement screw;
  Pose start_pose;
  Pose end_pose;
};

/// Guiding poses with the prefix anchored to the initial object pose and the
/// suffix anchored to the goal pose. Indices not in either set are "middle"
/// poses, assigned to an anchor at transfer time.
struct ConstraintModel {
  std::vector<Pose> guiding_poses;
  std::vector<std::size_t> anchor_initial;
  std::vector<std::size_t> anchor_goal;
  TaskInstance source_instance;
};

/// Parses the line-delimited demonstration format (header record followed by
/// one sample record per line). Quaternions with norm drift up to 1e-3 are
/// re-normalized.
Demonstration load_demonstration(std::istream& source);

/// Greedy longest-fit segmentation into constant-screw spans. A window [a, b]
/// is accepted when every interior sample lies within `tol` of the ScLERP
/// interpolant between samples a and b. Each boundary is then moved back to
/// where its two neighbouring windows fit best.
std::vector<ScrewSegment> segment_demonstration(const Demonstration& demo,
                                                const FitTolerance& tol = {});

/// Interpolation parameter of `sample` on the constant screw from `from` to
/// `to`, by projecting its body-frame displacement twist onto the segment
/// twist. Clamped to [0, 1]; left-invariant.
double screw_projection_tau(const Pose& from, const Pose& to, const Pose& sample);

ConstraintModel extract_guiding_poses(const std::vector<ScrewSegment>& segments,
                                      const TaskInstance& instance,
                                      double roi_radius = kDefaultRoiRadius);

std::vector<Pose> transfer_constraints(const ConstraintModel& model, const TaskInstance& new_instance);

/// Convenience: instance whose poses are the first and last demonstration samples.
TaskInstance instance_from_demonstration(const Demonstration& demo);

}  // namespace screwbuild
