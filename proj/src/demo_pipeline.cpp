#include "screwbuild/demo_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "screwbuild/error.hpp"
#include "screwbuild/serialization.hpp"

namespace screwbuild {

Demonstration load_demonstration(std::istream& source) {
  Demonstration demo;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object()) throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": not an object");
    if (!have_header) {
      if (!record.contains("object_id") || !record.contains("units"))
        throw Error(ErrorCode::kMalformed, "missing header record with object_id and units");
      if (record.at("units") != "m") throw Error(ErrorCode::kMalformed, "units must be \"m\"");
      demo.object_id = record.at("object_id").get<std::string>();
      have_header = true;
      continue;
    }
    if (!record.contains("t") || !record.contains("pose") || !record.at("t").is_number())
      throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": sample needs t and pose");
    DemoSample sample;
    sample.time = record.at("t").get<double>();
    sample.pose = pose_from_json(record.at("pose"));
    if (!demo.samples.empty() && !(sample.time > demo.samples.back().time))
      throw Error(ErrorCode::kNonMonotoneTime, "line " + std::to_string(line_no) + ": timestamp not increasing");
    demo.samples.push_back(sample);
  }
  if (!have_header) throw Error(ErrorCode::kMalformed, "empty demonstration");
  if (demo.samples.size() < 2) throw Error(ErrorCode::kMalformed, "demonstration needs at least 2 samples");
  return demo;
}

double screw_projection_tau(const Pose& from, const Pose& to, const Pose& sample) {
  const Pose from_inv = inverse(from);
  const Vector6d segment = log_twist(compose(from_inv, to));
  const double norm2 = segment.squaredNorm();
  if (norm2 == 0.0) return 0.0;
  const Vector6d partial = log_twist(compose(from_inv, sample));
  return std::clamp(partial.dot(segment) / norm2, 0.0, 1.0);
}

namespace {

// Largest interior deviation from the ScLERP interpolant of [a, b], in units
// of the tolerance (each axis normalized separately).
double window_deviation(const std::vector<DemoSample>& samples, std::size_t a, std::size_t b,
                        const FitTolerance& tol) {
  const Pose& start = samples[a].pose;
  const Pose& end = samples[b].pose;
  const Pose start_inv = inverse(start);
  const Vector6d body_segment = log_twist(compose(start_inv, end));
  const double norm2 = body_segment.squaredNorm();
  const TwistLog spatial = log_pose(compose(end, start_inv));
  double worst = 0.0;
  for (std::size_t k = a + 1; k < b; ++k) {
    double tau = 0.0;
    if (norm2 > 0.0) {
      tau = std::clamp(log_twist(compose(start_inv, samples[k].pose)).dot(body_segment) / norm2, 0.0, 1.0);
    }
    const Pose interp = compose(exp_screw(spatial.twist, tau * spatial.magnitude), start);
    const PoseError e = pose_error(interp, samples[k].pose);
    worst = std::max({worst, e.rotation / tol.rotation, e.translation / tol.translation});
  }
  return worst;
}

bool window_consistent(const std::vector<DemoSample>& samples, std::size_t a, std::size_t b,
                       const FitTolerance& tol) {
  return window_deviation(samples, a, b, tol) < 1.0;
}

// Greedy growth runs past a corner while the overshoot is still within
// tolerance. Pull each boundary back to where the two neighbouring windows fit
// best. Work from the last boundary back so the right neighbour is already
// settled; the left neighbour only ever overshoots into this segment.
void refine_boundaries(const std::vector<DemoSample>& samples, std::vector<std::size_t>& bounds,
                       const FitTolerance& tol) {
  for (std::size_t s = bounds.size() - 2; s >= 1; --s) {
    const std::size_t a = bounds[s - 1];
    const std::size_t c = bounds[s + 1];
    std::size_t best = bounds[s];
    double best_dev = std::max(window_deviation(samples, a, best, tol), window_deviation(samples, best, c, tol));
    for (std::size_t b = bounds[s] - 1; b > a; --b) {
      const double right = window_deviation(samples, b, c, tol);
      if (right >= 1.0) break;
      const double dev = std::max(window_deviation(samples, a, b, tol), right);
      if (dev < best_dev) {
        best_dev = dev;
        best = b;
      }
    }
    bounds[s] = best;
  }
}

ScrewSegment make_segment(const std::vector<DemoSample>& samples, std::size_t a, std::size_t b) {
  ScrewSegment seg;
  seg.start_index = a;
  seg.end_index = b;
  seg.start_pose = samples[a].pose;
  seg.end_pose = samples[b].pose;
  seg.screw = screw_from_pose(compose(seg.end_pose, inverse(seg.start_pose)));
  return seg;
}

}  // namespace

std::vector<ScrewSegment> segment_demonstration(const Demonstration& demo, const FitTolerance& tol) {
  const auto& samples = demo.samples;
  const bool all_same = std::all_of(samples.begin(), samples.end(), [&](const DemoSample& s) {
    const PoseError e = pose_error(s.pose, samples.front().pose);
    return e.rotation == 0.0 && e.translation == 0.0;
  });
  if (samples.size() < 2 || all_same)
    throw Error(ErrorCode::kDegenerateDemo, "demonstration has fewer than 2 distinct poses");

  std::vector<std::size_t> bounds{0};
  const std::size_t last = samples.size() - 1;
  while (bounds.back() < last) {
    const std::size_t a = bounds.back();
    std::size_t b = a + 1;
    while (b < last && window_consistent(samples, a, b + 1, tol)) ++b;
    bounds.push_back(b);
  }
  refine_boundaries(samples, bounds, tol);

  std::vector<ScrewSegment> segments;
  for (std::size_t s = 1; s < bounds.size(); ++s) segments.push_back(make_segment(samples, bounds[s - 1], bounds[s]));
  return segments;
}

ConstraintModel extract_guiding_poses(const std::vector<ScrewSegment>& segments, const TaskInstance& instance,
                                      double roi_radius) {
  if (segments.empty()) throw Error(ErrorCode::kInvalidSpec, "no segments");
  if (!(roi_radius > 0.0)) throw Error(ErrorCode::kInvalidSpec, "roi_radius must be positive");

  ConstraintModel model;
  model.source_instance = instance;
  model.guiding_poses.push_back(segments.front().start_pose);
  for (const auto& seg : segments) model.guiding_poses.push_back(seg.end_pose);
  const std::size_t n = model.guiding_poses.size();

  auto dist_initial = [&](std::size_t i) {
    return (model.guiding_poses[i].translation() - instance.initial.translation()).norm();
  };
  auto dist_goal = [&](std::size_t i) {
    return (model.guiding_poses[i].translation() - instance.goal.translation()).norm();
  };
  if (dist_initial(0) > roi_radius)
    throw Error(ErrorCode::kNoAnchor, "first guiding pose outside the region of interest of the initial pose");
  if (dist_goal(n - 1) > roi_radius)
    throw Error(ErrorCode::kNoAnchor, "last guiding pose outside the region of interest of the goal pose");

  // Contiguous runs: prefix near O1, suffix near O2.
  std::size_t prefix_end = 1;  // exclusive
  while (prefix_end < n && dist_initial(prefix_end) <= roi_radius) ++prefix_end;
  std::size_t suffix_begin = n - 1;
  while (suffix_begin > 0 && dist_goal(suffix_begin - 1) <= roi_radius) --suffix_begin;

  if (suffix_begin < prefix_end) {
    // Overlap: split where the goal anchor becomes the nearer one.
    std::size_t split = suffix_begin;
    while (split < prefix_end && dist_initial(split) <= dist_goal(split)) ++split;
    prefix_end = std::clamp<std::size_t>(split, 1, n - 1);
    suffix_begin = prefix_end;
  }
  for (std::size_t i = 0; i < prefix_end; ++i) model.anchor_initial.push_back(i);
  for (std::size_t i = suffix_begin; i < n; ++i) model.anchor_goal.push_back(i);

  // The object starts at O1 and ends at O2 by definition of the instance.
  model.guiding_poses.front() = instance.initial;
  model.guiding_poses.back() = instance.goal;
  return model;
}

std::vector<Pose> transfer_constraints(const ConstraintModel& model, const TaskInstance& new_instance) {
  const Pose to_initial = compose(new_instance.initial, inverse(model.source_instance.initial));
  const Pose to_goal = compose(new_instance.goal, inverse(model.source_instance.goal));
  const std::size_t n = model.guiding_poses.size();
  const std::size_t run_begin = model.anchor_initial.empty() ? 0 : model.anchor_initial.back() + 1;
  const std::size_t run_end = model.anchor_goal.empty() ? n : model.anchor_goal.front();
  const double run_mid = 0.5 * static_cast<double>(run_end > run_begin ? run_end - run_begin : 0);

  std::vector<Pose> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool initial_side;
    if (i < run_begin) {
      initial_side = true;
    } else if (i >= run_end) {
      initial_side = false;
    } else {
      initial_side = static_cast<double>(i - run_begin) < run_mid;
    }
    out.push_back(compose(initial_side ? to_initial : to_goal, model.guiding_poses[i]));
  }
  return out;
}

TaskInstance instance_from_demonstration(const Demonstration& demo) {
  if (demo.samples.empty()) throw Error(ErrorCode::kDegenerateDemo, "empty demonstration");
  return {demo.samples.front().pose, demo.samples.back().pose};
}

}  // namespace screwbuild
