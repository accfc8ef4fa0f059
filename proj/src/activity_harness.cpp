#include "screwbuild/activity_harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "screwbuild/error.hpp"
#include "screwbuild/serialization.hpp"

namespace screwbuild {

namespace {

constexpr double kSeatContactTolerance = 1e-3;  // meters, corner height above/below the lip plane
constexpr double kPlaneTolerance = 1e-6;
constexpr int kSweepSubsamples = 4;

// Heading of x-axis of `r` projected on the xy-plane of its frame.
double yaw_of(const Matrix3d& r) { return std::atan2(r(1, 0), r(0, 0)); }

std::array<Vector3d, 8> box_corners(const Pose& pose, const ObjectDims& d) {
  std::array<Vector3d, 8> c;
  int n = 0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1})
        c[n++] = pose.apply(Vector3d(sx * d.length / 2, sy * d.breadth / 2, sz * d.height / 2));
  return c;
}

// Corner index pairs forming the 12 box edges (corners differ in one bit).
constexpr std::array<std::array<int, 2>, 12> kBoxEdges{{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                                                        {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}}};

// True when the tile (in the plane frame) either does not cut the plane or its
// cross-section lies inside the opening.
bool section_inside(const Pose& tile_in_plane, const ObjectDims& tile, const CeilingOpening& opening) {
  const auto corners = box_corners(tile_in_plane, tile);
  double zmin = corners[0].z();
  double zmax = corners[0].z();
  for (const auto& c : corners) {
    zmin = std::min(zmin, c.z());
    zmax = std::max(zmax, c.z());
  }
  if (zmin >= -kSeatContactTolerance || zmax <= kPlaneTolerance) return true;
  const double hx = opening.width_x / 2 + kPlaneTolerance;
  const double hy = opening.width_y / 2 + kPlaneTolerance;
  auto inside = [&](const Vector3d& p) { return std::abs(p.x()) <= hx && std::abs(p.y()) <= hy; };
  // The section is convex: checking its vertices is enough.
  for (const auto& c : corners)
    if (std::abs(c.z()) <= kPlaneTolerance && !inside(c)) return false;
  for (const auto& e : kBoxEdges) {
    const Vector3d& a = corners[e[0]];
    const Vector3d& b = corners[e[1]];
    if ((a.z() < 0.0) == (b.z() < 0.0)) continue;
    const double s = a.z() / (a.z() - b.z());
    if (!inside(a + s * (b - a))) return false;
  }
  return true;
}

Pose station_pose(const Vector3d& position, double yaw, const Matrix3d& rotation) {
  return {yaw_rotation(yaw).rotation() * rotation, position};
}

ActivityReport summarize(ActivityReport report, std::size_t total_goals) {
  report.successes = 0;
  report.bricks_placed_before_failure = report.placements.size();
  double sum = 0.0;
  report.max_yaw_error = 0.0;
  for (std::size_t k = 0; k < report.placements.size(); ++k) {
    const PlacementResult& p = report.placements[k];
    if (p.trajectory_outcome != PlanOutcome::kReached && report.bricks_placed_before_failure == report.placements.size())
      report.bricks_placed_before_failure = k;
    if (p.success) ++report.successes;
    sum += p.position_error;
    report.max_yaw_error = std::max(report.max_yaw_error, p.yaw_error);
  }
  report.mean_position_error = report.placements.empty() ? 0.0 : sum / report.placements.size();
  report.completed = report.placements.size() == total_goals && report.successes == total_goals;
  return report;
}

Json placement_to_json(const PlacementResult& p) {
  Json j;
  j["index"] = Json::array({p.index.i, p.index.j, p.index.k});
  j["goal"] = pose_to_json(p.goal);
  j["achieved"] = pose_to_json(p.achieved);
  j["position_error_m"] = p.position_error;
  j["yaw_error_rad"] = p.yaw_error;
  j["rotation_error_rad"] = p.rotation_error;
  j["success"] = p.success;
  j["trajectory_outcome"] = to_string(p.trajectory_outcome);
  j["steps"] = p.steps;
  j["recoveries"] = p.recoveries;
  j["final_q_rad"] = joint_vector_to_json(p.final_q);
  j["base"] = pose_to_json(p.base);
  j["containment_ok"] = p.containment_ok ? Json(*p.containment_ok) : Json(nullptr);
  return j;
}

PlacementResult placement_from_json(const Json& j) {
  PlacementResult p;
  const Json& idx = j.at("index");
  p.index = {idx.at(0).get<int>(), idx.at(1).get<int>(), idx.at(2).get<int>()};
  p.goal = pose_from_json(j.at("goal"));
  p.achieved = pose_from_json(j.at("achieved"));
  p.position_error = j.at("position_error_m").get<double>();
  p.yaw_error = j.at("yaw_error_rad").get<double>();
  p.rotation_error = j.at("rotation_error_rad").get<double>();
  p.success = j.at("success").get<bool>();
  p.trajectory_outcome = plan_outcome_from_string(j.at("trajectory_outcome").get<std::string>());
  p.steps = j.at("steps").get<std::size_t>();
  p.recoveries = j.at("recoveries").get<int>();
  p.final_q = joint_vector_from_json(j.at("final_q_rad"));
  p.base = pose_from_json(j.at("base"));
  if (!j.at("containment_ok").is_null()) p.containment_ok = j.at("containment_ok").get<bool>();
  return p;
}

// Wall-clock runtime is left out so that reruns with the same seed are
// byte-identical; it only appears in the summary table.
Json report_to_json(const ActivityReport& r) {
  Json j;
  j["name"] = r.name;
  Json placements = Json::array();
  for (const auto& p : r.placements) placements.push_back(placement_to_json(p));
  j["placements"] = placements;
  j["bricks_placed_before_failure"] = r.bricks_placed_before_failure;
  j["successes"] = r.successes;
  j["mean_position_error_m"] = r.mean_position_error;
  j["max_yaw_error_rad"] = r.max_yaw_error;
  j["completed"] = r.completed;
  return j;
}

ActivityReport report_from_json(const Json& j) {
  ActivityReport r;
  try {
    r.name = j.at("name").get<std::string>();
    for (const Json& p : j.at("placements")) r.placements.push_back(placement_from_json(p));
    r.bricks_placed_before_failure = j.at("bricks_placed_before_failure").get<std::size_t>();
    r.successes = j.at("successes").get<std::size_t>();
    r.mean_position_error = j.at("mean_position_error_m").get<double>();
    r.max_yaw_error = j.at("max_yaw_error_rad").get<double>();
    r.completed = j.at("completed").get<bool>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("report: ") + e.what());
  }
  return r;
}

std::string degrees(double rad) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << rad * 180.0 / std::numbers::pi;
  return s.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// Table row cell: a count for walls, a success flag for ceilings.
std::string table_cell(const ActivityReport& r, LayoutKind kind) {
  if (kind == LayoutKind::kCeilingGrid) return r.completed ? "success" : "failure";
  return std::to_string(r.bricks_placed_before_failure);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  return out;
}

void check_written(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path);
}

std::string resolve(const std::filesystem::path& dir, const std::string& p) {
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : dir / path).lexically_normal().string();
}

}  // namespace

std::vector<Pose> PickStation::poses(int count) const {
  if (!explicit_poses.empty()) {
    if (static_cast<int>(explicit_poses.size()) < count)
      throw Error(ErrorCode::kLengthMismatch, "pick list shorter than the goal sequence");
    return {explicit_poses.begin(), explicit_poses.begin() + count};
  }
  return pick_stack(top, count, pitch, pile_height);
}

void ActivitySpec::validate() const {
  screwbuild::validate(layout);
  robot.validate();
  planner_config.validate(robot);
  if (demo_model.guiding_poses.empty()) throw Error(ErrorCode::kInvalidSpec, "demo model has no guiding poses");
  if (!grasp_offset.is_valid(1e-6)) throw Error(ErrorCode::kInvalidSpec, "grasp offset is not a rigid transform");
  if (pick_station.explicit_poses.empty() && (pick_station.pile_height < 1 || !(pick_station.pitch >= 0.0)))
    throw Error(ErrorCode::kInvalidSpec, "pick pile needs pile_height >= 1 and pitch >= 0");
  if (base_policy.kind == BasePolicyKind::kMoving) {
    if (!base_policy.seed) throw Error(ErrorCode::kInvalidSpec, "moving base policy needs a seed");
    if (base_policy.relocate_every < 1) throw Error(ErrorCode::kInvalidSpec, "relocate_every must be >= 1");
    if (!(base_policy.neighborhood_radius >= 0.0 && base_policy.yaw_range >= 0.0))
      throw Error(ErrorCode::kInvalidSpec, "base perturbation ranges must be non-negative");
    if (base_policy.track_axis.norm() < 1e-12) throw Error(ErrorCode::kInvalidSpec, "track axis is zero");
  }
  if (ceiling && !(ceiling->width_x > 0.0 && ceiling->width_y > 0.0 && ceiling->min_overlap >= 0.0))
    throw Error(ErrorCode::kInvalidSpec, "ceiling opening widths must be positive");
}

PlacementEvaluation evaluate_placement(const Pose& achieved, const Pose& goal) {
  PlacementEvaluation e;
  const PoseError err = pose_error(achieved, goal);
  e.position_error = err.translation;
  e.rotation_error = err.rotation;
  e.yaw_error = std::abs(yaw_of(goal.rotation().transpose() * achieved.rotation()));
  e.success = e.position_error < kPlacementPositionThreshold && e.yaw_error < kPlacementYawThreshold;
  return e;
}

CeilingEvaluation evaluate_ceiling(const std::vector<Pose>& tile_path, const Pose& seat_goal,
                                   const ObjectDims& tile, const CeilingOpening& opening) {
  CeilingEvaluation out;
  if (tile_path.empty()) return out;
  const Pose plane = seat_goal * translate_z(-tile.height / 2);
  const Pose to_plane = inverse(plane);

  out.containment_ok = true;
  for (std::size_t k = 0; k < tile_path.size() && out.containment_ok; ++k) {
    const int subsamples = k == 0 ? 1 : kSweepSubsamples;
    for (int s = 1; s <= subsamples; ++s) {
      const Pose p = k == 0 ? tile_path[0] : sclerp(tile_path[k - 1], tile_path[k], static_cast<double>(s) / subsamples);
      if (!section_inside(to_plane * p, tile, opening)) {
        out.containment_ok = false;
        out.first_violation = k;
        break;
      }
    }
  }

  const Pose final_in_plane = to_plane * tile_path.back();
  out.tilt = std::acos(std::clamp(final_in_plane.rotation()(2, 2), -1.0, 1.0));
  double zmin = std::numeric_limits<double>::infinity();
  for (const auto& c : box_corners(final_in_plane, tile)) zmin = std::min(zmin, c.z());
  const bool on_lip = std::abs(zmin) <= kSeatContactTolerance;
  // Supported when the tile spans the opening with lip contact on two opposite sides.
  const Vector3d centre = final_in_plane.translation();
  const Matrix3d& r = final_in_plane.rotation();
  const double half_x = 0.5 * (std::abs(r(0, 0)) * tile.length + std::abs(r(0, 1)) * tile.breadth);
  const double half_y = 0.5 * (std::abs(r(1, 0)) * tile.length + std::abs(r(1, 1)) * tile.breadth);
  const bool spans_x = half_x - std::abs(centre.x()) >= opening.width_x / 2 + opening.min_overlap;
  const bool spans_y = half_y - std::abs(centre.y()) >= opening.width_y / 2 + opening.min_overlap;
  const PlacementEvaluation placed = evaluate_placement(tile_path.back(), seat_goal);
  out.seated = on_lip && (spans_x || spans_y) && out.tilt < kPlacementYawThreshold && placed.success;
  out.success = out.containment_ok && out.seated;
  return out;
}

std::vector<Pose> base_stations(const BasePolicy& policy, const GoalSequence& goals) {
  std::vector<Pose> stations(goals.size(), policy.base);
  if (policy.kind == BasePolicyKind::kFixed || goals.empty()) return stations;

  std::mt19937_64 rng(*policy.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vector3d axis = policy.track_axis.normalized();
  const Vector3d origin = goals.front().pose.translation();
  Pose current = policy.base;
  for (std::size_t k = 0; k < goals.size(); ++k) {
    if (k % static_cast<std::size_t>(policy.relocate_every) == 0) {
      const double along = axis.dot(goals[k].pose.translation() - origin);
      const double radius = policy.neighborhood_radius * std::sqrt(unit(rng));
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double yaw = policy.yaw_range * (2.0 * unit(rng) - 1.0);
      const Vector3d position = policy.base.translation() + along * axis +
                                radius * Vector3d(std::cos(angle), std::sin(angle), 0.0);
      current = station_pose(position, yaw, policy.base.rotation());
    }
    stations[k] = current;
  }
  return stations;
}

ActivityReport run_activity(const ActivitySpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const GoalSequence goals = generate_goals(spec.layout);
  const std::vector<Pose> picks = spec.pick_station.poses(static_cast<int>(goals.size()));
  const std::vector<Pose> stations = base_stations(spec.base_policy, goals);
  const Pose grasp_inv = inverse(spec.grasp_offset);

  ActivityReport report;
  report.name = spec.name;
  RobotModel robot = spec.robot;
  JointVector q = spec.q_start;
  for (std::size_t k = 0; k < goals.size(); ++k) {
    robot.base_pose = stations[k];
    const TaskInstance instance{stations[k] * picks[k], goals[k].pose};
    std::vector<Pose> guiding = transfer_constraints(spec.demo_model, instance);
    for (Pose& g : guiding) g = g * spec.grasp_offset;

    const JointTrajectory traj = plan_through_guiding_poses(q, guiding, robot, spec.planner_config);
    const JointVector q_before = q;
    q = final_configuration(traj, q_before);

    PlacementResult p;
    p.index = goals[k].index;
    p.goal = goals[k].pose;
    p.achieved = forward_kinematics(robot, q) * grasp_inv;
    const PlacementEvaluation e = evaluate_placement(p.achieved, p.goal);
    p.position_error = e.position_error;
    p.yaw_error = e.yaw_error;
    p.rotation_error = e.rotation_error;
    p.trajectory_outcome = traj.outcome;
    p.success = e.success && traj.outcome == PlanOutcome::kReached;
    p.steps = traj.steps.size();
    p.recoveries = traj.recoveries;
    p.final_q = q;
    p.base = stations[k];

    // The object rides with the hand from the first guiding pose onward.
    if (!traj.segment_ends.empty()) {
      const std::size_t attach = traj.segment_ends.front();
      p.object_path.push_back((attach == 0 ? forward_kinematics(robot, q_before) : traj.steps[attach - 1].end_effector) *
                              grasp_inv);
      for (std::size_t s = attach; s < traj.steps.size(); ++s) p.object_path.push_back(traj.steps[s].end_effector * grasp_inv);
    }
    if (spec.ceiling) {
      const CeilingEvaluation c = evaluate_ceiling(p.object_path, p.goal, spec.layout.dims, *spec.ceiling);
      p.containment_ok = c.containment_ok;
      p.success = p.success && c.success;
    }
    report.placements.push_back(std::move(p));
    if (traj.outcome != PlanOutcome::kReached) break;
  }
  report = summarize(std::move(report), goals.size());
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

PairedReport compare_baseline(const ActivitySpec& spec) {
  PairedReport out;
  out.name = spec.name;
  out.layout = spec.layout.kind;
  out.goals = generate_goals(spec.layout).size();
  ActivitySpec ours = spec;
  ours.planner_config.mode2_enabled = true;
  ActivitySpec baseline = spec;
  baseline.planner_config.mode2_enabled = false;
  out.ours = run_activity(ours);
  out.baseline = run_activity(baseline);
  return out;
}

void emit_report(const ActivityReport& r, std::ostream& json_out, std::ostream& summary_out) {
  json_out << report_to_json(r).dump(2) << '\n';

  summary_out << "activity: " << r.name << '\n';
  summary_out << "   i   j   k  outcome                 pos_err_m  yaw_err_deg  success\n";
  for (const auto& p : r.placements) {
    summary_out << std::setw(4) << p.index.i << std::setw(4) << p.index.j << std::setw(4) << p.index.k << "  "
                << std::left << std::setw(22) << to_string(p.trajectory_outcome) << std::right << std::setw(11)
                << fixed(p.position_error, 6) << std::setw(13) << degrees(p.yaw_error) << "  "
                << (p.success ? "yes" : "no") << '\n';
  }
  summary_out << "placed before failure: " << r.bricks_placed_before_failure << '\n'
              << "successes: " << r.successes << " / " << r.placements.size() << '\n'
              << "mean position error (m): " << fixed(r.mean_position_error, 6) << '\n'
              << "max yaw error (deg): " << degrees(r.max_yaw_error) << '\n'
              << "completed: " << (r.completed ? "yes" : "no") << '\n'
              << "runtime (s): " << fixed(r.runtime_seconds, 2) << '\n';
}

void emit_report(const PairedReport& r, std::ostream& json_out, std::ostream& summary_out) {
  Json j;
  j["name"] = r.name;
  j["layout"] = to_string(r.layout);
  j["goals"] = r.goals;
  j["ours"] = report_to_json(r.ours);
  j["baseline"] = report_to_json(r.baseline);
  json_out << j.dump(2) << '\n';

  summary_out << std::left << std::setw(28) << "scenario" << std::setw(16) << "layout" << std::setw(8) << "goals"
              << std::setw(10) << "Ours" << "Baseline" << '\n';
  summary_out << std::setw(28) << r.name << std::setw(16) << to_string(r.layout) << std::setw(8) << r.goals
              << std::setw(10) << table_cell(r.ours, r.layout) << table_cell(r.baseline, r.layout) << std::right
              << '\n';
}

void emit_report(const ActivityReport& report, const std::string& path) {
  std::ofstream json = open_out(path);
  std::ofstream summary = open_out(path + ".txt");
  emit_report(report, json, summary);
  check_written(json, path);
  check_written(summary, path + ".txt");
}

void emit_report(const PairedReport& report, const std::string& path) {
  std::ofstream json = open_out(path);
  std::ofstream summary = open_out(path + ".txt");
  emit_report(report, json, summary);
  check_written(json, path);
  check_written(summary, path + ".txt");
}

ActivityReport load_report(std::istream& in) {
  try {
    return report_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformed, e.what());
  }
}

PairedReport load_paired_report(std::istream& in) {
  PairedReport r;
  try {
    const Json j = Json::parse(in);
    r.name = j.at("name").get<std::string>();
    r.layout = layout_kind_from_string(j.at("layout").get<std::string>());
    r.goals = j.at("goals").get<std::size_t>();
    r.ours = report_from_json(j.at("ours"));
    r.baseline = report_from_json(j.at("baseline"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("paired report: ") + e.what());
  }
  return r;
}

ActivitySpec load_activity_spec(const std::string& path) {
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformed, path + ": " + e.what());
  }

  ActivitySpec spec;
  try {
    spec.name = j.value("name", std::filesystem::path(path).stem().string());
    spec.robot = load_robot_model(resolve(dir, j.at("robot").get<std::string>()));
    if (j.contains("q_start_rad")) spec.q_start = joint_vector_from_json(j.at("q_start_rad"));

    const Json& demo = j.at("demo");
    std::ifstream demo_in(resolve(dir, demo.at("file").get<std::string>()));
    if (!demo_in) throw Error(ErrorCode::kIoFailure, "cannot open demonstration " + demo.at("file").get<std::string>());
    const Demonstration d = load_demonstration(demo_in);
    FitTolerance tol;
    tol.rotation = demo.value("rot_tol_rad", tol.rotation);
    tol.translation = demo.value("trans_tol_m", tol.translation);
    spec.demo_model = extract_guiding_poses(segment_demonstration(d, tol), instance_from_demonstration(d),
                                            demo.value("roi_radius_m", kDefaultRoiRadius));

    spec.layout = layout_from_json(j.at("layout"));

    const Json& pick = j.at("pick_station");
    if (pick.contains("poses")) {
      for (const Json& p : pick.at("poses")) spec.pick_station.explicit_poses.push_back(pose_from_json(p));
    } else {
      spec.pick_station.top = pose_from_json(pick.at("top"));
      spec.pick_station.pitch = pick.value("pitch_m", spec.layout.dims.height);
      spec.pick_station.pile_height = pick.value("pile_height", 1);
    }
    if (j.contains("grasp_offset")) spec.grasp_offset = pose_from_json(j.at("grasp_offset"));

    const Json& base = j.at("base_policy");
    BasePolicy& bp = spec.base_policy;
    const std::string kind = base.value("kind", "fixed");
    if (kind != "fixed" && kind != "moving") throw Error(ErrorCode::kInvalidSpec, "base_policy.kind must be fixed or moving");
    bp.kind = kind == "fixed" ? BasePolicyKind::kFixed : BasePolicyKind::kMoving;
    if (base.contains("base")) bp.base = pose_from_json(base.at("base"));
    bp.relocate_every = base.value("relocate_every", bp.relocate_every);
    if (base.contains("track_axis")) {
      const Json& a = base.at("track_axis");
      bp.track_axis = Vector3d(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
    }
    bp.neighborhood_radius = base.value("neighborhood_radius_m", bp.neighborhood_radius);
    bp.yaw_range = base.value("yaw_range_rad", bp.yaw_range);
    if (base.contains("seed")) bp.seed = base.at("seed").get<std::uint64_t>();

    if (j.contains("planner")) spec.planner_config = planner_config_from_json(j.at("planner"));
    if (j.contains("ceiling_opening")) {
      const Json& c = j.at("ceiling_opening");
      CeilingOpening o;
      o.width_x = c.at("width_x_m").get<double>();
      o.width_y = c.at("width_y_m").get<double>();
      o.min_overlap = c.value("min_overlap_m", o.min_overlap);
      spec.ceiling = o;
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformed, path + ": " + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace screwbuild
