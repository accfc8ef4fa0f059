#include "screwbuild/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "screwbuild/error.hpp"

namespace screwbuild {

namespace {

Vector3d vec3_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kMalformed, std::string(what) + " must be 3 numbers");
  Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::kMalformed, std::string(what) + " must be 3 numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("field '") + key + "': " + e.what());
  }
}

Json parse_line(const std::string& line) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformed, e.what());
  }
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

Json pose_to_json(const Pose& pose) {
  const Quaterniond q = pose.quaternion();
  Json j;
  j["t"] = vec_to_json(pose.translation());
  j["q"] = Json::array({q.w(), q.x(), q.y(), q.z()});
  return j;
}

Pose pose_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("t") || !j.contains("q"))
    throw Error(ErrorCode::kMalformed, "pose needs 't' and 'q'");
  const Vector3d t = vec3_from_json(j.at("t"), "pose.t");
  const Json& qj = j.at("q");
  if (!qj.is_array() || qj.size() != 4) throw Error(ErrorCode::kMalformed, "pose.q must be 4 numbers");
  double c[4];
  for (int i = 0; i < 4; ++i) {
    if (!qj[i].is_number()) throw Error(ErrorCode::kMalformed, "pose.q must be 4 numbers");
    c[i] = qj[i].get<double>();
  }
  const Quaterniond q(c[0], c[1], c[2], c[3]);
  if (!std::isfinite(q.norm()) || std::abs(q.norm() - 1.0) > kMaxQuaternionDrift)
    throw Error(ErrorCode::kBadQuaternion, "quaternion norm drifts more than 1e-3 from 1");
  if (!t.allFinite()) throw Error(ErrorCode::kMalformed, "pose.t is not finite");
  return Pose::from_quaternion(q, t);
}

Json screw_to_json(const ScrewDisplacement& screw) {
  Json j;
  j["axis"] = vec_to_json(screw.axis);
  j["moment"] = vec_to_json(screw.moment);
  j["pitch"] = screw.infinite_pitch() ? Json(nullptr) : Json(screw.pitch);
  j["magnitude"] = screw.magnitude;
  return j;
}

Json segment_to_json(const ScrewSegment& segment) {
  Json j;
  j["start"] = segment.start_index;
  j["end"] = segment.end_index;
  j["screw"] = screw_to_json(segment.screw);
  j["start_pose"] = pose_to_json(segment.start_pose);
  j["end_pose"] = pose_to_json(segment.end_pose);
  return j;
}

void write_segments(std::ostream& out, const std::vector<ScrewSegment>& segments) {
  for (const ScrewSegment& s : segments) out << segment_to_json(s).dump() << '\n';
}

void write_demonstration(std::ostream& out, const Demonstration& demo) {
  Json header;
  header["object_id"] = demo.object_id;
  header["units"] = "m";
  out << header.dump() << '\n';
  for (const DemoSample& s : demo.samples) {
    Json r;
    r["t"] = s.time;
    r["pose"] = pose_to_json(s.pose);
    out << r.dump() << '\n';
  }
}

std::string_view to_string(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::kStraightWall: return "straight_wall";
    case LayoutKind::kCurvedWall: return "curved_wall";
    case LayoutKind::kCornerWall: return "corner_wall";
    case LayoutKind::kCeilingGrid: return "ceiling_grid";
  }
  return "straight_wall";
}

LayoutKind layout_kind_from_string(std::string_view s) {
  if (s == "straight_wall") return LayoutKind::kStraightWall;
  if (s == "curved_wall") return LayoutKind::kCurvedWall;
  if (s == "corner_wall") return LayoutKind::kCornerWall;
  if (s == "ceiling_grid") return LayoutKind::kCeilingGrid;
  throw Error(ErrorCode::kInvalidSpec, "unknown layout kind '" + std::string(s) + "'");
}

Json layout_to_json(const LayoutSpec& spec) {
  Json j;
  j["kind"] = to_string(spec.kind);
  j["base"] = pose_to_json(spec.base);
  j["layers"] = spec.layers;
  j["per_layer"] = spec.per_layer;
  j["layer_offset_x_m"] = spec.layer_offset_x;
  j["layer_offset_y_m"] = spec.layer_offset_y;
  j["spacing_length_m"] = spec.spacing_length;
  j["spacing_breadth_m"] = spec.spacing_breadth;
  j["spacing_height_m"] = spec.spacing_height;
  j["per_step_yaw_rad"] = spec.per_step_yaw;
  j["corner_index"] = spec.corner_index;
  j["dims_m"] = {{"length", spec.dims.length}, {"breadth", spec.dims.breadth}, {"height", spec.dims.height}};
  j["layer_offset_mode"] = spec.offset_mode == LayerOffsetMode::kAlternating ? "alternating" : "cumulative";
  return j;
}

LayoutSpec layout_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kMalformed, "layout spec must be an object");
  LayoutSpec s;
  s.kind = layout_kind_from_string(get_or<std::string>(j, "kind", "straight_wall"));
  if (j.contains("base")) s.base = pose_from_json(j.at("base"));
  s.layers = get_or(j, "layers", s.layers);
  s.per_layer = get_or(j, "per_layer", s.per_layer);
  s.layer_offset_x = get_or(j, "layer_offset_x_m", s.layer_offset_x);
  s.layer_offset_y = get_or(j, "layer_offset_y_m", s.layer_offset_y);
  s.spacing_length = get_or(j, "spacing_length_m", s.spacing_length);
  s.spacing_breadth = get_or(j, "spacing_breadth_m", s.spacing_breadth);
  s.spacing_height = get_or(j, "spacing_height_m", s.spacing_height);
  s.per_step_yaw = get_or(j, "per_step_yaw_rad", s.per_step_yaw);
  if (j.contains("per_step_yaw_deg")) s.per_step_yaw = j.at("per_step_yaw_deg").get<double>() * std::numbers::pi / 180.0;
  s.corner_index = get_or(j, "corner_index", s.corner_index);
  if (j.contains("dims_m")) {
    const Json& d = j.at("dims_m");
    s.dims.length = get_or(d, "length", s.dims.length);
    s.dims.breadth = get_or(d, "breadth", s.dims.breadth);
    s.dims.height = get_or(d, "height", s.dims.height);
  }
  const std::string mode = get_or<std::string>(j, "layer_offset_mode", "alternating");
  if (mode == "alternating") {
    s.offset_mode = LayerOffsetMode::kAlternating;
  } else if (mode == "cumulative") {
    s.offset_mode = LayerOffsetMode::kCumulative;
  } else {
    throw Error(ErrorCode::kInvalidSpec, "layer_offset_mode must be alternating or cumulative");
  }
  return s;
}

void write_goals(std::ostream& out, const GoalSequence& goals) {
  for (const Goal& g : goals) {
    Json r;
    r["index"] = Json::array({g.index.i, g.index.j, g.index.k});
    r["pose"] = pose_to_json(g.pose);
    out << r.dump() << '\n';
  }
}

GoalSequence read_goals(std::istream& in) {
  GoalSequence goals;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const Json r = parse_line(line);
    if (!r.is_object() || !r.contains("index") || !r.contains("pose") || r.at("index").size() != 3)
      throw Error(ErrorCode::kMalformed, "goal record needs 'index' [i,j,k] and 'pose'");
    Goal g;
    const Json& idx = r.at("index");
    g.index = {idx[0].get<int>(), idx[1].get<int>(), idx[2].get<int>()};
    g.pose = pose_from_json(r.at("pose"));
    goals.push_back(g);
  }
  return goals;
}

void write_poses(std::ostream& out, const std::vector<Pose>& poses) {
  for (const Pose& p : poses) out << pose_to_json(p).dump() << '\n';
}

std::vector<Pose> read_poses(std::istream& in) {
  std::vector<Pose> poses;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    poses.push_back(pose_from_json(parse_line(line)));
  }
  return poses;
}

Json robot_model_to_json(const RobotModel& model) {
  Json j;
  j["name"] = model.name;
  Json joints = Json::array();
  for (int i = 0; i < kNumJoints; ++i) {
    Json jt;
    jt["twist"] = vec_to_json(model.joint_twists[i].coordinates());
    jt["lower"] = model.limits[i].lower;
    jt["upper"] = model.limits[i].upper;
    joints.push_back(jt);
  }
  j["joints"] = joints;
  j["home_pose"] = pose_to_json(model.home_pose);
  j["base_pose"] = pose_to_json(model.base_pose);
  auto sew = [](const SewPoint& p) {
    Json s;
    s["frame"] = p.frame;
    s["point"] = vec_to_json(p.point);
    return s;
  };
  j["sew"] = {{"shoulder", sew(model.shoulder)}, {"elbow", sew(model.elbow)}, {"wrist", sew(model.wrist)}};
  return j;
}

RobotModel robot_model_from_json(const Json& j) {
  RobotModel m;
  try {
    m.name = get_or<std::string>(j, "name", "");
    const Json& joints = j.at("joints");
    if (!joints.is_array() || joints.size() != kNumJoints)
      throw Error(ErrorCode::kMalformed, "robot model needs exactly 7 joints");
    for (int i = 0; i < kNumJoints; ++i) {
      const Json& jt = joints[i];
      const Json& tw = jt.at("twist");
      if (!tw.is_array() || tw.size() != 6) throw Error(ErrorCode::kMalformed, "joint twist must be 6 numbers");
      Vector6d xi;
      for (int k = 0; k < 6; ++k) xi(k) = tw[k].get<double>();
      m.joint_twists[i] = UnitTwist::from_coordinates(xi);
      m.limits[i] = {jt.at("lower").get<double>(), jt.at("upper").get<double>()};
    }
    m.home_pose = pose_from_json(j.at("home_pose"));
    if (j.contains("base_pose")) m.base_pose = pose_from_json(j.at("base_pose"));
    auto sew = [](const Json& s) { return SewPoint{s.at("frame").get<int>(), vec3_from_json(s.at("point"), "sew point")}; };
    const Json& s = j.at("sew");
    m.shoulder = sew(s.at("shoulder"));
    m.elbow = sew(s.at("elbow"));
    m.wrist = sew(s.at("wrist"));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("robot model: ") + e.what());
  }
  m.validate();
  return m;
}

RobotModel load_robot_model(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return robot_model_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kMalformed, path + ": " + e.what());
  }
}

Json planner_config_to_json(const PlannerConfig& c) {
  Json j;
  j["eps_in_rad"] = c.eps_in;
  j["eps_out_rad"] = c.eps_out;
  j["kappa"] = c.kappa;
  j["lambda"] = c.lambda;
  j["delta_t_s"] = c.delta_t;
  j["goal_tol_rad"] = c.goal_tol.rotation;
  j["goal_tol_m"] = c.goal_tol.translation;
  j["max_steps"] = c.max_steps;
  j["sew_step_rad"] = c.sew_step;
  j["sew_range_rad"] = c.sew_range;
  j["sew_tolerance_rad"] = c.sew_tolerance;
  j["recovery_margin_rad"] = c.recovery_margin;
  j["max_joint_step_rad"] = c.max_joint_step;
  j["mode2_enabled"] = c.mode2_enabled;
  return j;
}

PlannerConfig planner_config_from_json(const Json& j, const PlannerConfig& defaults) {
  if (!j.is_object()) throw Error(ErrorCode::kMalformed, "planner config must be an object");
  PlannerConfig c = defaults;
  c.eps_in = get_or(j, "eps_in_rad", c.eps_in);
  c.eps_out = get_or(j, "eps_out_rad", c.eps_out);
  c.kappa = get_or(j, "kappa", c.kappa);
  c.lambda = get_or(j, "lambda", c.lambda);
  c.delta_t = get_or(j, "delta_t_s", c.delta_t);
  c.goal_tol.rotation = get_or(j, "goal_tol_rad", c.goal_tol.rotation);
  c.goal_tol.translation = get_or(j, "goal_tol_m", c.goal_tol.translation);
  c.max_steps = get_or(j, "max_steps", c.max_steps);
  c.sew_step = get_or(j, "sew_step_rad", c.sew_step);
  c.sew_range = get_or(j, "sew_range_rad", c.sew_range);
  c.sew_tolerance = get_or(j, "sew_tolerance_rad", c.sew_tolerance);
  c.recovery_margin = get_or(j, "recovery_margin_rad", c.recovery_margin);
  c.max_joint_step = get_or(j, "max_joint_step_rad", c.max_joint_step);
  c.mode2_enabled = get_or(j, "mode2_enabled", c.mode2_enabled);
  return c;
}

std::string_view to_string(PlanOutcome outcome) {
  switch (outcome) {
    case PlanOutcome::kReached: return "REACHED";
    case PlanOutcome::kMotionPlanFailed: return "MOTION_PLAN_FAILED";
    case PlanOutcome::kStepBudgetExhausted: return "STEP_BUDGET_EXHAUSTED";
  }
  return "REACHED";
}

std::string_view to_string(StepMode mode) { return mode == StepMode::kMode1 ? "MODE1" : "MODE2"; }

PlanOutcome plan_outcome_from_string(std::string_view s) {
  if (s == "REACHED") return PlanOutcome::kReached;
  if (s == "MOTION_PLAN_FAILED") return PlanOutcome::kMotionPlanFailed;
  if (s == "STEP_BUDGET_EXHAUSTED") return PlanOutcome::kStepBudgetExhausted;
  throw Error(ErrorCode::kMalformed, "unknown plan outcome '" + std::string(s) + "'");
}

Json joint_vector_to_json(const JointVector& q) { return vec_to_json(q); }

JointVector joint_vector_from_json(const Json& j) {
  if (!j.is_array() || j.size() != kNumJoints) throw Error(ErrorCode::kMalformed, "joint vector must be 7 numbers");
  JointVector q;
  for (int i = 0; i < kNumJoints; ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::kMalformed, "joint vector must be 7 numbers");
    q(i) = j[i].get<double>();
  }
  return q;
}

void write_trajectory(std::ostream& out, const JointTrajectory& traj) {
  Json header;
  header["outcome"] = to_string(traj.outcome);
  header["steps"] = traj.steps.size();
  header["segment_ends"] = traj.segment_ends;
  header["recoveries"] = traj.recoveries;
  header["singular_steps"] = traj.singular_steps;
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const TrajectoryStep& s = traj.steps[i];
    Json r;
    r["step"] = i + 1;
    r["mode"] = to_string(s.mode);
    r["q"] = joint_vector_to_json(s.q);
    r["pose"] = pose_to_json(s.end_effector);
    out << r.dump() << '\n';
  }
}

JointTrajectory read_trajectory(std::istream& in) {
  JointTrajectory traj;
  std::string line;
  bool have_header = false;
  std::size_t expected = 0;
  try {
    while (std::getline(in, line)) {
      if (blank(line)) continue;
      const Json r = parse_line(line);
      if (!have_header) {
        traj.outcome = plan_outcome_from_string(r.at("outcome").get<std::string>());
        expected = r.at("steps").get<std::size_t>();
        traj.segment_ends = get_or(r, "segment_ends", std::vector<std::size_t>{});
        traj.recoveries = get_or(r, "recoveries", 0);
        traj.singular_steps = get_or(r, "singular_steps", 0);
        have_header = true;
        continue;
      }
      TrajectoryStep s;
      const std::string mode = r.at("mode").get<std::string>();
      if (mode != "MODE1" && mode != "MODE2") throw Error(ErrorCode::kMalformed, "unknown step mode " + mode);
      s.mode = mode == "MODE1" ? StepMode::kMode1 : StepMode::kMode2;
      s.q = joint_vector_from_json(r.at("q"));
      s.end_effector = pose_from_json(r.at("pose"));
      traj.steps.push_back(s);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kMalformed, std::string("trajectory: ") + e.what());
  }
  if (!have_header) throw Error(ErrorCode::kMalformed, "trajectory file has no header");
  if (traj.steps.size() != expected) throw Error(ErrorCode::kMalformed, "trajectory step count mismatch");
  return traj;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace screwbuild
