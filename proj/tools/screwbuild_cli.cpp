#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "screwbuild/activity_harness.hpp"
#include "screwbuild/error.hpp"
#include "screwbuild/serialization.hpp"

using namespace screwbuild;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path);
  return out;
}

int segment(const std::string& demo_path, const FitTolerance& tol, const std::string& out_path) {
  std::ifstream in = open_in(demo_path);
  const Demonstration demo = load_demonstration(in);
  const auto segments = segment_demonstration(demo, tol);
  std::ofstream out = open_out(out_path);
  write_segments(out, segments);
  std::cout << segments.size() << " segments\n";
  return 0;
}

int layout(const std::string& spec_path, const std::string& out_path) {
  const LayoutSpec spec = layout_from_json(Json::parse(read_file(spec_path)));
  const GoalSequence goals = generate_goals(spec);
  std::ofstream out = open_out(out_path);
  write_goals(out, goals);
  std::cout << goals.size() << " goals\n";
  return 0;
}

int plan(const std::string& robot_path, const std::string& guiding_path, const std::vector<double>& q0,
         bool no_mode2, const std::string& out_path) {
  const RobotModel robot = load_robot_model(robot_path);
  std::ifstream in = open_in(guiding_path);
  const std::vector<Pose> guiding = read_poses(in);
  JointVector q = Eigen::Map<const JointVector>(q0.data());
  PlannerConfig config;
  config.mode2_enabled = !no_mode2;
  const JointTrajectory traj = plan_through_guiding_poses(q, guiding, robot, config);
  std::ofstream out = open_out(out_path);
  write_trajectory(out, traj);
  std::cout << to_string(traj.outcome) << " after " << traj.steps.size() << " steps, " << traj.recoveries
            << " recoveries\n";
  return traj.outcome == PlanOutcome::kReached ? 0 : 1;
}

int run_activity_cmd(const std::string& spec_path, const std::string& out_path) {
  const ActivityReport report = run_activity(load_activity_spec(spec_path));
  emit_report(report, out_path);
  std::ostream discard(nullptr);
  emit_report(report, discard, std::cout);
  return report.completed ? 0 : 1;
}

int compare_baseline_cmd(const std::string& spec_path, const std::string& out_path) {
  const PairedReport report = compare_baseline(load_activity_spec(spec_path));
  emit_report(report, out_path);
  std::ostream discard(nullptr);
  emit_report(report, discard, std::cout);
  return report.ours.completed && report.baseline.completed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screw-based construction activity planner"};
  app.require_subcommand(1);

  std::string demo_path, out_path, spec_path, robot_path, guiding_path;
  FitTolerance tol;
  std::vector<double> q0;
  bool no_mode2 = false;

  auto* seg = app.add_subcommand("segment", "Segment a demonstration into constant screw motions");
  seg->add_option("--demo", demo_path, "Demonstration file")->required();
  seg->add_option("--rot-tol", tol.rotation, "Rotation tolerance (rad)")->capture_default_str();
  seg->add_option("--trans-tol", tol.translation, "Translation tolerance (m)")->capture_default_str();
  seg->add_option("--out", out_path, "Segments file")->required();

  auto* lay = app.add_subcommand("layout", "Generate the goal sequence of a layout");
  lay->add_option("--spec", spec_path, "Layout spec (JSON)")->required();
  lay->add_option("--out", out_path, "Goals file")->required();

  auto* pl = app.add_subcommand("plan", "Plan through a list of guiding end-effector poses");
  pl->add_option("--robot", robot_path, "Robot model file")->required();
  pl->add_option("--guiding", guiding_path, "Guiding poses file")->required();
  pl->add_option("--q0", q0, "Start configuration (7 values, rad)")->required()->expected(kNumJoints);
  pl->add_flag("--no-mode2", no_mode2, "Disable joint-limit recovery");
  pl->add_option("--out", out_path, "Trajectory file")->required();

  auto* run = app.add_subcommand("run-activity", "Execute a construction activity");
  run->add_option("--spec", spec_path, "Activity spec (JSON)")->required();
  run->add_option("--out", out_path, "Report file")->required();

  auto* cmp = app.add_subcommand("compare-baseline", "Run an activity with and without joint-limit recovery");
  cmp->add_option("--spec", spec_path, "Activity spec (JSON)")->required();
  cmp->add_option("--out", out_path, "Paired report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*seg) return segment(demo_path, tol, out_path);
    if (*lay) return layout(spec_path, out_path);
    if (*pl) return plan(robot_path, guiding_path, q0, no_mode2, out_path);
    if (*run) return run_activity_cmd(spec_path, out_path);
    if (*cmp) return compare_baseline_cmd(spec_path, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: MALFORMED: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
