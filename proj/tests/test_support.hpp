#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "screwbuild/demo_pipeline.hpp"
#include "screwbuild/kinematics.hpp"
#include "screwbuild/screw_algebra.hpp"
#include "screwbuild/serialization.hpp"

namespace screwbuild::testing {

inline std::string data_path(const std::string& rel) { return std::string(SCREWBUILD_DATA_DIR) + "/" + rel; }

inline const RobotModel& panda() {
  static const RobotModel model = load_robot_model(data_path("panda_like.json"));
  return model;
}

// 4x4 matrix of a linear-first twist.
inline Matrix4d hat(const Vector6d& xi) {
  Matrix4d m = Matrix4d::Zero();
  m(0, 1) = -xi(5); m(0, 2) = xi(4);
  m(1, 0) = xi(5);  m(1, 2) = -xi(3);
  m(2, 0) = -xi(4); m(2, 1) = xi(3);
  m.topRightCorner<3, 1>() = xi.head<3>();
  return m;
}

// General-purpose matrix exponential / logarithm, used as a reference.
inline Pose oracle_exp(const Vector6d& xi) { return Pose::from_matrix(hat(xi).exp()); }

inline Vector6d oracle_log(const Pose& p) {
  const Matrix4d l = p.matrix().log();
  Vector6d xi;
  xi << l(0, 3), l(1, 3), l(2, 3), l(2, 1), l(0, 2), l(1, 0);
  return xi;
}

inline Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector3d v(n(rng), n(rng), n(rng));
  return v.normalized();
}

inline Pose random_pose(std::mt19937_64& rng, double reach = 1.0) {
  std::uniform_real_distribution<double> u(-reach, reach);
  std::uniform_real_distribution<double> ang(0.0, std::numbers::pi);
  return {Eigen::AngleAxisd(ang(rng), random_unit(rng)).toRotationMatrix(), Vector3d(u(rng), u(rng), u(rng))};
}

inline Matrix3d rot_z(double a) { return Eigen::AngleAxisd(a, Vector3d::UnitZ()).toRotationMatrix(); }
inline Matrix3d rot_y(double a) { return Eigen::AngleAxisd(a, Vector3d::UnitY()).toRotationMatrix(); }

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

// Modified-DH chain of the shipped arm, written independently of the
// product-of-exponentials model.
inline Pose dh_fk(const JointVector& q) {
  static const double a[7] = {0, 0, 0, 0.0825, -0.0825, 0, 0.088};
  static const double d[7] = {0.333, 0, 0.316, 0, 0.384, 0, 0};
  static const double alpha[7] = {0, -std::numbers::pi / 2, std::numbers::pi / 2, std::numbers::pi / 2,
                                  -std::numbers::pi / 2, std::numbers::pi / 2, std::numbers::pi / 2};
  Matrix4d t = Matrix4d::Identity();
  for (int i = 0; i < 7; ++i) {
    const double ca = std::cos(alpha[i]), sa = std::sin(alpha[i]);
    const double ct = std::cos(q(i)), st = std::sin(q(i));
    Matrix4d link;
    link << ct, -st, 0, a[i],
            st * ca, ct * ca, -sa, -d[i] * sa,
            st * sa, ct * sa, ca, d[i] * ca,
            0, 0, 0, 1;
    t = t * link;
  }
  Matrix4d flange = Matrix4d::Identity();
  flange(2, 3) = 0.107;
  Matrix4d hand = Matrix4d::Identity();
  hand.topLeftCorner<3, 3>() = rot_z(-std::numbers::pi / 4);
  hand(2, 3) = 0.1034;
  return Pose::from_matrix(t * flange * hand);
}

inline JointVector random_config(std::mt19937_64& rng, const RobotModel& model, double margin = 0.3) {
  JointVector q;
  for (int i = 0; i < kNumJoints; ++i)
    q(i) = std::uniform_real_distribution<double>(model.limits[i].lower + margin, model.limits[i].upper - margin)(rng);
  return q;
}

inline JointVector ready_config() {
  JointVector q;
  q << 0.0, -std::numbers::pi / 4, 0.0, -3 * std::numbers::pi / 4, 0.0, std::numbers::pi / 2, std::numbers::pi / 4;
  return q;
}

// Samples a chain of constant screws between key poses, `per_segment`
// samples each, on the screw parameter.
inline Demonstration screw_chain_demo(const std::vector<Pose>& keys, int per_segment) {
  Demonstration d;
  d.object_id = "synthetic";
  d.samples.push_back({0.0, keys.front()});
  double t = 0.0;
  for (std::size_t s = 0; s + 1 < keys.size(); ++s) {
    const Vector6d xi = oracle_log(keys[s + 1] * inverse(keys[s]));
    for (int n = 1; n <= per_segment; ++n) {
      t += 0.01;
      d.samples.push_back({t, oracle_exp(xi * (static_cast<double>(n) / per_segment)) * keys[s]});
    }
  }
  return d;
}

struct GeodesicDistance {
  double tau = 0.0;
  double translation = 0.0;
  double rotation = 0.0;
};

// Closest point of `p` to the constant-screw path from `a` to `b`, by a grid
// over τ refined with golden-section search on trans + 0.1 · rot.
inline GeodesicDistance geodesic_distance(const Pose& a, const Pose& b, const Pose& p) {
  const Vector6d xi = oracle_log(b * inverse(a));
  auto at = [&](double tau) {
    const Pose g = Pose::from_matrix((hat(xi) * tau).exp()) * a;
    const Matrix3d rel = g.rotation().transpose() * p.rotation();
    const double rot = std::acos(std::clamp(0.5 * (rel.trace() - 1.0), -1.0, 1.0));
    return GeodesicDistance{tau, (g.translation() - p.translation()).norm(), rot};
  };
  auto cost = [](const GeodesicDistance& d) { return d.translation + 0.1 * d.rotation; };
  constexpr int kGrid = 200;
  GeodesicDistance best = at(0.0);
  for (int n = 1; n <= kGrid; ++n) {
    const GeodesicDistance d = at(static_cast<double>(n) / kGrid);
    if (cost(d) < cost(best)) best = d;
  }
  double lo = std::max(0.0, best.tau - 1.0 / kGrid), hi = std::min(1.0, best.tau + 1.0 / kGrid);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 40; ++it) {
    const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
    if (cost(at(m1)) < cost(at(m2))) hi = m2;
    else lo = m1;
  }
  const GeodesicDistance refined = at(0.5 * (lo + hi));
  return cost(refined) < cost(best) ? refined : best;
}

}  // namespace screwbuild::testing
