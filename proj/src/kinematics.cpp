#include "screwbuild/kinematics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "screwbuild/error.hpp"

namespace screwbuild {

namespace {

constexpr double kSewDegenerateDistance = 1e-6;  // meters
constexpr double kSewReferenceFallbackAngle = 1e-6;

// partial[i] = base ∘ e^{ξ₁q₁} ⋯ e^{ξᵢqᵢ}
struct Chain {
  std::array<Pose, kNumJoints + 1> partial;
};

Chain chain(const RobotModel& model, const JointVector& q) {
  Chain c;
  c.partial[0] = model.base_pose;
  for (int i = 0; i < kNumJoints; ++i)
    c.partial[i + 1] = c.partial[i] * exp_screw(model.joint_twists[i], q(i));
  return c;
}

SpatialJacobian jacobian_from_chain(const RobotModel& model, const Chain& c) {
  SpatialJacobian j;
  for (int i = 0; i < kNumJoints; ++i)
    j.col(i) = adjoint(c.partial[i]) * model.joint_twists[i].coordinates();
  return j;
}

Vector3d point_position(const Chain& c, const SewPoint& p) { return c.partial[p.frame].apply(p.point); }

Eigen::Matrix<double, 3, kNumJoints> point_jacobian(const SpatialJacobian& js, const SewPoint& p,
                                                    const Vector3d& position) {
  Eigen::Matrix<double, 3, kNumJoints> jp = Eigen::Matrix<double, 3, kNumJoints>::Zero();
  for (int i = 0; i < p.frame; ++i)
    jp.col(i) = js.col(i).head<3>() + js.col(i).tail<3>().cross(position);
  return jp;
}

struct SewGeometry {
  double psi = 0.0;
  Eigen::RowVector3d d_shoulder;
  Eigen::RowVector3d d_elbow;
  Eigen::RowVector3d d_wrist;
};

SewGeometry sew_geometry(const SewPoints& pts, const Matrix3d& base_rotation) {
  const Vector3d a = pts.wrist - pts.shoulder;
  const double n = a.norm();
  if (n < kSewDegenerateDistance) throw Error(ErrorCode::kSewSingular, "wrist coincides with shoulder");
  const Vector3d e = a / n;

  Vector3d z = base_rotation.col(2);
  if (e.cross(z).norm() < std::sin(kSewReferenceFallbackAngle)) z = base_rotation.col(0);

  const Vector3d b = pts.elbow - pts.shoulder;
  const Vector3d d = b - b.dot(e) * e;
  if (d.norm() < kSewDegenerateDistance)
    throw Error(ErrorCode::kSewSingular, "elbow on the shoulder-wrist axis");

  const Vector3d u = z - z.dot(e) * e;
  const double un = u.norm();
  const Vector3d r = u / un;
  const Vector3d s = e.cross(r);
  const double x = r.dot(d);
  const double y = s.dot(d);
  const double rho2 = x * x + y * y;

  SewGeometry g;
  g.psi = std::atan2(y, x);

  const Matrix3d id = Matrix3d::Identity();
  const Matrix3d de = (id - e * e.transpose()) / n;
  const Matrix3d dd = -(e * b.transpose() + b.dot(e) * id) * de;
  const Matrix3d du = -(e * z.transpose() + z.dot(e) * id) * de;
  const Matrix3d dr = (id - r * r.transpose()) * du / un;
  const Matrix3d ds = -skew(r) * de + skew(e) * dr;
  const Eigen::RowVector3d dx = d.transpose() * dr + r.transpose() * dd;
  const Eigen::RowVector3d dy = d.transpose() * ds + s.transpose() * dd;
  const Eigen::RowVector3d grad_axis = (x * dy - y * dx) / rho2;

  g.d_elbow = e.cross(d).transpose() / rho2;
  g.d_wrist = grad_axis;
  g.d_shoulder = -grad_axis - g.d_elbow;
  return g;
}

SewPoints sew_points_from_chain(const RobotModel& model, const Chain& c) {
  return {point_position(c, model.shoulder), point_position(c, model.elbow), point_position(c, model.wrist)};
}

}  // namespace

void RobotModel::validate() const {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!(limits[i].lower < limits[i].upper))
      throw Error(ErrorCode::kInvalidSpec, "joint " + std::to_string(i + 1) + " has lower >= upper");
    const UnitTwist& t = joint_twists[i];
    const double wn = t.angular.norm();
    const bool ok = std::abs(wn - 1.0) < 1e-9 || (wn < 1e-12 && std::abs(t.linear.norm() - 1.0) < 1e-9);
    if (!ok) throw Error(ErrorCode::kInvalidSpec, "joint " + std::to_string(i + 1) + " twist is not a unit twist");
  }
  if (!(0 <= shoulder.frame && shoulder.frame < elbow.frame && elbow.frame < wrist.frame &&
        wrist.frame <= kNumJoints))
    throw Error(ErrorCode::kInvalidSpec, "SEW frames must be distinct and ordered along the chain");
  if (!home_pose.is_valid() || !base_pose.is_valid())
    throw Error(ErrorCode::kInvalidSpec, "home or base pose is not a rigid transform");
}

Pose forward_kinematics(const RobotModel& model, const JointVector& q) {
  return chain(model, q).partial[kNumJoints] * model.home_pose;
}

SpatialJacobian spatial_jacobian(const RobotModel& model, const JointVector& q) {
  return jacobian_from_chain(model, chain(model, q));
}

PseudoInverse pseudoinverse(const Eigen::MatrixXd& j) {
  const Eigen::Index m = j.rows();
  const Eigen::Index n = j.cols();
  PseudoInverse out;
  if (m == 0 || n == 0) {
    out.matrix = Eigen::MatrixXd::Zero(n, m);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  out.min_singular_value = svd.singularValues().minCoeff();
  const bool wide = m <= n;
  out.damped = out.min_singular_value < kPinvSigmaThreshold;
  const double damping = out.damped ? kPinvDamping * kPinvDamping : 0.0;
  if (wide) {
    Eigen::MatrixXd gram = j * j.transpose();
    gram.diagonal().array() += damping;
    out.matrix = j.transpose() * gram.ldlt().solve(Eigen::MatrixXd::Identity(m, m));
  } else {
    Eigen::MatrixXd gram = j.transpose() * j;
    gram.diagonal().array() += damping;
    out.matrix = gram.ldlt().solve(j.transpose());
  }
  return out;
}

SewPoints sew_points(const RobotModel& model, const JointVector& q) {
  return sew_points_from_chain(model, chain(model, q));
}

double sew_angle(const RobotModel& model, const JointVector& q) {
  return sew_geometry(sew_points(model, q), model.base_pose.rotation()).psi;
}

SewJacobian sew_jacobian(const RobotModel& model, const JointVector& q) {
  const Chain c = chain(model, q);
  const SpatialJacobian js = jacobian_from_chain(model, c);
  const SewPoints pts = sew_points_from_chain(model, c);
  const SewGeometry g = sew_geometry(pts, model.base_pose.rotation());
  return g.d_shoulder * point_jacobian(js, model.shoulder, pts.shoulder) +
         g.d_elbow * point_jacobian(js, model.elbow, pts.elbow) +
         g.d_wrist * point_jacobian(js, model.wrist, pts.wrist);
}

AugmentedJacobian augmented_jacobian(const RobotModel& model, const JointVector& q) {
  const Chain c = chain(model, q);
  const SpatialJacobian js = jacobian_from_chain(model, c);
  const SewPoints pts = sew_points_from_chain(model, c);
  const SewGeometry g = sew_geometry(pts, model.base_pose.rotation());
  AugmentedJacobian ja;
  ja.topRows<6>() = js;
  ja.row(6) = g.d_shoulder * point_jacobian(js, model.shoulder, pts.shoulder) +
              g.d_elbow * point_jacobian(js, model.elbow, pts.elbow) +
              g.d_wrist * point_jacobian(js, model.wrist, pts.wrist);
  return ja;
}

void check_limit_margins(const RobotModel& model, double eps_in, double eps_out) {
  double min_range = model.limits[0].upper - model.limits[0].lower;
  for (const auto& l : model.limits) min_range = std::min(min_range, l.upper - l.lower);
  if (!(0.0 < eps_out && eps_out < eps_in && eps_in < 0.5 * min_range))
    throw Error(ErrorCode::kBadEps, "need 0 < eps_out < eps_in < half the smallest joint range");
}

LimitStatus limit_status(const JointVector& q, const RobotModel& model, double eps_in, double eps_out) {
  check_limit_margins(model, eps_in, eps_out);
  LimitStatus status;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointLimit& l = model.limits[i];
    LimitClass c = LimitClass::kOutsideOuter;
    if (l.lower + eps_in <= q(i) && q(i) <= l.upper - eps_in) {
      c = LimitClass::kWithinInner;
    } else if (l.lower + eps_out <= q(i) && q(i) <= l.upper - eps_out) {
      c = LimitClass::kBetweenBounds;
    }
    status.joints[i] = c;
    status.worst = std::max(status.worst, c);
  }
  return status;
}

JointVector inner_margins(const JointVector& q, const RobotModel& model, double eps_in) {
  JointVector m;
  for (int i = 0; i < kNumJoints; ++i) {
    const JointLimit& l = model.limits[i];
    m(i) = std::min(q(i) - (l.lower + eps_in), (l.upper - eps_in) - q(i));
  }
  return m;
}

}  // namespace screwbuild
