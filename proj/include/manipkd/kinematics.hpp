// Copyright 2026 The manipkd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef MANIPKD_KINEMATICS_HPP_
#define MANIPKD_KINEMATICS_HPP_

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/model.hpp"
#include "manipkd/pose.hpp"

namespace manipkd {

using JointVector = Eigen::VectorXd;

/// End-effector spatial velocity, stacked linear-above-angular.
struct Twist {
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> v;
    v << linear, angular;
    return v;
  }
  static Twist from_stacked(const Eigen::Matrix<double, 6, 1>& v) {
    return Twist{v.head<3>(), v.tail<3>()};
  }
};

/// 6 x n geometric Jacobian; rows 0-2 are the linear block, rows 3-5 the
/// angular block.
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

inline Eigen::Matrix3d rot_x(double t) {
  double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

inline Eigen::Matrix3d rot_y(double t) {
  double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix3d r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

inline Eigen::Matrix3d rot_z(double t) {
  double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

namespace detail {

inline void check_dof(const RobotModel& model, const Eigen::VectorXd& q,
                      const char* what) {
  if (static_cast<std::size_t>(q.size()) != model.dof())
    throw std::invalid_argument(
        std::string(what) + ": expected " + std::to_string(model.dof()) +
        " joint values, got " + std::to_string(q.size()));
}

}  // namespace detail

/// Single-link transform T^{k-1}_k for one DH row:
/// Rot_z(theta) * Trans_z(d) * Trans_x(a) * Rot_x(alpha).
/// Revolute: theta = qi + theta_offset. Prismatic: d = qi + d,
/// theta = theta_offset.
inline Pose dh_transform(const DhRow& row, JointKind kind, double qi) {
  double theta = row.theta_offset;
  double d = row.d;
  if (kind == JointKind::kRevolute)
    theta += qi;
  else
    d += qi;
  double ct = std::cos(theta), st = std::sin(theta);
  double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Pose p;
  p.rotation << ct, -st * ca, st * sa, st, ct * ca, -ct * sa, 0, sa, ca;
  p.position << row.a * ct, row.a * st, d;
  return p;
}

/// Base-frame poses of frames 0..n (prefix products of the DH chain,
/// without the tool transform). prefixes[k] is T^0_k; prefixes[0] is
/// identity.
inline std::vector<Pose> chain_prefixes(const RobotModel& model,
                                        const JointVector& q) {
  detail::check_dof(model, q, "chain_prefixes");
  std::vector<Pose> prefixes(model.dof() + 1);
  prefixes[0] = Pose::Identity();
  for (std::size_t k = 0; k < model.dof(); ++k)
    prefixes[k + 1] =
        prefixes[k] * dh_transform(model.joints[k].dh, model.joints[k].kind,
                                   q[static_cast<Eigen::Index>(k)]);
  return prefixes;
}

/// Forward pose kinematics: T^0_n * tool.
inline Pose fpk(const RobotModel& model, const JointVector& q) {
  detail::check_dof(model, q, "fpk");
  Pose t = Pose::Identity();
  for (std::size_t k = 0; k < model.dof(); ++k)
    t = t * dh_transform(model.joints[k].dh, model.joints[k].kind,
                         q[static_cast<Eigen::Index>(k)]);
  return t * model.tool;
}

/// Skeleton polyline: the base origin followed by the origins of frames
/// 1..n in base coordinates.
inline std::vector<Eigen::Vector3d> frame_origins(const RobotModel& model,
                                                  const JointVector& q) {
  auto prefixes = chain_prefixes(model, q);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(prefixes.size());
  for (const Pose& p : prefixes) pts.push_back(p.position);
  return pts;
}

/// Geometric Jacobian. Column k uses the axis z_k and origin p_k of frame
/// k-1 in base coordinates: revolute columns are (z_k x (p_e - p_k); z_k),
/// prismatic columns (z_k; 0). Equals the partial-derivative Jacobian of
/// the forward kinematics.
inline Jacobian jacobian(const RobotModel& model, const JointVector& q) {
  auto prefixes = chain_prefixes(model, q);
  Eigen::Vector3d pe = (prefixes.back() * model.tool).position;
  Jacobian j(6, static_cast<Eigen::Index>(model.dof()));
  for (std::size_t k = 0; k < model.dof(); ++k) {
    Eigen::Vector3d z = prefixes[k].rotation.col(2);
    Eigen::Vector3d p = prefixes[k].position;
    auto col = j.col(static_cast<Eigen::Index>(k));
    if (model.joints[k].kind == JointKind::kRevolute) {
      col.head<3>() = z.cross(pe - p);
      col.tail<3>() = z;
    } else {
      col.head<3>() = z;
      col.tail<3>().setZero();
    }
  }
  return j;
}

struct PinvResult {
  Eigen::MatrixXd matrix;
  bool truncated = false;  // singular values below the cutoff were dropped
  Eigen::Index rank = 0;
};

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rel_cutoff * sigma_max are treated as zero (and flagged), so the
/// result stays finite at rank deficiencies.
inline PinvResult pseudoinverse(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                double rel_cutoff = 1e-8) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() > 0 ? rel_cutoff * sv(0) : 0.0;
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  PinvResult out;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      inv_sv(i) = 1.0 / sv(i);
      ++out.rank;
    } else {
      out.truncated = true;
    }
  }
  out.matrix =
      svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

/// Yoshikawa manipulability index sqrt(det(J J^T)), clamped at zero when
/// round-off drives the determinant slightly negative.
inline double yoshikawa(const Eigen::Ref<const Eigen::MatrixXd>& j) {
  Eigen::MatrixXd jjt = j * j.transpose();
  return std::sqrt(std::max(0.0, jjt.determinant()));
}

/// Null-space projector N = I - J^+ J (symmetric, idempotent).
inline Eigen::MatrixXd null_projector(const Eigen::Ref<const Eigen::MatrixXd>& j) {
  Eigen::MatrixXd pinv = pseudoinverse(j).matrix;
  return Eigen::MatrixXd::Identity(j.cols(), j.cols()) - pinv * j;
}

/// Forward velocity kinematics xdot = J(q) qdot.
inline Twist fvk(const RobotModel& model, const JointVector& q,
                 const Eigen::VectorXd& qdot) {
  detail::check_dof(model, qdot, "fvk qdot");
  Eigen::Matrix<double, 6, 1> v = jacobian(model, q) * qdot;
  return Twist::from_stacked(v);
}

struct IvkResult {
  Eigen::VectorXd qdot;
  bool truncated = false;  // some twist component lay outside range(J)
};

/// Inverse velocity kinematics qdot = J^+(q) xdot: the minimum-norm joint
/// velocity achieving xdot when feasible.
inline IvkResult ivk(const RobotModel& model, const JointVector& q,
                     const Twist& xdot) {
  PinvResult pinv = pseudoinverse(jacobian(model, q));
  return IvkResult{pinv.matrix * xdot.stacked(), pinv.truncated};
}

/// Redundancy resolution qdot = J^+ xdot + (I - J^+ J) qdot_r: the
/// secondary velocity qdot_r moves the arm without disturbing the task
/// velocity.
inline Eigen::VectorXd redundancy_resolve(const RobotModel& model,
                                          const JointVector& q,
                                          const Twist& xdot,
                                          const Eigen::VectorXd& qdot_r) {
  detail::check_dof(model, qdot_r, "redundancy_resolve qdot_r");
  Jacobian j = jacobian(model, q);
  Eigen::MatrixXd pinv = pseudoinverse(j).matrix;
  Eigen::MatrixXd n =
      Eigen::MatrixXd::Identity(j.cols(), j.cols()) - pinv * j;
  return pinv * xdot.stacked() + n * qdot_r;
}

/// Axis-angle vector of a rotation matrix (matrix logarithm). At angle pi
/// the axis sign is chosen deterministically: the largest-magnitude
/// component is made positive (ties broken by lowest index).
inline Eigen::Vector3d rotation_log(const Eigen::Matrix3d& r) {
  double cos_t = std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0);
  double theta = std::acos(cos_t);
  Eigen::Vector3d skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0),
                       r(1, 0) - r(0, 1));
  if (theta < 1e-10) return 0.5 * skew;  // log(R) ~ (R - R^T)/2 near I
  if (theta > std::numbers::pi - 1e-6) {
    // Near pi the skew part vanishes; recover the axis from the diagonal.
    Eigen::Vector3d axis;
    for (int i = 0; i < 3; ++i)
      axis[i] = std::sqrt(std::max(0.0, (r(i, i) - cos_t) / (1.0 - cos_t)));
    int m = 0;
    for (int i = 1; i < 3; ++i)
      if (axis[i] > axis[m]) m = i;
    for (int i = 0; i < 3; ++i) {
      if (i == m) continue;
      double prod = r(m, i) + r(i, m);  // 2 (1 - cos t) a_m a_i
      if (prod < 0.0) axis[i] = -axis[i];
    }
    // Below pi the (tiny) skew part still fixes the sign; at pi proper
    // both signs represent the same rotation and the convention above
    // (largest component positive) stands.
    double along = skew.dot(axis);
    if (std::abs(along) > 1e-14 && along < 0.0) axis = -axis;
    return axis.normalized() * theta;
  }
  return skew * (theta / (2.0 * std::sin(theta)));
}

/// Pose difference as a 6-vector: linear part is the position error,
/// angular part the axis-angle of target.R * current.R^T.
inline Eigen::Matrix<double, 6, 1> pose_error(const Pose& current,
                                              const Pose& target) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.position - current.position;
  e.tail<3>() = rotation_log(target.rotation * current.rotation.transpose());
  return e;
}

}  // namespace manipkd

#endif  // MANIPKD_KINEMATICS_HPP_
