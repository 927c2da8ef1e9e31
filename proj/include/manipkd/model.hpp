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
#ifndef MANIPKD_MODEL_HPP_
#define MANIPKD_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/pose.hpp"

namespace manipkd {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class JointKind { kRevolute, kPrismatic };

inline const char* joint_kind_name(JointKind k) {
  return k == JointKind::kRevolute ? "revolute" : "prismatic";
}

/// One Denavit-Hartenberg row. Units: meters for d/a, radians for
/// theta_offset/alpha. theta_offset is the constant added to the joint
/// variable of a revolute joint (it carries e.g. a fixed +pi/2 in a row).
struct DhRow {
  double d = 0.0;
  double theta_offset = 0.0;
  double a = 0.0;
  double alpha = 0.0;
};

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  DhRow dh;
  double limit_lo = 0.0;
  double limit_hi = 0.0;
};

/// Per-link inertial data expressed in the link's DH frame: mass, center
/// of mass, and the 3x3 inertia tensor taken about the frame origin
/// (tensor convention: off-diagonals are -integral(xy dm) etc.).
struct LinkInertia {
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();

  /// Center of mass as a homogeneous 4-vector (trailing 1).
  Eigen::Vector4d com_h() const {
    return Eigen::Vector4d(com.x(), com.y(), com.z(), 1.0);
  }

  /// Point mass at a given position in the link frame.
  static LinkInertia point_mass(double mass, const Eigen::Vector3d& at) {
    LinkInertia li;
    li.mass = mass;
    li.com = at;
    double x = at.x(), y = at.y(), z = at.z();
    li.inertia << mass * (y * y + z * z), -mass * x * y, -mass * x * z,
        -mass * x * y, mass * (x * x + z * z), -mass * y * z,
        -mass * x * z, -mass * y * z, mass * (x * x + y * y);
    return li;
  }

  /// Build from a tensor given about the center of mass (the form vendor
  /// data sheets ship); applies the parallel-axis theorem to re-express
  /// it about the link frame origin.
  static LinkInertia about_origin(double mass, const Eigen::Vector3d& com,
                                  const Eigen::Matrix3d& inertia_com) {
    LinkInertia li = point_mass(mass, com);
    li.inertia += inertia_com;
    return li;
  }
};

/// One serial kinematic chain: ordered DH rows with limits plus per-link
/// inertial data. Immutable by convention after construction; safe to
/// share among concurrent readers.
struct RobotModel {
  std::string name;
  std::vector<JointSpec> joints;
  std::vector<LinkInertia> inertias;
  // Fixed transform from the last DH frame to the end-effector. Identity
  // when the tool offset is already carried by the final DH row.
  Pose tool = Pose::Identity();

  std::size_t dof() const { return joints.size(); }

  bool all_revolute() const {
    for (const auto& j : joints)
      if (j.kind != JointKind::kRevolute) return false;
    return true;
  }

  /// Upper bound on end-effector distance from base: sum of per-row
  /// offsets sqrt(a^2 + d^2) plus the tool offset. Prismatic rows count
  /// their worst-case extension.
  double max_reach() const {
    double r = 0.0;
    for (const auto& j : joints) {
      double d = std::abs(j.dh.d);
      if (j.kind == JointKind::kPrismatic)
        d = std::max(std::abs(j.dh.d + j.limit_lo),
                     std::abs(j.dh.d + j.limit_hi));
      r += std::hypot(j.dh.a, d);
    }
    return r + tool.position.norm();
  }

  Eigen::VectorXd mid_config() const {
    Eigen::VectorXd q(dof());
    for (std::size_t i = 0; i < dof(); ++i)
      q[i] = 0.5 * (joints[i].limit_lo + joints[i].limit_hi);
    return q;
  }

  bool within_limits(const Eigen::VectorXd& q, double slack = 0.0) const {
    if (static_cast<std::size_t>(q.size()) != dof()) return false;
    for (std::size_t i = 0; i < dof(); ++i)
      if (q[i] < joints[i].limit_lo - slack || q[i] > joints[i].limit_hi + slack)
        return false;
    return true;
  }

  Eigen::VectorXd clamp_to_limits(const Eigen::VectorXd& q) const {
    Eigen::VectorXd out = q;
    for (std::size_t i = 0; i < dof(); ++i)
      out[i] = std::clamp(out[i], joints[i].limit_lo, joints[i].limit_hi);
    return out;
  }

  void validate() const;
};

namespace detail {

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  return m.allFinite();
}

}  // namespace detail

inline void RobotModel::validate() const {
  if (joints.empty())
    throw ValidationError("model '" + name + "': needs at least one joint");
  if (joints.size() != inertias.size())
    throw ValidationError("model '" + name + "': joints (" +
                          std::to_string(joints.size()) + ") and inertias (" +
                          std::to_string(inertias.size()) +
                          ") length mismatch");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const JointSpec& j = joints[i];
    const std::string who = "joint '" + j.name + "'";
    if (!std::isfinite(j.dh.d) || !std::isfinite(j.dh.theta_offset) ||
        !std::isfinite(j.dh.a) || !std::isfinite(j.dh.alpha))
      throw ValidationError(who + ": non-finite DH row");
    if (j.dh.alpha <= -std::numbers::pi || j.dh.alpha > std::numbers::pi)
      throw ValidationError(who + ": alpha not normalized to (-pi, pi]");
    if (!std::isfinite(j.limit_lo) || !std::isfinite(j.limit_hi) ||
        !(j.limit_lo < j.limit_hi))
      throw ValidationError(who + ": requires limit_lo < limit_hi");

    const LinkInertia& li = inertias[i];
    if (!std::isfinite(li.mass) || li.mass <= 0.0)
      throw ValidationError(who + ": nonpositive mass");
    if (!li.com.allFinite() || !li.inertia.allFinite())
      throw ValidationError(who + ": non-finite inertial data");
    double scale = std::max(1e-12, li.inertia.cwiseAbs().maxCoeff());
    if ((li.inertia - li.inertia.transpose()).cwiseAbs().maxCoeff() >
        1e-9 * scale)
      throw ValidationError(who + ": asymmetric inertia tensor");
    double ixx = li.inertia(0, 0), iyy = li.inertia(1, 1),
           izz = li.inertia(2, 2);
    double slack = 1e-12 * scale;
    if (ixx < -slack || iyy < -slack || izz < -slack)
      throw ValidationError(who + ": negative inertia diagonal");
    if (ixx > iyy + izz + slack || iyy > ixx + izz + slack ||
        izz > ixx + iyy + slack)
      throw ValidationError(who + ": inertia triangle inequality violated");
  }
}

/// Uniform joint vector within limits from a caller-owned generator.
/// The bit pattern of each draw is fixed by the generator stream, not by
/// the standard library's distribution implementation.
inline Eigen::VectorXd sample_joint_vector(const RobotModel& model,
                                           std::mt19937_64& rng) {
  Eigen::VectorXd q(model.dof());
  for (std::size_t i = 0; i < model.dof(); ++i) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    q[i] = model.joints[i].limit_lo +
           u * (model.joints[i].limit_hi - model.joints[i].limit_lo);
  }
  return q;
}

/// The built-in Baxter left arm: seven revolute joints. DH rows are the
/// vendor link geometry; joint limits and inertial data come from the
/// vendor URDF (see models/baxter_left.json, which this function mirrors
/// exactly). Inertia tensors are re-expressed about the DH frame origins
/// via the parallel-axis theorem.
inline RobotModel builtin_baxter_left() {
  constexpr double kPi = std::numbers::pi;
  RobotModel m;
  m.name = "baxter_left";

  struct Row {
    const char* name;
    double d, theta_offset, a, alpha, lo, hi;
  };
  const Row rows[7] = {
      {"S0", 0.27035, 0.0, 0.069, -kPi / 2, -1.70167993878, 1.70167993878},
      {"S1", 0.0, kPi / 2, 0.0, kPi / 2, -2.147, 1.047},
      {"E0", 0.36435, 0.0, 0.069, -kPi / 2, -3.05417993878, 3.05417993878},
      {"E1", 0.0, 0.0, 0.0, kPi / 2, -0.05, 2.618},
      {"W0", 0.37429, 0.0, 0.01, -kPi / 2, -3.059, 3.059},
      {"W1", 0.0, 0.0, 0.0, kPi / 2, -1.5707963267948966, 2.094},
      {"W2", 0.229525, 0.0, 0.0, 0.0, -3.059, 3.059},
  };
  for (const Row& r : rows) {
    JointSpec j;
    j.name = r.name;
    j.kind = JointKind::kRevolute;
    j.dh = DhRow{r.d, r.theta_offset, r.a, r.alpha};
    j.limit_lo = r.lo;
    j.limit_hi = r.hi;
    m.joints.push_back(std::move(j));
  }

  // mass, com xyz, tensor about the com (Ixx, Iyy, Izz, Ixy, Ixz, Iyz),
  // per arm link of the vendor URDF, shoulder to wrist.
  struct Inert {
    double mass, cx, cy, cz, ixx, iyy, izz, ixy, ixz, iyz;
  };
  const Inert inert[7] = {
      {5.70044, 0.01783, 0.00086, 0.19127, 0.04709102262, 0.03766976455,
       0.03595988478, 0.00012787556, 0.00614870039, 0.00078086899},
      {3.22698, 0.06845, 0.00269, -0.00529, 0.01175209419, 0.0278859752,
       0.02078749298, -0.00030096398, 0.00207675762, -0.00018821993},
      {4.31272, -0.00276, 0.00132, 0.18086, 0.02661733557, 0.02844355207,
       0.01248008322, -0.00029270634, 0.00392189887, 0.0010838933},
      {2.07206, 0.02611, 0.00159, -0.01117, 0.00711582686, 0.01318227876,
       0.00926852064, 0.00036036173, 0.0007459496, -0.00019663418},
      {2.24665, -0.00168, 0.0046, 0.13952, 0.01667742825, 0.01675457264,
       0.00373463979, 0.00018403705, 0.00018657629, -0.00064732352},
      {1.60979, 0.06041, 0.00697, 0.006, 0.00387607152, 0.00700537914,
       0.0055275524, -0.00044384784, -0.00021115038, 0.00015348067},
      {0.35093, 0.00198, 0.00125, 0.01855, 0.00025289155, 0.0002688601,
       0.0003074118, 0.00000575311, -0.00000159345, -0.00000519818},
  };
  for (const Inert& li : inert) {
    Eigen::Matrix3d icom;
    icom << li.ixx, li.ixy, li.ixz, li.ixy, li.iyy, li.iyz, li.ixz, li.iyz,
        li.izz;
    m.inertias.push_back(LinkInertia::about_origin(
        li.mass, Eigen::Vector3d(li.cx, li.cy, li.cz), icom));
  }

  m.validate();
  return m;
}

/// Two-revolute planar chain in the base x-y plane (d = 0, alpha = 0):
/// the analytic validation arm. Unit link masses, treated as point
/// masses at the link midpoints.
inline RobotModel builtin_planar_2r(double a1, double a2) {
  if (!(a1 > 0.0) || !(a2 > 0.0))
    throw std::invalid_argument("planar2r: link lengths must be positive");
  constexpr double kPi = std::numbers::pi;
  RobotModel m;
  m.name = "planar2r";
  const double lengths[2] = {a1, a2};
  for (int i = 0; i < 2; ++i) {
    JointSpec j;
    j.name = "J" + std::to_string(i + 1);
    j.kind = JointKind::kRevolute;
    j.dh = DhRow{0.0, 0.0, lengths[i], 0.0};
    j.limit_lo = -kPi;
    j.limit_hi = kPi;
    m.joints.push_back(std::move(j));
    // Frame i sits at the link's distal end; the midpoint is half a link
    // back along the frame's x axis.
    m.inertias.push_back(LinkInertia::point_mass(
        1.0, Eigen::Vector3d(-0.5 * lengths[i], 0.0, 0.0)));
  }
  m.validate();
  return m;
}

}  // namespace manipkd

#endif  // MANIPKD_MODEL_HPP_
