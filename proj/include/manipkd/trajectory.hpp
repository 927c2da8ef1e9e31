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
#ifndef MANIPKD_TRAJECTORY_HPP_
#define MANIPKD_TRAJECTORY_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/ik_iterative.hpp"
#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"

namespace manipkd {

/// Ordered Cartesian waypoints plus provenance metadata.
struct CartesianPath {
  std::vector<Pose> waypoints;
  std::string generator;
};

/// Circle of `count` poses equally spaced by angle in the plane through
/// `center` perpendicular to `normal`, all carrying the fixed
/// `orientation`. The first point lies along a deterministic in-plane
/// axis: the standard basis vector least aligned with the normal (lowest
/// index on ties), projected into the plane.
inline CartesianPath circle_waypoints(const Eigen::Vector3d& center,
                                      double radius,
                                      const Eigen::Vector3d& normal,
                                      std::size_t count,
                                      const Eigen::Matrix3d& orientation) {
  if (!(radius > 0.0))
    throw std::invalid_argument("circle_waypoints: radius must be > 0");
  if (count < 2)
    throw std::invalid_argument("circle_waypoints: count must be >= 2");
  if (std::abs(normal.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("circle_waypoints: normal must be unit");

  int pick = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(normal[i]) < std::abs(normal[pick])) pick = i;
  Eigen::Vector3d axis = Eigen::Vector3d::Unit(pick);
  Eigen::Vector3d u = (axis - axis.dot(normal) * normal).normalized();
  Eigen::Vector3d v = normal.cross(u);

  CartesianPath path;
  path.generator = "circle";
  path.waypoints.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    double phi = 2.0 * std::numbers::pi * static_cast<double>(k) /
                 static_cast<double>(count);
    Pose p;
    p.rotation = orientation;
    p.position = center + radius * (std::cos(phi) * u + std::sin(phi) * v);
    path.waypoints.push_back(p);
  }
  return path;
}

struct TrajectoryEntry {
  std::size_t index = 0;
  Eigen::VectorXd q;
  double pos_err = 0.0;
  double rot_err = 0.0;
  IkStatus status = IkStatus::kMaxIters;
};

struct JointTrajectory {
  std::vector<TrajectoryEntry> entries;

  std::size_t solved_count() const {
    std::size_t n = 0;
    for (const auto& e : entries)
      if (e.status == IkStatus::kSolved) ++n;
    return n;
  }
};

/// Resolves a Cartesian path into joint space with the restarting
/// pseudoinverse solver, warm-starting every waypoint from the most
/// recent solved joint vector. Failures are recorded and skipped so the
/// rest of the path still resolves; `strict` aborts after the first
/// failed waypoint instead.
inline JointTrajectory resolve_trajectory(const RobotModel& model,
                                          const CartesianPath& path,
                                          const Eigen::VectorXd& q_start,
                                          const IkParams& params = {},
                                          bool strict = false) {
  detail::check_dof(model, q_start, "resolve_trajectory q_start");
  if (!model.within_limits(q_start, 1e-12))
    throw std::invalid_argument(
        "resolve_trajectory: q_start outside joint limits");

  JointTrajectory traj;
  traj.entries.reserve(path.waypoints.size());
  Eigen::VectorXd seed = q_start;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    IkResult r = solve_pinv_rr(model, path.waypoints[i], seed, params);
    TrajectoryEntry e;
    e.index = i;
    e.q = r.q;
    e.pos_err = r.final_pos_err;
    e.rot_err = r.final_rot_err;
    e.status = r.status;
    bool solved = r.status == IkStatus::kSolved;
    traj.entries.push_back(std::move(e));
    if (solved)
      seed = r.q;
    else if (strict)
      break;
  }
  return traj;
}

}  // namespace manipkd

#endif  // MANIPKD_TRAJECTORY_HPP_
