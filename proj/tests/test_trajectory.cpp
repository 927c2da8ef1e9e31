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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"
#include "manipkd/trajectory.hpp"

using namespace manipkd;

TEST_CASE("circle waypoints: quarter-circle landmark case") {
  auto path = circle_waypoints(Eigen::Vector3d::Zero(), 1.0,
                               Eigen::Vector3d(0, 0, 1), 4,
                               Eigen::Matrix3d::Identity());
  REQUIRE(path.waypoints.size() == 4);
  const Eigen::Vector3d expect[4] = {
      {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  for (int i = 0; i < 4; ++i)
    CHECK((path.waypoints[i].position - expect[i]).norm() < 1e-12);
}

TEST_CASE("circle waypoints: geometric invariants") {
  std::mt19937_64 rng(501);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Vector3d center(unit(), unit(), unit());
    Eigen::Vector3d normal(unit() - 0.5, unit() - 0.5, unit() - 0.5);
    if (normal.norm() < 1e-3) continue;
    normal.normalize();
    double radius = 0.1 + unit();
    std::size_t count = 2 + rng() % 40;
    auto path = circle_waypoints(center, radius, normal, count,
                                 Eigen::Matrix3d::Identity());
    REQUIRE(path.waypoints.size() == count);
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::Vector3d& p = path.waypoints[i].position;
      CHECK(std::abs((p - center).norm() - radius) < 1e-12);
      CHECK(std::abs((p - center).dot(normal)) < 1e-12);
      if (i > 0)
        CHECK((p - path.waypoints[i - 1].position).norm() > 1e-12);
    }
  }
}

TEST_CASE("circle waypoints: input validation") {
  Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
  CHECK_THROWS_AS(circle_waypoints({}, 0.0, Eigen::Vector3d(0, 0, 1), 4, eye),
                  std::invalid_argument);
  CHECK_THROWS_AS(circle_waypoints({}, 1.0, Eigen::Vector3d(0, 0, 1), 1, eye),
                  std::invalid_argument);
  CHECK_THROWS_AS(circle_waypoints({}, 1.0, Eigen::Vector3d(0, 0, 2), 4, eye),
                  std::invalid_argument);
}

TEST_CASE("a repeated in-place pose resolves to the start configuration") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q0 = bx.mid_config();
  CartesianPath path;
  path.waypoints.assign(3, fpk(bx, q0));
  JointTrajectory traj = resolve_trajectory(bx, path, q0);
  REQUIRE(traj.entries.size() == 3);
  for (const auto& e : traj.entries) {
    CHECK(e.status == IkStatus::kSolved);
    CHECK((e.q - q0).cwiseAbs().maxCoeff() == 0.0);  // zero-iteration solves
  }
}

TEST_CASE("warm start chains through failures") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q0 = bx.mid_config();
  Pose here = fpk(bx, q0);
  Pose nearby = here;
  nearby.position += Eigen::Vector3d(0.02, 0, 0);
  Pose unreachable;
  unreachable.position = Eigen::Vector3d(5, 0, 0);
  unreachable.rotation = here.rotation;

  CartesianPath path;
  path.waypoints = {here, unreachable, nearby};
  IkParams params;
  JointTrajectory traj = resolve_trajectory(bx, path, q0, params);
  REQUIRE(traj.entries.size() == 3);
  CHECK(traj.entries[0].status == IkStatus::kSolved);
  CHECK(traj.entries[1].status == IkStatus::kUnreachable);
  CHECK(traj.entries[2].status == IkStatus::kSolved);
  // entry 2 was seeded from entry 0's solution, not from the failure
  CHECK((traj.entries[2].q - traj.entries[0].q).cwiseAbs().maxCoeff() < 0.2);

  // strict mode stops at the failure
  JointTrajectory strict = resolve_trajectory(bx, path, q0, params, true);
  CHECK(strict.entries.size() == 2);
  CHECK(strict.entries.back().status == IkStatus::kUnreachable);
}

TEST_CASE("small circle resolves fully with continuity") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q0 = bx.mid_config();
  Pose anchor = fpk(bx, q0);
  auto path = circle_waypoints(anchor.position, 0.05,
                               Eigen::Vector3d(0, 0, 1), 25, anchor.rotation);
  IkParams params;
  JointTrajectory traj = resolve_trajectory(bx, path, q0, params);
  REQUIRE(traj.entries.size() == 25);
  std::size_t solved = traj.solved_count();
  CHECK(solved >= 24);
  const Eigen::VectorXd* prev = nullptr;
  for (const auto& e : traj.entries) {
    if (e.status != IkStatus::kSolved) {
      prev = nullptr;
      continue;
    }
    CHECK(e.pos_err <= 2e-3);
    // independent re-verification through the chain
    Eigen::Matrix<double, 6, 1> err =
        pose_error(fpk(bx, e.q), path.waypoints[e.index]);
    CHECK(err.head<3>().norm() <= params.tol_pos);
    CHECK(err.tail<3>().norm() <= params.tol_rot);
    if (prev) CHECK((e.q - *prev).cwiseAbs().maxCoeff() <= 0.2);
    prev = &e.q;
  }
}

TEST_CASE("resolution is deterministic given the solver seed") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q0 = bx.mid_config();
  Pose anchor = fpk(bx, q0);
  auto path = circle_waypoints(anchor.position, 0.04,
                               Eigen::Vector3d(0, 1, 0), 10, anchor.rotation);
  IkParams params;
  params.rng_seed = 31415;
  JointTrajectory a = resolve_trajectory(bx, path, q0, params);
  JointTrajectory b = resolve_trajectory(bx, path, q0, params);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].status == b.entries[i].status);
    CHECK((a.entries[i].q - b.entries[i].q).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("start configuration must respect the limits") {
  RobotModel bx = builtin_baxter_left();
  CartesianPath path;
  path.waypoints = {fpk(bx, bx.mid_config())};
  Eigen::VectorXd bad = Eigen::VectorXd::Constant(7, 9.0);
  CHECK_THROWS_AS(resolve_trajectory(bx, path, bad), std::invalid_argument);
}
