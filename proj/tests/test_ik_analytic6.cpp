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

#include <numbers>
#include <random>

#include "manipkd/ik_analytic6.hpp"
#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"
#include "test_util.hpp"

using namespace manipkd;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::Vector3d planar_forward(const Reduced6Constants& k, double t1,
                               double t2, double t4) {
  double r = k.L1 + k.Lh * std::cos(t2) + k.L4 * std::cos(t2 + t4);
  double z = -k.Lh * std::sin(t2) - k.L4 * std::sin(t2 + t4);
  return Eigen::Vector3d(r * std::cos(t1), r * std::sin(t1),
                         z + k.shoulder_z);
}

}  // namespace

TEST_CASE("reduced-arm constants derive from the model") {
  RobotModel bx = builtin_baxter_left();
  Reduced6Constants k = Reduced6Constants::from_model(bx);
  CHECK(k.L1 == doctest::Approx(0.069));
  CHECK(k.Lh == doctest::Approx(std::hypot(0.36435, 0.069)));
  CHECK(k.L4 == doctest::Approx(0.37429));
  CHECK(k.shoulder_z == doctest::Approx(0.27035));
  CHECK(k.ee_offset == doctest::Approx(0.229525));
  CHECK(k.L1 > 0);
  CHECK(k.Lh > 0);
  CHECK(k.L4 > 0);

  CHECK_THROWS_AS(
      Reduced6Constants::from_model(builtin_planar_2r(1.0, 1.0)),
      std::invalid_argument);
}

TEST_CASE("position joints recover synthetic planar targets") {
  Reduced6Constants k = Reduced6Constants::from_model(builtin_baxter_left());
  std::mt19937_64 rng(301);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  int recovered = 0;
  for (int trial = 0; trial < 300; ++trial) {
    double t1 = (2.0 * unit() - 1.0) * 2.5;
    double t2, t4;
    do {  // folded-over-the-axis poses belong to the mirrored azimuth
      t2 = (2.0 * unit() - 1.0) * 1.4;
      t4 = (2.0 * unit() - 1.0) * 2.2;
    } while (k.L1 + k.Lh * std::cos(t2) + k.L4 * std::cos(t2 + t4) < 0.05);
    Pose target;
    target.position = planar_forward(k, t1, t2, t4);
    PositionSolveResult sol = solve_position_joints(target, k);
    REQUIRE(sol.reachable);
    REQUIRE(sol.branches.size() >= 1);
    REQUIRE(sol.branches.size() <= 2);
    bool hit = false;
    for (const auto& b : sol.branches) {
      // every branch satisfies the planar position equations
      Eigen::Vector3d p = planar_forward(k, b.theta1, b.theta2, b.theta4);
      CHECK((p - target.position).cwiseAbs().maxCoeff() < 1e-9);
      if (std::abs(b.theta1 - t1) < 1e-9 &&
          std::abs(wrap_angle(b.theta2 - t2)) < 1e-9 &&
          std::abs(wrap_angle(b.theta4 - t4)) < 1e-9)
        hit = true;
    }
    // both branches share the azimuth
    if (sol.branches.size() == 2)
      CHECK(sol.branches[0].theta1 == sol.branches[1].theta1);
    if (hit) ++recovered;
  }
  CHECK(recovered == 300);
}

TEST_CASE("position solve rejects unreachable targets with a distance") {
  Reduced6Constants k = Reduced6Constants::from_model(builtin_baxter_left());
  Pose target;
  target.position = planar_forward(k, 0.3, 0.2, 0.4) * 2.0;
  PositionSolveResult sol = solve_position_joints(target, k);
  CHECK_FALSE(sol.reachable);
  CHECK(sol.branches.empty());
  CHECK(sol.unreachable_distance > 0.0);

  // wrist center on the base axis: shoulder singularity
  Pose axis_target;
  axis_target.position = Eigen::Vector3d(0, 0, 0.5);
  CHECK(solve_position_joints(axis_target, k).shoulder_singular);
}

TEST_CASE("wrist extraction recovers the generating triple") {
  RobotModel bx = builtin_baxter_left();
  Reduced6Constants k = Reduced6Constants::from_model(bx);
  const double t1 = 0.25, t2 = 0.6, t4 = -0.45;
  Eigen::Matrix3d r40 =
      detail::rotation_to_elbow(bx, k, t1, t2, t4);

  Eigen::Matrix3d wrist = rot_z(0.3) * rot_y(0.7) * rot_z(-0.4);
  WristSolution w = solve_wrist(r40 * wrist, t1, t2, t4, bx);
  CHECK_FALSE(w.singular);
  CHECK(w.theta5 == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(w.theta6 == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(w.theta7 == doctest::Approx(-0.4).epsilon(1e-9));

  // gimbal: theta6 = 0 pins theta5 and moves the sum into theta7
  WristSolution g = solve_wrist(r40 * rot_z(0.3) * rot_z(-0.4), t1, t2, t4, bx);
  CHECK(g.singular);
  CHECK(g.theta5 == 0.0);
  CHECK(g.theta6 == 0.0);
  CHECK(g.theta7 == doctest::Approx(-0.1).epsilon(1e-9));

  // quadrant convention: rows 3 of the wrist matrix fix theta7 = 0 when
  // its sine vanishes and its cosine is positive
  WristSolution q7 = solve_wrist(r40 * rot_z(0.5) * rot_y(0.9), t1, t2, t4,
                                 bx);
  CHECK(q7.theta7 == doctest::Approx(0.0));
  CHECK(q7.theta6 == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("solve_6dof reproduces the zero configuration exactly") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q0 = Eigen::VectorXd::Zero(7);
  Analytic6Solution sol = solve_6dof(bx, fpk(bx, q0));
  REQUIRE(sol.target_reachable);
  bool exact = false;
  for (const auto& b : sol.branches) {
    CHECK(b.q[2] == 0.0);
    if (b.reachable && b.q.cwiseAbs().maxCoeff() < 1e-9) exact = true;
  }
  CHECK(exact);
}

TEST_CASE("solve_6dof round trips fpk-generated targets") {
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(307);
  int solved = 0;
  const int total = 500;
  for (int trial = 0; trial < total; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(bx, rng);
    q[2] = 0.0;
    Pose target = fpk(bx, q);
    Analytic6Solution sol = solve_6dof(bx, target);
    CHECK(sol.branches.size() <= 2);
    bool good = false;
    for (const auto& b : sol.branches) {
      CHECK(b.q[2] == 0.0);
      // no false positives: flags must match an independent check
      Eigen::Matrix<double, 6, 1> err = pose_error(fpk(bx, b.q), target);
      if (b.reachable) {
        CHECK(err.head<3>().norm() <= 1e-6);
        CHECK(err.tail<3>().norm() <= 1e-6);
        good = true;
      }
      CHECK(b.within_limits == bx.within_limits(b.q));
    }
    if (good) ++solved;
  }
  CHECK(solved == total);
}

TEST_CASE("solve_6dof flags unreachable targets") {
  RobotModel bx = builtin_baxter_left();
  Pose target = fpk(bx, Eigen::VectorXd::Zero(7));
  target.position *= 2.0;
  Analytic6Solution sol = solve_6dof(bx, target);
  CHECK_FALSE(sol.target_reachable);
  CHECK(sol.branches.empty());
  CHECK(sol.unreachable_distance > 0.0);
}

TEST_CASE("solve_6dof honors the contract on arbitrary-elbow targets") {
  // Targets generated with a free elbow roll may or may not be reachable
  // by the locked-elbow arm; whenever a branch claims success the round
  // trip must hold.
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(311);
  int reachable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(bx, rng);  // q[2] free
    Pose target = fpk(bx, q);
    Analytic6Solution sol = solve_6dof(bx, target);
    for (const auto& b : sol.branches) {
      if (!b.reachable) continue;
      Eigen::Matrix<double, 6, 1> err = pose_error(fpk(bx, b.q), target);
      CHECK(err.head<3>().norm() <= 1e-6);
      CHECK(err.tail<3>().norm() <= 1e-6);
      ++reachable;
    }
  }
  CHECK(reachable > 0);  // generic poses are mostly solvable
}

TEST_CASE("limit-violating branches are flagged, not dropped") {
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(313);
  bool saw_flagged = false;
  for (int trial = 0; trial < 200 && !saw_flagged; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(bx, rng);
    q[2] = 0.0;
    Analytic6Solution sol = solve_6dof(bx, fpk(bx, q));
    for (const auto& b : sol.branches)
      if (b.reachable && !b.within_limits) saw_flagged = true;
  }
  CHECK(saw_flagged);
}
