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

#include "manipkd/ik_iterative.hpp"
#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"
#include "test_util.hpp"

using namespace manipkd;

TEST_CASE("pinv solves immediately when already at the target") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q0 = Eigen::VectorXd::Zero(7);
  IkResult r = solve_pinv(bx, fpk(bx, q0), q0);
  CHECK(r.status == IkStatus::kSolved);
  CHECK(r.iterations == 0);
  CHECK(r.q == q0);
}

TEST_CASE("pinv converges on the planar arm") {
  RobotModel m = builtin_planar_2r(1.0, 1.0);
  Eigen::VectorXd seed(2), goal(2);
  seed << 0.1, 0.1;
  goal << 0.3, 0.5;
  IkParams params;
  params.record_trace = true;
  IkResult r = solve_pinv(m, fpk(m, goal), seed, params);
  CHECK(r.status == IkStatus::kSolved);
  CHECK(r.final_pos_err <= params.tol_pos);
  CHECK(r.final_rot_err <= params.tol_rot);
  CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
  // independent re-verification through the chain
  Eigen::Matrix<double, 6, 1> e = pose_error(fpk(m, r.q), fpk(m, goal));
  CHECK(e.head<3>().norm() <= params.tol_pos);
}

TEST_CASE("pinv never leaves the limit box under clamping") {
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(401);
  IkParams params;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(bx, rng);
    IkResult r = solve_pinv(bx, fpk(bx, q), bx.mid_config(), params);
    CHECK(bx.within_limits(r.q, 1e-12));
    if (r.status == IkStatus::kSolved) {
      CHECK(r.final_pos_err <= params.tol_pos);
      CHECK(r.final_rot_err <= params.tol_rot);
    }
  }
}

TEST_CASE("pinv rejects seeds outside the limits") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd bad = Eigen::VectorXd::Constant(7, 10.0);
  CHECK_THROWS_AS(solve_pinv(bx, Pose{}, bad, IkParams{}),
                  std::invalid_argument);
}

TEST_CASE("far targets report unreachable, never a false solve") {
  RobotModel bx = builtin_baxter_left();
  Pose far;
  far.position = Eigen::Vector3d(3, 0, 0);
  IkResult r = solve_pinv(bx, far, Eigen::VectorXd::Zero(7), IkParams{});
  CHECK(r.status == IkStatus::kUnreachable);
  IkResult rr = solve_pinv_rr(bx, far, Eigen::VectorXd::Zero(7), IkParams{});
  CHECK(rr.status == IkStatus::kUnreachable);
  IkResult rc = solve_ccd(bx, far.position, Eigen::VectorXd::Zero(7),
                          IkParams{});
  CHECK(rc.status == IkStatus::kUnreachable);
}

TEST_CASE("restarts leave an already-solvable call untouched") {
  RobotModel m = builtin_planar_2r(1.0, 1.0);
  Eigen::VectorXd seed(2), goal(2);
  seed << 0.1, 0.1;
  goal << 0.3, 0.5;
  IkResult direct = solve_pinv(m, fpk(m, goal), seed);
  IkResult with_rr = solve_pinv_rr(m, fpk(m, goal), seed);
  REQUIRE(direct.status == IkStatus::kSolved);
  CHECK(with_rr.restarts == 0);
  CHECK(with_rr.q == direct.q);
  CHECK(with_rr.iterations == direct.iterations);
}

TEST_CASE("restarting solver clears a batch of reachable targets") {
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(403);
  IkParams params;
  int solved = 0;
  const int total = 40;
  for (int trial = 0; trial < total; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(bx, rng);
    Pose target = fpk(bx, q);
    IkResult r = solve_pinv_rr(bx, target, Eigen::VectorXd::Zero(7), params);
    if (r.status != IkStatus::kSolved) continue;
    ++solved;
    CHECK(bx.within_limits(r.q, 1e-12));
    Eigen::Matrix<double, 6, 1> e = pose_error(fpk(bx, r.q), target);
    CHECK(e.head<3>().norm() <= params.tol_pos);
    CHECK(e.tail<3>().norm() <= params.tol_rot);
  }
  CHECK(solved >= 36);  // the acceptance suite pins the 95% batch
}

TEST_CASE("identical seeds give bit-identical results") {
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(405);
  Eigen::VectorXd q = sample_joint_vector(bx, rng);
  Pose target = fpk(bx, q);
  IkParams params;
  params.rng_seed = 8675309;
  IkResult a = solve_pinv_rr(bx, target, Eigen::VectorXd::Zero(7), params);
  IkResult b = solve_pinv_rr(bx, target, Eigen::VectorXd::Zero(7), params);
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(a.restarts == b.restarts);
  CHECK(a.final_pos_err == b.final_pos_err);
  CHECK(a.final_rot_err == b.final_rot_err);
  REQUIRE(a.q.size() == b.q.size());
  CHECK((a.q - b.q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ccd solves immediately at the target") {
  RobotModel bx = builtin_baxter_left();
  Eigen::VectorXd q = bx.mid_config();
  IkResult r = solve_ccd(bx, fpk(bx, q).position, q);
  CHECK(r.status == IkStatus::kSolved);
  CHECK(r.iterations == 0);
}

TEST_CASE("ccd reaches a planar point target") {
  RobotModel m = builtin_planar_2r(1.0, 1.0);
  Eigen::VectorXd seed(2);
  seed << 0.3, 0.3;
  IkParams params;
  IkResult r = solve_ccd(m, Eigen::Vector3d(1.2, 0.8, 0.0), seed, params);
  CHECK(r.status == IkStatus::kSolved);
  CHECK(r.final_pos_err <= params.tol_pos);
  CHECK((fpk(m, r.q).position - Eigen::Vector3d(1.2, 0.8, 0)).norm() <=
        params.tol_pos);
}

TEST_CASE("ccd aligning rotation is the single-joint optimum") {
  // The update rule minimizes the end-effector-to-target distance over
  // the one joint it moves (the solver relaxes it only far from the
  // goal).
  RobotModel m = builtin_planar_2r(1.0, 1.0);
  std::mt19937_64 rng(407);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(m, rng);
    Eigen::Vector3d target(0.9, 0.6, 0.0);
    for (Eigen::Index k = 0; k < 2; ++k) {
      auto prefixes = chain_prefixes(m, q);
      Eigen::Vector3d pe = (prefixes.back() * m.tool).position;
      auto delta = detail::ccd_aligning_rotation(
          prefixes[k].rotation.col(2), prefixes[k].position, pe, target);
      if (!delta) continue;
      Eigen::VectorXd q_upd = q;
      q_upd[k] += *delta;  // limits are wide open on this model
      double best = (fpk(m, q_upd).position - target).norm();
      for (double perturb : {-1e-3, 1e-3}) {
        Eigen::VectorXd q_alt = q_upd;
        q_alt[k] += perturb;
        CHECK((fpk(m, q_alt).position - target).norm() >= best - 1e-12);
      }
      q = q_upd;
    }
  }
}

TEST_CASE("ccd batch rate on reachable positions") {
  RobotModel bx = builtin_baxter_left();
  std::mt19937_64 rng(409);
  IkParams params;
  int solved = 0;
  const int total = 40;
  for (int trial = 0; trial < total; ++trial) {
    Eigen::VectorXd q = sample_joint_vector(bx, rng);
    IkResult r = solve_ccd(bx, fpk(bx, q).position, bx.mid_config(), params);
    if (r.status == IkStatus::kSolved) {
      CHECK((fpk(bx, r.q).position - fpk(bx, q).position).norm() <=
            params.tol_pos);
      CHECK(bx.within_limits(r.q, 1e-12));
      ++solved;
    }
  }
  CHECK(solved >= 34);  // the acceptance suite pins the 90% batch
}

TEST_CASE("prismatic ccd update slides along the axis") {
  RobotModel m = builtin_planar_2r(1.0, 1.0);
  // replace the second joint with a vertical slider
  m.joints[1].kind = JointKind::kPrismatic;
  m.joints[1].dh = DhRow{0.0, 0.0, 0.0, 0.0};
  m.joints[1].limit_lo = -1.0;
  m.joints[1].limit_hi = 1.0;
  Eigen::VectorXd seed(2);
  seed << 0.2, 0.0;
  IkParams params;
  IkResult r = solve_ccd(m, Eigen::Vector3d(0.0, 1.0, 0.4), seed, params);
  CHECK(r.status == IkStatus::kSolved);
  CHECK(std::abs(fpk(m, r.q).position.z() - 0.4) < 2e-3);
}
