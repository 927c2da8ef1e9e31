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
#ifndef MANIPKD_IK_ITERATIVE_HPP_
#define MANIPKD_IK_ITERATIVE_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"

// Numerical inverse kinematics for the full chain: damped-free Jacobian
// pseudoinverse iteration, the same with random restarts (the library's
// default solver), and position-only cyclic coordinate descent. All
// solvers are pure functions of their arguments; randomness comes only
// from the caller-provided seed.

namespace manipkd {

enum class LimitPolicy { kClamp, kReject };

enum class IkStatus { kSolved, kMaxIters, kJointLimitStuck, kUnreachable };

inline const char* ik_status_name(IkStatus s) {
  switch (s) {
    case IkStatus::kSolved:
      return "solved";
    case IkStatus::kMaxIters:
      return "max-iters";
    case IkStatus::kJointLimitStuck:
      return "joint-limit-stuck";
    case IkStatus::kUnreachable:
      return "unreachable";
  }
  return "unknown";
}

struct IkParams {
  double step = 0.01;      // meters per iteration (1 rad weighted as 1 m)
  double tol_pos = 1e-3;   // m
  double tol_rot = 1e-2;   // rad
  int max_iters = 500;     // per attempt
  int max_restarts = 50;
  std::uint64_t rng_seed = 12345;
  LimitPolicy limit_policy = LimitPolicy::kClamp;
  bool record_trace = false;

  void validate() const {
    if (!(step > 0) || !(tol_pos > 0) || !(tol_rot > 0) || max_iters < 1 ||
        max_restarts < 0)
      throw std::invalid_argument("ik params: step/tolerances must be > 0, "
                                  "counts >= 1");
  }
};

struct IkResult {
  Eigen::VectorXd q;
  IkStatus status = IkStatus::kMaxIters;
  int iterations = 0;
  int restarts = 0;
  double final_pos_err = 0.0;
  double final_rot_err = 0.0;
  std::vector<double> trace;  // per-iteration stacked error norm, optional
};

/// One pseudoinverse descent: step along J^+ dx with dx the stacked pose
/// error clipped to `step` length (no overshoot once inside one step).
/// Joint limits are enforced every iteration by the limit policy; with
/// clamping, ten consecutive clamped iterations without error progress
/// report joint-limit-stuck. Solved requires both tolerances met.
inline IkResult solve_pinv(const RobotModel& model, const Pose& x_des,
                           const Eigen::VectorXd& q_seed,
                           const IkParams& params = {}) {
  params.validate();
  detail::check_dof(model, q_seed, "solve_pinv q_seed");
  if (!model.within_limits(q_seed, 1e-12))
    throw std::invalid_argument("solve_pinv: q_seed outside joint limits");

  IkResult res;
  res.q = model.clamp_to_limits(q_seed);

  if (x_des.position.norm() > model.max_reach()) {
    Eigen::Matrix<double, 6, 1> e = pose_error(fpk(model, res.q), x_des);
    res.status = IkStatus::kUnreachable;
    res.final_pos_err = e.head<3>().norm();
    res.final_rot_err = e.tail<3>().norm();
    return res;
  }

  int stalled_clamped = 0;
  double prev_err = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= params.max_iters; ++it) {
    Eigen::Matrix<double, 6, 1> dx = pose_error(fpk(model, res.q), x_des);
    double pos_err = dx.head<3>().norm();
    double rot_err = dx.tail<3>().norm();
    double err = dx.norm();
    if (params.record_trace) res.trace.push_back(err);
    res.final_pos_err = pos_err;
    res.final_rot_err = rot_err;
    res.iterations = it;
    if (pos_err < params.tol_pos && rot_err < params.tol_rot) {
      res.status = IkStatus::kSolved;
      return res;
    }
    if (it == params.max_iters) break;

    if (err > params.step) dx *= params.step / err;
    Eigen::VectorXd dq = pseudoinverse(jacobian(model, res.q)).matrix * dx;
    Eigen::VectorXd q_new = res.q + dq;

    bool clamped = !model.within_limits(q_new);
    if (clamped && params.limit_policy == LimitPolicy::kReject) {
      res.status = IkStatus::kJointLimitStuck;
      return res;
    }
    res.q = model.clamp_to_limits(q_new);

    if (clamped && err >= prev_err - 1e-12) {
      if (++stalled_clamped >= 10) {
        res.iterations = it + 1;
        Eigen::Matrix<double, 6, 1> e = pose_error(fpk(model, res.q), x_des);
        res.final_pos_err = e.head<3>().norm();
        res.final_rot_err = e.tail<3>().norm();
        res.status = IkStatus::kJointLimitStuck;
        return res;
      }
    } else {
      stalled_clamped = 0;
    }
    prev_err = err;
  }
  res.status = IkStatus::kMaxIters;
  return res;
}

/// Pseudoinverse with random restarts: on any non-solved outcome the
/// seed is redrawn uniformly within the joint limits from the seeded
/// generator and the descent retried, up to max_restarts. Returns the
/// first success, otherwise the attempt with the smallest position
/// error. Deterministic for a fixed rng_seed.
inline IkResult solve_pinv_rr(const RobotModel& model, const Pose& x_des,
                              const Eigen::VectorXd& q_seed,
                              const IkParams& params = {}) {
  params.validate();
  std::mt19937_64 rng(params.rng_seed);
  IkResult best;
  bool have_best = false;
  Eigen::VectorXd seed = q_seed;
  for (int attempt = 0; attempt <= params.max_restarts; ++attempt) {
    IkResult r = solve_pinv(model, x_des, seed, params);
    r.restarts = attempt;
    if (r.status == IkStatus::kSolved) return r;
    if (!have_best || r.final_pos_err < best.final_pos_err) {
      best = r;
      have_best = true;
    }
    if (r.status == IkStatus::kUnreachable) break;  // restarts cannot help
    seed = sample_joint_vector(model, rng);
  }
  if (best.status != IkStatus::kUnreachable) best.status = IkStatus::kMaxIters;
  return best;
}

namespace detail {

// Angle turning joint `idx` so the joint-to-end-effector direction
// aligns with the joint-to-target direction in the joint's rotation
// plane: the distance-minimizing single-joint rotation. Returns nullopt
// when the projections degenerate or the directions are antipodal (the
// rotation direction is then undefined and the joint is skipped).
inline std::optional<double> ccd_aligning_rotation(
    const Eigen::Vector3d& axis, const Eigen::Vector3d& pivot,
    const Eigen::Vector3d& effector, const Eigen::Vector3d& target) {
  constexpr double kTiny = 1e-12;
  Eigen::Vector3d e = effector - pivot;
  Eigen::Vector3d t = target - pivot;
  Eigen::Vector3d e_perp = e - e.dot(axis) * axis;
  Eigen::Vector3d t_perp = t - t.dot(axis) * axis;
  if (e_perp.norm() < kTiny || t_perp.norm() < kTiny) return std::nullopt;
  double cross = axis.dot(e_perp.cross(t_perp));
  double dot = e_perp.dot(t_perp);
  if (dot < 0.0 && std::abs(cross) < kTiny * e_perp.norm() * t_perp.norm())
    return std::nullopt;  // antipodal
  return std::atan2(cross, dot);
}

}  // namespace detail

/// Position-only cyclic coordinate descent. Each sweep visits the joints
/// tip to base; a revolute joint turns by the angle aligning the
/// joint-to-end-effector direction with the joint-to-target direction in
/// its rotation plane (closed form, no Jacobian anywhere), a prismatic
/// joint slides by the axis-aligned gap; all clamped to limits.
/// While the error exceeds 50x the tolerance the aligning rotations are
/// relaxed by 0.6, which keeps distal joints from greedily locking onto
/// their limits; the terminal approach applies them exactly. Iterations
/// count sweeps.
inline IkResult solve_ccd(const RobotModel& model,
                          const Eigen::Vector3d& target_pos,
                          const Eigen::VectorXd& q_seed,
                          const IkParams& params = {}) {
  params.validate();
  detail::check_dof(model, q_seed, "solve_ccd q_seed");

  IkResult res;
  res.q = model.clamp_to_limits(q_seed);
  res.final_rot_err = 0.0;  // orientation is out of contract for CCD

  if (target_pos.norm() > model.max_reach()) {
    res.status = IkStatus::kUnreachable;
    res.final_pos_err =
        (target_pos - fpk(model, res.q).position).norm();
    return res;
  }

  const std::size_t n = model.dof();
  double err = (target_pos - fpk(model, res.q).position).norm();
  res.final_pos_err = err;
  if (err < params.tol_pos) {
    res.status = IkStatus::kSolved;
    return res;
  }

  for (int sweep = 1; sweep <= params.max_iters; ++sweep) {
    const double relax = err > 50.0 * params.tol_pos ? 0.6 : 1.0;
    for (std::size_t idx = n; idx-- > 0;) {
      auto prefixes = chain_prefixes(model, res.q);
      Eigen::Vector3d pe = (prefixes.back() * model.tool).position;
      Eigen::Vector3d z = prefixes[idx].rotation.col(2);
      Eigen::Vector3d p = prefixes[idx].position;

      const JointSpec& joint = model.joints[idx];
      Eigen::Index qi = static_cast<Eigen::Index>(idx);
      if (joint.kind == JointKind::kRevolute) {
        auto delta = detail::ccd_aligning_rotation(z, p, pe, target_pos);
        if (!delta) continue;
        res.q[qi] = std::clamp(res.q[qi] + relax * *delta, joint.limit_lo,
                               joint.limit_hi);
      } else {
        double delta = z.dot(target_pos - pe);
        res.q[qi] = std::clamp(res.q[qi] + relax * delta, joint.limit_lo,
                               joint.limit_hi);
      }

      err = (target_pos - fpk(model, res.q).position).norm();
      if (params.record_trace) res.trace.push_back(err);
      if (err < params.tol_pos) {
        res.iterations = sweep;
        res.final_pos_err = err;
        res.status = IkStatus::kSolved;
        return res;
      }
    }
    res.iterations = sweep;
    res.final_pos_err = err;
  }
  res.status = IkStatus::kMaxIters;
  return res;
}

}  // namespace manipkd

#endif  // MANIPKD_IK_ITERATIVE_HPP_
