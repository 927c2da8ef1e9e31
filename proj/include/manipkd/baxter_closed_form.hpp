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
#ifndef MANIPKD_BAXTER_CLOSED_FORM_HPP_
#define MANIPKD_BAXTER_CLOSED_FORM_HPP_

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace manipkd {

/// End-effector position of the built-in Baxter left arm as explicit
/// scalar expressions in the seven joint angles (fully expanded transform
/// chain). Agrees with fpk(builtin_baxter_left(), q).position to 1e-9.
///
/// Constant binding against the arm's DH table (longitudinal offsets l,
/// lateral offsets d):
///   l1 = 0.27035  shoulder riser        (row S0-S1, d)
///   l2 = 0.36435  upper-arm length      (row E0-E1, d)
///   l3 = 0.37429  forearm length        (row W0-W1, d)
///   l4 = 0.229525 wrist-to-EE length    (row W2-EE, d)
///   d1 = 0.069    shoulder lateral      (row S0-S1, a)
///   d2 = 0.069    elbow lateral         (row E0-E1, a)
///   d3 = 0.01     wrist lateral         (row W0-W1, a)
///   d4 = 0        EE lateral (none)
/// c_i/s_i are cos/sin of the raw joint values q[0..6]; the fixed +pi/2
/// on the S1 row is already absorbed into the coefficients.
inline Eigen::Vector3d fpk_position_closed_form_baxter(
    const Eigen::VectorXd& q) {
  if (q.size() != 7)
    throw std::invalid_argument(
        "fpk_position_closed_form_baxter: expected 7 joint values");

  const double l1 = 0.27035, l2 = 0.36435, l3 = 0.37429, l4 = 0.229525;
  const double d1 = 0.069, d2 = 0.069, d3 = 0.01, d4 = 0.0;

  const double c0 = std::cos(q[0]), s0 = std::sin(q[0]);
  const double c1 = std::cos(q[1]), s1 = std::sin(q[1]);
  const double c2 = std::cos(q[2]), s2 = std::sin(q[2]);
  const double c3 = std::cos(q[3]), s3 = std::sin(q[3]);
  const double c4 = std::cos(q[4]), s4 = std::sin(q[4]);
  const double c5 = std::cos(q[5]), s5 = std::sin(q[5]);
  const double c6 = std::cos(q[6]), s6 = std::sin(q[6]);

  // Recurring angle products of the expansion.
  const double ax = s0 * s2 * s3 - c0 * c1 * c3 + c0 * c2 * s1 * s3;
  const double bx = c0 * c1 * s3 + c3 * s0 * s2 + c0 * c2 * c3 * s1;
  const double cx = c2 * s0 - c0 * s1 * s2;

  const double x =
      d1 * c0 - l4 * (c5 * ax + s5 * (c4 * bx + s4 * cx)) - l3 * ax -
      d3 * s4 * cx + l2 * c0 * c1 - d2 * s0 * s2 - d3 * c4 * bx +
      d4 * c6 * (s5 * ax - c5 * (c4 * bx + s4 * cx)) +
      d4 * s6 * (s4 * bx - c4 * cx) - d2 * c0 * c2 * s1;

  const double ay = c1 * c3 * s0 + c0 * s2 * s3 - c2 * s0 * s1 * s3;
  const double by = c1 * s0 * s3 - c0 * c3 * s2 + c2 * c3 * s0 * s1;
  const double cy = c0 * c2 + s0 * s1 * s2;

  const double y =
      l4 * (c5 * ay - s5 * (c4 * by - s4 * cy)) + d1 * s0 + l3 * ay +
      d4 * s6 * (s4 * by + c4 * cy) + d3 * s4 * cy + d2 * c0 * s2 +
      l2 * c1 * s0 - d3 * c4 * by -
      d4 * c6 * (s5 * ay + c5 * (c4 * by - s4 * cy)) - d2 * c2 * s0 * s1;

  const double z =
      l1 - l2 * s1 - d2 * c1 * c2 - l3 * c3 * s1 - l3 * c1 * c2 * s3 -
      l4 * c3 * c5 * s1 + d3 * c1 * s2 * s4 + d3 * c4 * s1 * s3 -
      d3 * c1 * c2 * c3 * c4 - l4 * c1 * c2 * c5 * s3 +
      d4 * c1 * c4 * s2 * s6 + d4 * c3 * c6 * s1 * s5 +
      l4 * c1 * s2 * s4 * s5 + l4 * c4 * s1 * s3 * s5 -
      d4 * s1 * s3 * s4 * s6 - l4 * c1 * c2 * c3 * c4 * s5 +
      d4 * c1 * c2 * c3 * s4 * s6 + d4 * c1 * c2 * c6 * s3 * s5 +
      d4 * c1 * c5 * c6 * s2 * s4 + d4 * c4 * c5 * c6 * s1 * s3 -
      d4 * c1 * c2 * c3 * c4 * c5 * c6;

  return Eigen::Vector3d(x, y, z);
}

}  // namespace manipkd

#endif  // MANIPKD_BAXTER_CLOSED_FORM_HPP_
