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
#ifndef MANIPKD_POSE_HPP_
#define MANIPKD_POSE_HPP_

#include <Eigen/Dense>

namespace manipkd {

/// Rigid-body transform: rotation matrix plus position vector.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();

  static Pose Identity() { return Pose{}; }

  Pose operator*(const Pose& other) const {
    return Pose{rotation * other.rotation,
                rotation * other.position + position};
  }

  Pose inverse() const {
    Eigen::Matrix3d rt = rotation.transpose();
    return Pose{rt, -(rt * position)};
  }

  Eigen::Matrix4d homogeneous() const {
    Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
    t.topLeftCorner<3, 3>() = rotation;
    t.topRightCorner<3, 1>() = position;
    return t;
  }

  // Frobenius deviation of R from a proper rotation; 0 for exact members
  // of SO(3). Used by validity checks, not enforced on construction.
  double orthonormality_error() const {
    double ortho = (rotation.transpose() * rotation -
                    Eigen::Matrix3d::Identity()).norm();
    double det = std::abs(rotation.determinant() - 1.0);
    return std::max(ortho, det);
  }
};

}  // namespace manipkd

#endif  // MANIPKD_POSE_HPP_
