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
#ifndef MANIPKD_DYNAMICS_HPP_
#define MANIPKD_DYNAMICS_HPP_

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"

// Joint-space dynamics of all-revolute chains through transform
// derivatives: U matrices (first and second partials of the link
// transforms), 4x4 pseudo-inertia matrices per link, and from them the
// mass matrix M, velocity-product vector C, gravity vector G and the
// energy functions. Direct triple/quadruple sums; at n = 7 this is cheap
// and needs no recursive reformulation.

namespace manipkd {

class UnsupportedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kGravityAccel = 9.81;

/// Gravity row vector (0, 0, -9.81, 0), m/s^2, base frame.
inline Eigen::RowVector4d gravity_row() {
  return Eigen::RowVector4d(0.0, 0.0, -kGravityAccel, 0.0);
}

/// Derivative generator of a revolute DH transform:
/// d/dtheta Rot_z(theta) = Q Rot_z(theta). Q12 = -1, Q21 = 1, else 0.
inline Eigen::Matrix4d q_matrix() {
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 1) = -1.0;
  q(1, 0) = 1.0;
  return q;
}

namespace detail {

inline void require_all_revolute(const RobotModel& model, const char* what) {
  if (!model.all_revolute())
    throw UnsupportedModelError(std::string(what) +
                                ": prismatic joints are not supported");
}

// Homogeneous prefixes T^0_k and their inverses, k = 0..n.
struct DynChain {
  std::vector<Eigen::Matrix4d> t;      // t[k] = T^0_k
  std::vector<Eigen::Matrix4d> t_inv;  // t_inv[k] = (T^0_k)^-1

  DynChain(const RobotModel& model, const Eigen::VectorXd& q) {
    auto prefixes = chain_prefixes(model, q);
    t.reserve(prefixes.size());
    t_inv.reserve(prefixes.size());
    for (const Pose& p : prefixes) {
      t.push_back(p.homogeneous());
      t_inv.push_back(p.inverse().homogeneous());
    }
  }

  std::size_t dof() const { return t.size() - 1; }

  // dT^0_{link+1} / dq_joint, zero when the joint is distal to the link.
  Eigen::Matrix4d u(std::size_t link, std::size_t joint) const {
    if (joint > link) return Eigen::Matrix4d::Zero();
    return t[joint] * q_matrix() * t_inv[joint] * t[link + 1];
  }

  // d2 T^0_{link+1} / dq_j dq_k, symmetric in (j, k).
  Eigen::Matrix4d u2(std::size_t link, std::size_t j, std::size_t k) const {
    if (j > link || k > link) return Eigen::Matrix4d::Zero();
    std::size_t a = std::min(j, k), b = std::max(j, k);
    return t[a] * q_matrix() * t_inv[a] * t[b] * q_matrix() * t_inv[b] *
           t[link + 1];
  }
};

}  // namespace detail

/// First partial of the chain transform: U_ij = dT^0_{i+1}/dq_j for the
/// 0-based link index i and joint index j; zero for j > i.
inline Eigen::Matrix4d u_ij(const RobotModel& model, const Eigen::VectorXd& q,
                            std::size_t link, std::size_t joint) {
  detail::require_all_revolute(model, "u_ij");
  if (link >= model.dof() || joint >= model.dof())
    throw std::out_of_range("u_ij: index out of range");
  return detail::DynChain(model, q).u(link, joint);
}

/// Second partial d2 T^0_{link+1} / dq_j dq_k (0-based indices).
inline Eigen::Matrix4d u_ijk(const RobotModel& model, const Eigen::VectorXd& q,
                             std::size_t link, std::size_t j, std::size_t k) {
  detail::require_all_revolute(model, "u_ijk");
  if (link >= model.dof() || j >= model.dof() || k >= model.dof())
    throw std::out_of_range("u_ijk: index out of range");
  return detail::DynChain(model, q).u2(link, j, k);
}

/// 4x4 pseudo-inertia of a link: second-moment matrix about the link
/// frame origin, first mass moments, and mass,
///
///   J = [ S          m rbar ]     S = tr(I)/2 * E3 - I,
///       [ m rbar^T   m      ]
///
/// so J = integral([r;1][r;1]^T dm) and is positive semidefinite for
/// physically consistent data. With the tensor convention used by
/// LinkInertia the off-diagonals of S are the negated tensor products
/// -Ixy, -Ixz, -Iyz; the diagonal is (-Ixx+Iyy+Izz)/2 and cyclic.
inline Eigen::Matrix4d pseudo_inertia(const LinkInertia& link) {
  Eigen::Matrix3d s =
      0.5 * link.inertia.trace() * Eigen::Matrix3d::Identity() - link.inertia;
  Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
  j.topLeftCorner<3, 3>() = s;
  j.topRightCorner<3, 1>() = link.mass * link.com;
  j.bottomLeftCorner<1, 3>() = link.mass * link.com.transpose();
  j(3, 3) = link.mass;
  return j;
}

/// Mass matrix M(q): M_ik = sum_{j >= max(i,k)} Tr(U_jk J_j U_ji^T).
inline Eigen::MatrixXd mass_matrix(const RobotModel& model,
                                   const Eigen::VectorXd& q) {
  detail::require_all_revolute(model, "mass_matrix");
  detail::check_dof(model, q, "mass_matrix");
  const std::size_t n = model.dof();
  detail::DynChain chain(model, q);

  std::vector<Eigen::Matrix4d> pseudo(n);
  for (std::size_t i = 0; i < n; ++i)
    pseudo[i] = pseudo_inertia(model.inertias[i]);

  // u_all[j][k] = U_jk for k <= j.
  std::vector<std::vector<Eigen::Matrix4d>> u_all(n);
  for (std::size_t j = 0; j < n; ++j) {
    u_all[j].resize(j + 1);
    for (std::size_t k = 0; k <= j; ++k) u_all[j][k] = chain.u(j, k);
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      double sum = 0.0;
      for (std::size_t j = std::max(i, k); j < n; ++j)
        sum += (u_all[j][k] * pseudo[j])
                   .cwiseProduct(u_all[j][i])
                   .sum();  // Tr(U_jk J_j U_ji^T)
      m(i, k) = sum;
      m(k, i) = sum;
    }
  }
  return m;
}

/// Velocity-product vector C(q, qdot):
/// C_i = sum_{k,m} h_ikm qdot_k qdot_m,
/// h_ikm = sum_{j >= max(i,k,m)} Tr(U_jkm J_j U_ji^T).
inline Eigen::VectorXd coriolis_vector(const RobotModel& model,
                                       const Eigen::VectorXd& q,
                                       const Eigen::VectorXd& qdot) {
  detail::require_all_revolute(model, "coriolis_vector");
  detail::check_dof(model, q, "coriolis_vector");
  detail::check_dof(model, qdot, "coriolis_vector qdot");
  const std::size_t n = model.dof();
  detail::DynChain chain(model, q);

  std::vector<Eigen::Matrix4d> pseudo(n);
  for (std::size_t i = 0; i < n; ++i)
    pseudo[i] = pseudo_inertia(model.inertias[i]);

  std::vector<std::vector<Eigen::Matrix4d>> u_all(n);
  for (std::size_t j = 0; j < n; ++j) {
    u_all[j].resize(j + 1);
    for (std::size_t k = 0; k <= j; ++k) u_all[j][k] = chain.u(j, k);
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    // Precompute J_j U_ji^T once per (j, i).
    std::vector<Eigen::Matrix4d> jut(j + 1);
    for (std::size_t i = 0; i <= j; ++i)
      jut[i] = pseudo[j] * u_all[j][i].transpose();
    for (std::size_t k = 0; k <= j; ++k) {
      for (std::size_t m = k; m <= j; ++m) {
        Eigen::Matrix4d ujkm = chain.u2(j, k, m);
        double qq = qdot[static_cast<Eigen::Index>(k)] *
                    qdot[static_cast<Eigen::Index>(m)] * (m == k ? 1.0 : 2.0);
        if (qq == 0.0) continue;
        for (std::size_t i = 0; i <= j; ++i)
          c[static_cast<Eigen::Index>(i)] +=
              (ujkm * jut[i]).trace() * qq;
      }
    }
  }
  return c;
}

/// Gravity vector G(q): G_i = sum_j -m_j g U_ji rbar_j with the fixed
/// gravity row (0, 0, -9.81, 0). One entry per joint.
inline Eigen::VectorXd gravity_vector(const RobotModel& model,
                                      const Eigen::VectorXd& q) {
  detail::require_all_revolute(model, "gravity_vector");
  detail::check_dof(model, q, "gravity_vector");
  const std::size_t n = model.dof();
  detail::DynChain chain(model, q);
  const Eigen::RowVector4d g = gravity_row();

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = i; j < n; ++j)
      sum += -model.inertias[j].mass *
             (g * (chain.u(j, i) * model.inertias[j].com_h())).value();
    out[static_cast<Eigen::Index>(i)] = sum;
  }
  return out;
}

/// Kinetic energy K(q, qdot) = 1/2 qdot^T M qdot (the same trace triple
/// sum as the mass matrix, contracted with the joint rates).
inline double kinetic_energy(const RobotModel& model,
                             const Eigen::VectorXd& q,
                             const Eigen::VectorXd& qdot) {
  detail::check_dof(model, qdot, "kinetic_energy qdot");
  return 0.5 * qdot.dot(mass_matrix(model, q) * qdot);
}

/// Potential energy P(q) = sum_i -m_i g (T^0_i rbar_i).
inline double potential_energy(const RobotModel& model,
                               const Eigen::VectorXd& q) {
  detail::require_all_revolute(model, "potential_energy");
  detail::check_dof(model, q, "potential_energy");
  detail::DynChain chain(model, q);
  const Eigen::RowVector4d g = gravity_row();
  double p = 0.0;
  for (std::size_t i = 0; i < model.dof(); ++i)
    p += -model.inertias[i].mass *
         (g * (chain.t[i + 1] * model.inertias[i].com_h())).value();
  return p;
}

struct DynTriple {
  Eigen::MatrixXd m;
  Eigen::VectorXd c;
  Eigen::VectorXd g;
};

inline DynTriple dyn_triple(const RobotModel& model, const Eigen::VectorXd& q,
                            const Eigen::VectorXd& qdot) {
  return DynTriple{mass_matrix(model, q), coriolis_vector(model, q, qdot),
                   gravity_vector(model, q)};
}

/// Joint torques tau = M(q) qddot + C(q, qdot) + G(q).
inline Eigen::VectorXd inverse_dynamics(const RobotModel& model,
                                        const Eigen::VectorXd& q,
                                        const Eigen::VectorXd& qdot,
                                        const Eigen::VectorXd& qddot) {
  detail::check_dof(model, qddot, "inverse_dynamics qddot");
  return mass_matrix(model, q) * qddot + coriolis_vector(model, q, qdot) +
         gravity_vector(model, q);
}

}  // namespace manipkd

#endif  // MANIPKD_DYNAMICS_HPP_
