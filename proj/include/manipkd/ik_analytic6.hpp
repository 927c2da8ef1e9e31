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
#ifndef MANIPKD_IK_ANALYTIC6_HPP_
#define MANIPKD_IK_ANALYTIC6_HPP_

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"

// Closed-form inverse kinematics for the 6-DOF reduced arm obtained by
// locking the elbow-roll joint (index 2) at zero. With that joint frozen
// the shoulder-pitch and elbow-pitch axes stay parallel, so the position
// problem collapses to a planar two-link arm (composite upper-arm length
// Lh, forearm length L4) riding on the base-roll azimuth, and the wrist
// decouples as a ZYZ Euler triple.

namespace manipkd {

/// Geometry of the reduced arm, derived from a 7-joint model of the
/// built-in arm's structure. The small forearm lateral offset (wrist_a)
/// is excluded from the planar constants; solve_6dof compensates for it.
struct Reduced6Constants {
  double L1 = 0.0;          // shoulder lateral offset (row 0, a)
  double Lh = 0.0;          // composite upper-arm length sqrt(L2^2+L3^2)
  double L4 = 0.0;          // forearm length (row 4, d)
  double shoulder_z = 0.0;  // base-to-shoulder height (row 0, d)
  double elbow_phi = 0.0;   // atan2(L3, L2): composite-link angle offset
  double wrist_a = 0.0;     // forearm lateral offset (row 4, a)
  double ee_offset = 0.0;   // wrist-to-EE length (row 6, d)

  static Reduced6Constants from_model(const RobotModel& model);
};

inline Reduced6Constants Reduced6Constants::from_model(
    const RobotModel& model) {
  constexpr double kPi = std::numbers::pi;
  auto near = [](double a, double b) { return std::abs(a - b) < 1e-9; };
  if (model.dof() != 7 || !model.all_revolute())
    throw std::invalid_argument(
        "reduced 6-dof solver: needs a 7-revolute-joint chain");
  const auto& j = model.joints;
  bool shape = near(j[1].dh.d, 0) && near(j[1].dh.a, 0) &&
               near(j[3].dh.d, 0) && near(j[3].dh.a, 0) &&
               near(j[5].dh.d, 0) && near(j[5].dh.a, 0) &&
               near(j[6].dh.a, 0) && near(j[6].dh.alpha, 0) &&
               near(j[0].dh.alpha, -kPi / 2) && near(j[1].dh.alpha, kPi / 2) &&
               near(j[2].dh.alpha, -kPi / 2) && near(j[3].dh.alpha, kPi / 2) &&
               near(j[4].dh.alpha, -kPi / 2) && near(j[5].dh.alpha, kPi / 2) &&
               near(j[0].dh.theta_offset, 0) &&
               near(j[1].dh.theta_offset, kPi / 2) &&
               near(j[2].dh.theta_offset, 0) &&
               near(j[3].dh.theta_offset, 0) &&
               near(j[4].dh.theta_offset, 0) &&
               near(j[5].dh.theta_offset, 0) && near(j[6].dh.theta_offset, 0);
  if (!shape)
    throw std::invalid_argument(
        "reduced 6-dof solver: chain structure is incompatible");

  Reduced6Constants k;
  k.L1 = j[0].dh.a;
  k.shoulder_z = j[0].dh.d;
  const double l2 = j[2].dh.d;  // upper-arm length
  const double l3 = j[2].dh.a;  // elbow lateral offset
  k.Lh = std::hypot(l2, l3);
  k.elbow_phi = std::atan2(l3, l2);
  k.L4 = j[4].dh.d;
  k.wrist_a = j[4].dh.a;
  k.ee_offset = j[6].dh.d;
  if (!(k.L1 > 0) || !(k.Lh > 0) || !(k.L4 > 0))
    throw std::invalid_argument(
        "reduced 6-dof solver: nonpositive link constants");
  return k;
}

/// One planar position solution in reduced-arm angles: theta1 is the
/// base azimuth, theta2 the composite upper-arm angle, theta4 the
/// elbow angle (downward-positive convention).
struct PositionJointSolution {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta4 = 0.0;
  bool from_positive_root = false;
  bool boundary_projected = false;  // target projected onto the annulus
};

struct PositionSolveResult {
  std::vector<PositionJointSolution> branches;  // 0..2
  bool reachable = false;
  bool shoulder_singular = false;
  // When unreachable: planar distance from the wrist center to the
  // reachable annulus.
  double unreachable_distance = 0.0;
};

namespace detail {

// Core planar two-link solve in the half plane: radial coordinate rho
// (measured from the base axis, shoulder offset L1 inside), height z
// relative to the shoulder. boundary_slack > 0 lets a caller accept
// targets up to that distance outside the reachable annulus by
// projecting onto the boundary (used by the full solver while it
// corrects for the forearm lateral offset).
inline PositionSolveResult planar_two_link(double rho, double z,
                                           const Reduced6Constants& k,
                                           double boundary_slack) {
  PositionSolveResult out;
  const double e = 2.0 * k.Lh * (k.L1 - rho);
  const double f = 2.0 * k.Lh * z;
  const double g = rho * rho + k.Lh * k.Lh + k.L1 * k.L1 - k.L4 * k.L4 +
                   z * z - 2.0 * k.L1 * rho;
  double disc = e * e + f * f - g * g;
  bool projected = false;
  if (disc < 0.0) {
    const double r = std::hypot(rho - k.L1, z);
    const double annulus_dist =
        std::max({r - (k.Lh + k.L4), std::abs(k.Lh - k.L4) - r, 0.0});
    if (disc > -1e-9 * std::max(1.0, e * e + f * f) ||
        annulus_dist <= boundary_slack) {
      disc = 0.0;  // tangent (stretched/folded) configuration
      projected = annulus_dist > 0.0;
    } else {
      out.unreachable_distance = annulus_dist;
      return out;
    }
  }
  const double root = std::sqrt(disc);

  std::array<std::optional<double>, 2> theta2s;  // [positive root, negative]
  const double denom = g - e;
  if (std::abs(denom) > 1e-12 * std::max(1.0, std::abs(g) + std::abs(e))) {
    theta2s[0] = 2.0 * std::atan((-f + root) / denom);
    theta2s[1] = 2.0 * std::atan((-f - root) / denom);
  } else {
    // Quadratic degenerates: one root at t -> inf, i.e. theta2 = pi.
    theta2s[0] = std::numbers::pi;
    if (std::abs(f) > 1e-12) theta2s[1] = 2.0 * std::atan(-(g + e) / (2.0 * f));
  }
  if (root == 0.0 && theta2s[0] && !theta2s[1]) theta2s[1] = theta2s[0];

  for (int i = 0; i < 2; ++i) {
    if (!theta2s[i]) continue;
    const double t2 = *theta2s[i];
    const double t4 = wrap_angle(
        std::atan2(-z - k.Lh * std::sin(t2), rho - k.L1 - k.Lh * std::cos(t2)) -
        t2);
    PositionJointSolution sol;
    sol.theta2 = t2;
    sol.theta4 = t4;
    sol.from_positive_root = (i == 0);
    sol.boundary_projected = projected;
    out.branches.push_back(sol);
  }
  out.reachable = !out.branches.empty();
  return out;
}

}  // namespace detail

/// Position joints of the reduced arm for a wrist-center target pose
/// (the end-effector offset already removed). Solves
///   rho = L1 + Lh cos(t2) + L4 cos(t2+t4)
///   z   =    - Lh sin(t2) - L4 sin(t2+t4)
/// via the tan-half-angle quadratic in t2; each returned branch satisfies
/// those equations to 1e-9. The radial coordinate is evaluated as
/// hypot(x, y), which equals x/cos(t1) wherever the latter is defined
/// and stays finite on the azimuth singularity. Coincident roots (zero
/// discriminant) are collapsed to a single branch.
inline PositionSolveResult solve_position_joints(const Pose& wrist_center,
                                                 const Reduced6Constants& k) {
  const double x = wrist_center.position.x();
  const double y = wrist_center.position.y();
  const double rho = std::hypot(x, y);
  if (rho < 1e-10) {
    // Wrist center on the base axis: azimuth undefined.
    PositionSolveResult out;
    out.shoulder_singular = true;
    return out;
  }
  PositionSolveResult out = detail::planar_two_link(
      rho, wrist_center.position.z() - k.shoulder_z, k, 0.0);
  for (auto& b : out.branches) b.theta1 = std::atan2(y, x);
  if (out.branches.size() == 2 &&
      std::abs(out.branches[0].theta2 - out.branches[1].theta2) < 1e-12)
    out.branches.pop_back();
  return out;
}

struct WristSolution {
  double theta5 = 0.0;
  double theta6 = 0.0;
  double theta7 = 0.0;
  bool singular = false;  // sin(theta6) ~ 0: theta5+theta7 only jointly fixed
};

namespace detail {

// Rotation of the first four rows at reduced-arm angles (elbow roll 0).
inline Eigen::Matrix3d rotation_to_elbow(const RobotModel& model,
                                         const Reduced6Constants& k,
                                         double theta1, double theta2,
                                         double theta4) {
  const double qs[4] = {theta1, theta2 - k.elbow_phi, 0.0,
                        theta4 + k.elbow_phi};
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 4; ++i)
    r = r * rot_z(qs[i] + model.joints[i].dh.theta_offset) *
        rot_x(model.joints[i].dh.alpha);
  return r;
}

// ZYZ extraction of the wrist rotation M = Rz(t5) Ry(t6) Rz(t7), t6 >= 0
// branch; at the gimbal singularity t5 is pinned to 0 and t7 carries the
// sum/difference.
inline WristSolution extract_wrist(const Eigen::Matrix3d& m) {
  WristSolution w;
  const double s6 = std::hypot(m(0, 2), m(1, 2));
  if (s6 < 1e-7) {
    w.singular = true;
    w.theta5 = 0.0;
    if (m(2, 2) > 0.0) {
      w.theta6 = 0.0;
      w.theta7 = std::atan2(m(1, 0), m(0, 0));
    } else {
      w.theta6 = std::numbers::pi;
      w.theta7 = std::atan2(m(1, 0), m(1, 1));
    }
    return w;
  }
  w.theta5 = std::atan2(m(1, 2), m(0, 2));
  w.theta6 = std::atan2(s6, m(2, 2));
  w.theta7 = std::atan2(m(2, 1), -m(2, 0));
  return w;
}

}  // namespace detail

/// Wrist angles from the target rotation once the position joints are
/// known. The last three rotations compose to Rz(t5) Ry(t6) Rz(t7) in the
/// elbow frame, so this is a ZYZ Euler extraction with the t6 >= 0
/// branch; at the gimbal singularity theta5 is pinned to 0 and theta7
/// carries the sum.
inline WristSolution solve_wrist(const Eigen::Matrix3d& r06, double theta1,
                                 double theta2, double theta4,
                                 const RobotModel& model) {
  const Reduced6Constants k = Reduced6Constants::from_model(model);
  Eigen::Matrix3d r40 =
      detail::rotation_to_elbow(model, k, theta1, theta2, theta4);
  return detail::extract_wrist(r40.transpose() * r06);
}

struct Analytic6Branch {
  Eigen::VectorXd q;  // 7 joint values, elbow roll exactly 0
  std::string label;  // "elbow-up" | "elbow-down"
  bool reachable = false;  // verified round trip within module tolerance
  bool within_limits = false;
  bool wrist_singular = false;
  double pos_err = 0.0;
  double rot_err = 0.0;
};

struct Analytic6Solution {
  std::vector<Analytic6Branch> branches;
  bool target_reachable = false;  // some branch verified
  double unreachable_distance = 0.0;
  bool shoulder_singular = false;
};

namespace detail {

inline const char* elbow_label(double theta2, const Reduced6Constants& k,
                               double rho, double z) {
  // Elbow position relative to the shoulder-to-wrist chord in the
  // vertical half plane (r right, height up).
  double er = k.Lh * std::cos(theta2);
  double eh = -k.Lh * std::sin(theta2);
  double cross = (rho - k.L1) * eh - z * er;
  return cross >= 0.0 ? "elbow-up" : "elbow-down";
}

// State of one wrist-roll probe: the reduced-arm joints consistent with
// the wrist-center position for a trial forearm roll u, plus the wrist
// triple demanded by the target orientation.
struct RollProbe {
  bool ok = false;
  bool infeasible = false;    // |wrist_a sin u| exceeds the target radius
  bool unreachable = false;
  double unreachable_distance = 0.0;
  PositionJointSolution sol;  // theta1/theta2/theta4 for this roll
  double rho_inplane = 0.0;
  double z_inplane = 0.0;
  WristSolution wrist;
  double q4 = 0.0, q5 = 0.0, q6 = 0.0;  // basin-resolved wrist joints
  double mismatch = 0.0;                // wrap(q4 - u), current basin
};

// Position solve for a fixed trial forearm roll u. With the elbow roll
// locked, the wrist center sits at a half-plane point plus the constant
// out-of-plane component wrist_a sin(u), so the azimuth has a closed
// form. In the half plane, the forearm tip plus the turning in-plane
// offset wrist_a cos(u) trace a circle of radius sqrt(L4^2 + w^2) about
// the effective target, so the elbow is a circle-circle intersection
// with the shoulder circle of radius Lh: fully closed form per roll.
// Orientation consistency of u itself is the caller's 1-D root find.
inline RollProbe probe_roll(const RobotModel& model,
                            const Reduced6Constants& k, const Pose& goal,
                            const Eigen::Vector3d& wrist_center,
                            bool positive_root, double u) {
  RollProbe out;
  const double rho_t = std::hypot(wrist_center.x(), wrist_center.y());
  const double psi_t = std::atan2(wrist_center.y(), wrist_center.x());
  const double h_t = wrist_center.z() - k.shoulder_z;

  const double nu = k.wrist_a * std::sin(u);  // out-of-plane offset
  const double radial_sq = rho_t * rho_t - nu * nu;
  if (radial_sq <= 1e-16) {
    out.infeasible = true;
    return out;
  }
  const double r_eff = std::sqrt(radial_sq);
  const double theta1 = psi_t - std::atan2(nu, r_eff);
  const double w = k.wrist_a * std::cos(u);  // in-plane offset magnitude

  // Half-plane frame (r right, height up): shoulder at (L1, 0),
  // effective wrist-center target at (r_eff, h_t). The elbow satisfies
  // |E - S| = Lh and |E - T| = sqrt(L4^2 + w^2).
  const double big_a = std::hypot(k.L4, w);
  const double delta = std::atan2(k.L4, w);
  const double dx = r_eff - k.L1, dy = h_t;
  const double d = std::hypot(dx, dy);
  const double lo = std::abs(k.Lh - big_a), hi = k.Lh + big_a;
  if (d < 1e-12) {
    out.unreachable = true;
    out.unreachable_distance = lo;
    return out;
  }
  const double aa = (k.Lh * k.Lh - big_a * big_a + d * d) / (2.0 * d);
  double hc2 = k.Lh * k.Lh - aa * aa;
  bool projected = false;
  if (hc2 < 0.0) {
    const double annulus_dist = std::max({d - hi, lo - d, 0.0});
    if (annulus_dist <= 1e-9) {
      hc2 = 0.0;  // tangent (stretched/folded) configuration
      projected = annulus_dist > 0.0;
    } else {
      out.unreachable = true;
      out.unreachable_distance = annulus_dist;
      return out;
    }
  }
  const double hc = std::sqrt(hc2);
  const double ux = dx / d, uy = dy / d;
  const double side = positive_root ? 1.0 : -1.0;
  const double ex = k.L1 + aa * ux - side * hc * uy;  // elbow, half plane
  const double ey = aa * uy + side * hc * ux;
  const double theta2 = std::atan2(-ey, ex - k.L1);
  const double xi = std::atan2(ex - r_eff, ey - h_t);
  const double gamma = xi + delta;
  const double theta4 = wrap_angle(gamma - theta2);

  out.sol.theta1 = theta1;
  out.sol.theta2 = theta2;
  out.sol.theta4 = theta4;
  out.sol.from_positive_root = positive_root;
  out.sol.boundary_projected = projected;
  out.rho_inplane = r_eff + w * std::sin(gamma);
  out.z_inplane = h_t + w * std::cos(gamma);

  Eigen::Matrix3d r40 = rotation_to_elbow(model, k, theta1, out.sol.theta2,
                                          out.sol.theta4);
  WristSolution ws = extract_wrist(r40.transpose() * goal.rotation);
  out.wrist = ws;
  if (ws.singular) {
    // Orientation leaves the roll free; adopt the trial roll so the
    // lateral offset stays consistent.
    out.q4 = u;
    out.q5 = ws.theta6;  // 0 or pi
    out.q6 = (ws.theta6 == 0.0) ? wrap_angle(ws.theta7 - u)
                                : wrap_angle(ws.theta7 + u);
    out.mismatch = 0.0;
    out.ok = true;
    return out;
  }
  // Resolve the ZYZ double cover to the representation nearest the trial
  // roll: (t5, t6, t7) or (t5 + pi, -t6, t7 + pi).
  double roll_gap = wrap_angle(ws.theta5 - u);
  if (std::abs(roll_gap) <= std::numbers::pi / 2) {
    out.q4 = ws.theta5;
    out.q5 = ws.theta6;
    out.q6 = ws.theta7;
    out.mismatch = roll_gap;
  } else {
    out.q4 = wrap_angle(ws.theta5 + std::numbers::pi);
    out.q5 = -ws.theta6;
    out.q6 = wrap_angle(ws.theta7 + std::numbers::pi);
    out.mismatch = wrap_angle(out.q4 - u);
  }
  out.ok = true;
  return out;
}

inline Eigen::VectorXd assemble_joints(const Reduced6Constants& k,
                                       const RollProbe& p) {
  Eigen::VectorXd q(7);
  q << p.sol.theta1, p.sol.theta2 - k.elbow_phi, 0.0,
      p.sol.theta4 + k.elbow_phi, p.q4, p.q5, p.q6;
  for (int i = 0; i < 7; ++i) q[i] = wrap_angle(q[i]);
  q[2] = 0.0;
  return q;
}

}  // namespace detail

/// Full 6-DOF solve: strips the tool and end-effector offset from the
/// target, then per elbow branch locates every forearm roll at which the
/// orientation-derived wrist triple agrees with the roll used for the
/// lateral-offset correction (bracketing plus bisection on the periodic
/// mismatch function), and keeps the best verified candidate per branch.
/// Every returned branch is re-verified through the forward chain;
/// limit-violating branches are flagged, not dropped.
inline Analytic6Solution solve_6dof(const RobotModel& model,
                                    const Pose& target) {
  const Reduced6Constants k = Reduced6Constants::from_model(model);
  Analytic6Solution out;

  const Pose goal = target * model.tool.inverse();
  // Wrist center: the end-effector offset lies along the target z axis
  // regardless of the final roll.
  const Eigen::Vector3d wc =
      goal.position - k.ee_offset * goal.rotation.col(2);

  constexpr double kPi = std::numbers::pi;
  double min_unreach = std::numeric_limits<double>::infinity();
  bool any_probe_ok = false;
  bool all_infeasible = true;

  for (int branch_idx = 0; branch_idx < 2; ++branch_idx) {
    const bool positive_root = (branch_idx == 0);

    // Near the wrist gimbal the mismatch function oscillates rapidly, so
    // the scan deepens until some root is bracketed.
    std::vector<detail::RollProbe> candidates;
    for (int grid_n : {24, 120, 720}) {
      std::vector<std::optional<detail::RollProbe>> grid(grid_n);
      for (int j = 0; j < grid_n; ++j) {
        double u = -kPi + 2.0 * kPi * j / grid_n;
        detail::RollProbe p =
            detail::probe_roll(model, k, goal, wc, positive_root, u);
        if (!p.infeasible) all_infeasible = false;
        if (p.unreachable)
          min_unreach = std::min(min_unreach, p.unreachable_distance);
        if (p.ok) {
          grid[j] = p;
          any_probe_ok = true;
        }
      }

      // Collect consistent rolls: direct hits, bracketed sign changes,
      // and reachability edges (a stretched arm can place the root
      // exactly on the boundary of the feasible roll interval).
      auto grid_u = [&](int j) { return -kPi + 2.0 * kPi * j / grid_n; };
      auto bisect_mismatch = [&](double ua, double fa, double ub,
                                 double fb) -> std::optional<detail::RollProbe> {
        detail::RollProbe best;
        for (int it = 0; it < 60; ++it) {
          double um = 0.5 * (ua + ub);
          detail::RollProbe pm =
              detail::probe_roll(model, k, goal, wc, positive_root, um);
          if (!pm.ok) break;
          best = pm;
          if (std::abs(pm.mismatch) < 1e-13 || (ub - ua) < 1e-15) break;
          if (fa * pm.mismatch <= 0.0) {
            ub = um;
            fb = pm.mismatch;
          } else {
            ua = um;
            fa = pm.mismatch;
          }
        }
        if (best.ok && std::abs(best.mismatch) < 1e-9) return best;
        return std::nullopt;
      };
      // Golden-section |mismatch| minimization for tangential (double)
      // roots, which touch zero without a sign change.
      auto minimize_mismatch =
          [&](double ua, double ub) -> std::optional<detail::RollProbe> {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        auto eval = [&](double u) {
          detail::RollProbe p =
              detail::probe_roll(model, k, goal, wc, positive_root, u);
          return p;
        };
        double x1 = ub - gr * (ub - ua), x2 = ua + gr * (ub - ua);
        detail::RollProbe p1 = eval(x1), p2 = eval(x2);
        auto score = [](const detail::RollProbe& p) {
          return p.ok ? std::abs(p.mismatch)
                      : std::numeric_limits<double>::infinity();
        };
        detail::RollProbe best = score(p1) < score(p2) ? p1 : p2;
        for (int it = 0; it < 80 && (ub - ua) > 1e-15; ++it) {
          if (score(p1) < score(p2)) {
            ub = x2;
            x2 = x1;
            p2 = p1;
            x1 = ub - gr * (ub - ua);
            p1 = eval(x1);
          } else {
            ua = x1;
            x1 = x2;
            p1 = p2;
            x2 = ua + gr * (ub - ua);
            p2 = eval(x2);
          }
          if (score(p1) < score(best)) best = p1;
          if (score(p2) < score(best)) best = p2;
        }
        if (best.ok && std::abs(best.mismatch) < 1e-6) return best;
        return std::nullopt;
      };
      for (int j = 0; j < grid_n; ++j) {
        int jn = (j + 1) % grid_n;
        bool va = grid[j].has_value(), vb = grid[jn].has_value();
        if (va && (grid[j]->wrist.singular ||
                   std::abs(grid[j]->mismatch) < 1e-12)) {
          candidates.push_back(*grid[j]);
          continue;
        }
        double ua = grid_u(j), ub = grid_u(jn);
        if (va && vb) {
          double fa = grid[j]->mismatch, fb = grid[jn]->mismatch;
          // Skip the representation-switch discontinuity (|f| jumps near
          // pi/2 there; true roots have f -> 0).
          if (fa * fb >= 0.0 || std::abs(fa) + std::abs(fb) > 0.9 * kPi)
            continue;
          if (auto r = bisect_mismatch(ua, fa, ub, fb))
            candidates.push_back(*r);
        } else if (va != vb) {
          // Locate the feasibility edge, then treat (valid grid point,
          // innermost feasible probe) as a mismatch bracket when the
          // signs differ; otherwise the root sits on the edge itself.
          detail::RollProbe edge = va ? *grid[j] : *grid[jn];
          double u_edge = va ? ua : ub;
          for (int it = 0; it < 60; ++it) {
            double um = 0.5 * (ua + ub);
            detail::RollProbe pm =
                detail::probe_roll(model, k, goal, wc, positive_root, um);
            if (pm.ok == va) {
              ua = um;
              if (va) {
                edge = pm;
                u_edge = um;
              }
            } else {
              ub = um;
              if (!va) {
                edge = pm;
                u_edge = um;
              }
            }
            if ((ub - ua) < 1e-15) break;
          }
          if (!edge.ok) continue;
          const detail::RollProbe& anchor = va ? *grid[j] : *grid[jn];
          double u_anchor = grid_u(va ? j : jn);
          double lo_u = std::min(u_anchor, u_edge);
          double hi_u = std::max(u_anchor, u_edge);
          if (!edge.wrist.singular && !anchor.wrist.singular &&
              anchor.mismatch * edge.mismatch < 0.0 &&
              std::abs(anchor.mismatch) + std::abs(edge.mismatch) <
                  0.9 * kPi) {
            if (auto r = bisect_mismatch(
                    lo_u, u_anchor < u_edge ? anchor.mismatch : edge.mismatch,
                    hi_u, u_anchor < u_edge ? edge.mismatch : anchor.mismatch))
              candidates.push_back(*r);
            else
              candidates.push_back(edge);
          } else {
            // Same sign up to the boundary: the root is tangential or on
            // the edge itself.
            if (auto r = minimize_mismatch(lo_u, hi_u))
              candidates.push_back(*r);
            else
              candidates.push_back(edge);
          }
        }
      }
      // Interior tangential roots: same-sign |mismatch| dips on the grid.
      for (int j = 0; j < grid_n; ++j) {
        int jp = (j + grid_n - 1) % grid_n, jn = (j + 1) % grid_n;
        if (!grid[jp] || !grid[j] || !grid[jn]) continue;
        double fp = grid[jp]->mismatch, fc = grid[j]->mismatch,
               fn = grid[jn]->mismatch;
        if (grid[j]->wrist.singular) continue;
        if (fp * fc <= 0.0 || fc * fn <= 0.0) continue;  // bracket handles
        if (std::abs(fc) >= std::abs(fp) || std::abs(fc) > std::abs(fn))
          continue;
        if (std::abs(fc) > 0.1) continue;
        if (auto r = minimize_mismatch(grid_u(jp), grid_u(jp) +
                                                       4.0 * kPi / grid_n))
          candidates.push_back(*r);
      }
      // Deepen unless some candidate already verifies through the chain.
      bool verified = false;
      for (const auto& c : candidates) {
        Eigen::VectorXd q = detail::assemble_joints(k, c);
        Eigen::Matrix<double, 6, 1> err = pose_error(fpk(model, q), target);
        if (err.head<3>().norm() <= 1e-6 && err.tail<3>().norm() <= 1e-6)
          verified = true;
      }
      if (verified) break;
    }

    // Keep the best verified candidate for this elbow branch.
    std::optional<Analytic6Branch> best;
    auto better = [&](const Analytic6Branch& a, const Analytic6Branch& b) {
      if (a.within_limits != b.within_limits) return a.within_limits;
      double ea = a.pos_err + a.rot_err, eb = b.pos_err + b.rot_err;
      if (std::abs(ea - eb) > 1e-12) return ea < eb;
      if (std::abs(std::abs(a.q[5]) - std::abs(b.q[5])) > 1e-12)
        return std::abs(a.q[5]) < std::abs(b.q[5]);
      return std::abs(a.q[4]) < std::abs(b.q[4]);
    };
    for (const auto& c : candidates) {
      Analytic6Branch b;
      b.q = detail::assemble_joints(k, c);
      b.wrist_singular = c.wrist.singular;
      Eigen::Matrix<double, 6, 1> err = pose_error(fpk(model, b.q), target);
      b.pos_err = err.head<3>().norm();
      b.rot_err = err.tail<3>().norm();
      if (b.pos_err > 1e-4) continue;  // spurious bracket
      b.reachable = b.pos_err <= 1e-6 && b.rot_err <= 1e-6;
      b.within_limits = model.within_limits(b.q);
      b.label = detail::elbow_label(c.sol.theta2, k, c.rho_inplane,
                                    c.z_inplane);
      if (!best || better(b, *best)) best = b;
    }
    if (!best) continue;

    // Coincident elbow branches (boundary targets) collapse to one.
    bool duplicate = false;
    for (const auto& prev : out.branches)
      if ((prev.q - best->q).cwiseAbs().maxCoeff() < 1e-9) duplicate = true;
    if (!duplicate) out.branches.push_back(std::move(*best));
  }

  if (all_infeasible) out.shoulder_singular = true;
  if (!any_probe_ok && std::isfinite(min_unreach))
    out.unreachable_distance = min_unreach;
  for (const auto& b : out.branches)
    if (b.reachable) out.target_reachable = true;
  return out;
}

}  // namespace manipkd

#endif  // MANIPKD_IK_ANALYTIC6_HPP_
