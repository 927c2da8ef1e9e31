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
//
// manipkd command-line tool: forward/inverse kinematics, Jacobian
// analysis, dynamics, workspace sampling and trajectory resolution for
// serial manipulators, with the Baxter left arm built in. All output is
// machine-readable CSV with locale-independent, reproducible formatting.
// Exit codes: 0 success, 1 usage/validation error, 2 solver not solved.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "manipkd/baxter_closed_form.hpp"
#include "manipkd/dynamics.hpp"
#include "manipkd/ik_analytic6.hpp"
#include "manipkd/ik_iterative.hpp"
#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"
#include "manipkd/model_io.hpp"
#include "manipkd/num_format.hpp"
#include "manipkd/trajectory.hpp"
#include "manipkd/workspace.hpp"

namespace {

using manipkd::format_double;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty())
      throw std::invalid_argument(std::string(what) + ": empty element");
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw std::invalid_argument(std::string(what) + ": bad number '" + tok +
                                  "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text, const char* what) {
  auto vals = parse_list(text, what);
  Eigen::VectorXd v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

Eigen::Vector3d parse_vec3(const std::string& text, const char* what) {
  auto vals = parse_list(text, what);
  if (vals.size() != 3)
    throw std::invalid_argument(std::string(what) + ": expected 3 values");
  return Eigen::Vector3d(vals[0], vals[1], vals[2]);
}

Eigen::Matrix3d parse_quat_rotation(const std::string& text,
                                    const char* what) {
  auto vals = parse_list(text, what);
  if (vals.size() != 4)
    throw std::invalid_argument(std::string(what) +
                                ": expected quaternion w,x,y,z");
  Eigen::Quaterniond q(vals[0], vals[1], vals[2], vals[3]);
  if (q.norm() < 1e-12)
    throw std::invalid_argument(std::string(what) + ": zero quaternion");
  return q.normalized().toRotationMatrix();
}

// Unit quaternion (w,x,y,z) with a deterministic sign convention.
std::array<double, 4> rotation_to_quat(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0 || (q.w() == 0 && (q.x() < 0 || (q.x() == 0 && (q.y() < 0 ||
      (q.y() == 0 && q.z() < 0))))))
    q.coeffs() *= -1.0;
  return {q.w(), q.x(), q.y(), q.z()};
}

manipkd::RobotModel resolve_model(const std::string& selector) {
  if (selector == "baxter-left") return manipkd::builtin_baxter_left();
  if (selector.rfind("planar2r:", 0) == 0) {
    auto vals = parse_list(selector.substr(9), "planar2r lengths");
    if (vals.size() != 2)
      throw std::invalid_argument("planar2r selector needs a1,a2");
    return manipkd::builtin_planar_2r(vals[0], vals[1]);
  }
  return manipkd::load_model_file(selector);
}

void check_q(const manipkd::RobotModel& model, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != model.dof())
    throw std::invalid_argument(
        "--q: expected " + std::to_string(model.dof()) + " joint values, got " +
        std::to_string(q.size()));
}

std::string csv_row(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial-manipulator kinematics and dynamics toolkit"};
  app.require_subcommand(1);

  std::string model_sel;
  if (const char* env = std::getenv("MANIPKD_MODEL_PATH"); env && *env)
    model_sel = env;
  else
    model_sel = "baxter-left";
  app.add_option("--model", model_sel,
                 "Model: baxter-left | planar2r:a1,a2 | path to model file")
      ->capture_default_str();
  std::string out_path;
  app.add_option("--out", out_path, "Write output to file instead of stdout");

  // fpk
  auto* cmd_fpk = app.add_subcommand(
      "fpk", "End-effector pose for joint values: x,y,z,qw,qx,qy,qz");
  std::string fpk_q;
  cmd_fpk->add_option("--q", fpk_q, "Joint values, comma-separated (rad)")
      ->required();

  // skeleton
  auto* cmd_skel = app.add_subcommand(
      "skeleton", "Frame origins along the chain: frame,x,y,z per line");
  std::string skel_q;
  cmd_skel->add_option("--q", skel_q, "Joint values (rad)")->required();

  // jacobian
  auto* cmd_jac = app.add_subcommand(
      "jacobian", "6xn geometric Jacobian rows plus the manipulability index");
  std::string jac_q;
  cmd_jac->add_option("--q", jac_q, "Joint values (rad)")->required();

  // ik6
  auto* cmd_ik6 = app.add_subcommand(
      "ik6", "Closed-form 6-DOF IK (elbow roll locked at zero)");
  std::string ik6_pos, ik6_quat;
  cmd_ik6->add_option("--target-pos", ik6_pos, "Target position x,y,z (m)")
      ->required();
  cmd_ik6->add_option("--target-quat", ik6_quat, "Target quaternion w,x,y,z")
      ->required();

  // ik
  auto* cmd_ik = app.add_subcommand("ik", "Iterative IK solvers");
  std::string ik_solver = "pinv-rr", ik_pos, ik_quat, ik_seed_q;
  std::uint64_t ik_rng_seed = 12345;
  double ik_step = 0.01, ik_tol_pos = 1e-3, ik_tol_rot = 1e-2;
  int ik_max_iters = 500, ik_max_restarts = 50;
  cmd_ik->add_option("--solver", ik_solver, "pinv | pinv-rr | ccd")
      ->check(CLI::IsMember({"pinv", "pinv-rr", "ccd"}))
      ->capture_default_str();
  cmd_ik->add_option("--target-pos", ik_pos, "Target position x,y,z (m)")
      ->required();
  cmd_ik->add_option("--target-quat", ik_quat,
                     "Target quaternion w,x,y,z (ignored by ccd)");
  cmd_ik->add_option("--seed-q", ik_seed_q, "Seed joint values (rad)")
      ->required();
  cmd_ik->add_option("--rng-seed", ik_rng_seed, "Restart RNG seed")
      ->capture_default_str();
  cmd_ik->add_option("--step", ik_step, "Step size (m)")
      ->capture_default_str();
  cmd_ik->add_option("--tol-pos", ik_tol_pos, "Position tolerance (m)")
      ->capture_default_str();
  cmd_ik->add_option("--tol-rot", ik_tol_rot, "Rotation tolerance (rad)")
      ->capture_default_str();
  cmd_ik->add_option("--max-iters", ik_max_iters, "Iteration cap per attempt")
      ->capture_default_str();
  cmd_ik->add_option("--max-restarts", ik_max_restarts, "Restart cap")
      ->capture_default_str();

  // dynamics
  auto* cmd_dyn = app.add_subcommand(
      "dynamics", "Mass matrix, velocity-product and gravity vectors");
  std::string dyn_q, dyn_qdot, dyn_qddot;
  cmd_dyn->add_option("--q", dyn_q, "Joint values (rad)")->required();
  cmd_dyn->add_option("--qdot", dyn_qdot, "Joint rates (rad/s)");
  cmd_dyn->add_option("--qddot", dyn_qddot, "Joint accelerations (rad/s^2)");

  // workspace
  auto* cmd_ws = app.add_subcommand(
      "workspace", "Monte Carlo end-effector cloud with manipulability bands");
  std::size_t ws_count = 100000;
  std::uint64_t ws_seed = 1;
  cmd_ws->add_option("--count", ws_count, "Sample count")
      ->capture_default_str();
  cmd_ws->add_option("--rng-seed", ws_seed, "Sampling seed")
      ->capture_default_str();

  // traj
  auto* cmd_traj = app.add_subcommand(
      "traj", "Resolve a Cartesian path into joint space (warm-started IK)");
  cmd_traj->require_subcommand(1);
  auto* cmd_circle = cmd_traj->add_subcommand(
      "circle", "Generate and resolve a circular path");
  std::string tc_center, tc_normal = "0,0,1", tc_seed_q, tc_quat;
  double tc_radius = 0.1;
  std::size_t tc_count = 100;
  std::uint64_t tc_rng_seed = 12345;
  bool tc_strict = false;
  cmd_circle->add_option("--center", tc_center, "Circle center x,y,z (m)")
      ->required();
  cmd_circle->add_option("--radius", tc_radius, "Radius (m)")
      ->capture_default_str();
  cmd_circle->add_option("--normal", tc_normal, "Unit plane normal x,y,z")
      ->capture_default_str();
  cmd_circle->add_option("--count", tc_count, "Waypoint count")
      ->capture_default_str();
  cmd_circle->add_option("--seed-q", tc_seed_q, "Start joint values (rad)")
      ->required();
  cmd_circle->add_option("--orient-quat", tc_quat,
                         "Held orientation w,x,y,z (default: pose at seed-q)");
  cmd_circle->add_option("--rng-seed", tc_rng_seed, "Solver restart seed")
      ->capture_default_str();
  cmd_circle->add_flag("--strict", tc_strict, "Abort on first failed waypoint");
  auto* cmd_follow = cmd_traj->add_subcommand(
      "follow", "Resolve waypoints from a CSV file (idx,x,y,z,qw,qx,qy,qz)");
  std::string tf_in, tf_seed_q;
  std::uint64_t tf_rng_seed = 12345;
  bool tf_strict = false;
  cmd_follow->add_option("--in", tf_in, "Input waypoint CSV")->required();
  cmd_follow->add_option("--seed-q", tf_seed_q, "Start joint values (rad)")
      ->required();
  cmd_follow->add_option("--rng-seed", tf_rng_seed, "Solver restart seed")
      ->capture_default_str();
  cmd_follow->add_flag("--strict", tf_strict, "Abort on first failed waypoint");

  // Global options (--model, --out) may appear after the subcommand.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) {
         return true;
       })) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands(
             [](const CLI::App*) { return true; }))
      nested->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints usage; 0 covers --help
    return code == 0 ? 0 : 1;
  }

  try {
    manipkd::RobotModel model = resolve_model(model_sel);
    Output out(out_path);
    std::ostream& os = out.stream();

    if (*cmd_fpk) {
      Eigen::VectorXd q = parse_vector(fpk_q, "--q");
      check_q(model, q);
      manipkd::Pose pose = manipkd::fpk(model, q);
      auto quat = rotation_to_quat(pose.rotation);
      os << format_double(pose.position.x()) << ','
         << format_double(pose.position.y()) << ','
         << format_double(pose.position.z()) << ',' << format_double(quat[0])
         << ',' << format_double(quat[1]) << ',' << format_double(quat[2])
         << ',' << format_double(quat[3]) << '\n';
      return 0;
    }

    if (*cmd_skel) {
      Eigen::VectorXd q = parse_vector(skel_q, "--q");
      check_q(model, q);
      auto origins = manipkd::frame_origins(model, q);
      for (std::size_t i = 0; i < origins.size(); ++i)
        os << i << ',' << format_double(origins[i].x()) << ','
           << format_double(origins[i].y()) << ','
           << format_double(origins[i].z()) << '\n';
      return 0;
    }

    if (*cmd_jac) {
      Eigen::VectorXd q = parse_vector(jac_q, "--q");
      check_q(model, q);
      manipkd::Jacobian j = manipkd::jacobian(model, q);
      for (int r = 0; r < 6; ++r) os << csv_row(j.row(r).transpose()) << '\n';
      os << "yoshikawa," << format_double(manipkd::yoshikawa(j)) << '\n';
      return 0;
    }

    if (*cmd_ik6) {
      manipkd::Pose target;
      target.position = parse_vec3(ik6_pos, "--target-pos");
      target.rotation = parse_quat_rotation(ik6_quat, "--target-quat");
      manipkd::Analytic6Solution sol = manipkd::solve_6dof(model, target);
      for (const auto& b : sol.branches) {
        os << b.label << ',' << csv_row(b.q) << ','
           << (b.within_limits ? 1 : 0) << ',' << format_double(b.pos_err)
           << ',' << format_double(b.rot_err) << '\n';
      }
      return sol.target_reachable ? 0 : 2;
    }

    if (*cmd_ik) {
      manipkd::IkParams params;
      params.step = ik_step;
      params.tol_pos = ik_tol_pos;
      params.tol_rot = ik_tol_rot;
      params.max_iters = ik_max_iters;
      params.max_restarts = ik_max_restarts;
      params.rng_seed = ik_rng_seed;
      Eigen::VectorXd seed = parse_vector(ik_seed_q, "--seed-q");
      check_q(model, seed);
      Eigen::Vector3d pos = parse_vec3(ik_pos, "--target-pos");

      manipkd::IkResult r;
      if (ik_solver == "ccd") {
        r = manipkd::solve_ccd(model, pos, seed, params);
      } else {
        manipkd::Pose target;
        target.position = pos;
        if (ik_quat.empty())
          throw std::invalid_argument(
              "--target-quat is required for pinv/pinv-rr");
        target.rotation = parse_quat_rotation(ik_quat, "--target-quat");
        r = ik_solver == "pinv"
                ? manipkd::solve_pinv(model, target, seed, params)
                : manipkd::solve_pinv_rr(model, target, seed, params);
      }
      os << manipkd::ik_status_name(r.status) << ',' << r.iterations << ','
         << r.restarts << ',' << format_double(r.final_pos_err) << ','
         << format_double(r.final_rot_err) << ',' << csv_row(r.q) << '\n';
      return r.status == manipkd::IkStatus::kSolved ? 0 : 2;
    }

    if (*cmd_dyn) {
      Eigen::VectorXd q = parse_vector(dyn_q, "--q");
      check_q(model, q);
      Eigen::VectorXd qdot = Eigen::VectorXd::Zero(q.size());
      Eigen::VectorXd qddot = Eigen::VectorXd::Zero(q.size());
      bool have_rates = false;
      if (!dyn_qdot.empty()) {
        qdot = parse_vector(dyn_qdot, "--qdot");
        check_q(model, qdot);
        have_rates = true;
      }
      if (!dyn_qddot.empty()) {
        qddot = parse_vector(dyn_qddot, "--qddot");
        check_q(model, qddot);
        have_rates = true;
      }
      manipkd::DynTriple dyn = manipkd::dyn_triple(model, q, qdot);
      for (Eigen::Index r = 0; r < dyn.m.rows(); ++r)
        os << csv_row(dyn.m.row(r).transpose()) << '\n';
      os << "C," << csv_row(dyn.c) << '\n';
      os << "G," << csv_row(dyn.g) << '\n';
      if (have_rates)
        os << "tau," << csv_row(dyn.m * qddot + dyn.c + dyn.g) << '\n';
      return 0;
    }

    if (*cmd_ws) {
      auto samples = manipkd::sample_workspace(model, ws_count, ws_seed);
      os << manipkd::export_workspace_csv(samples);
      return 0;
    }

    if (*cmd_traj) {
      manipkd::IkParams params;
      manipkd::CartesianPath path;
      Eigen::VectorXd seed;
      bool strict = false;
      if (*cmd_circle) {
        seed = parse_vector(tc_seed_q, "--seed-q");
        check_q(model, seed);
        Eigen::Matrix3d orient =
            tc_quat.empty() ? manipkd::fpk(model, seed).rotation
                            : parse_quat_rotation(tc_quat, "--orient-quat");
        path = manipkd::circle_waypoints(parse_vec3(tc_center, "--center"),
                                         tc_radius,
                                         parse_vec3(tc_normal, "--normal"),
                                         tc_count, orient);
        params.rng_seed = tc_rng_seed;
        strict = tc_strict;
      } else {
        seed = parse_vector(tf_seed_q, "--seed-q");
        check_q(model, seed);
        std::ifstream in(tf_in);
        if (!in)
          throw std::invalid_argument("cannot open waypoint file: " + tf_in);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line.rfind("idx", 0) == 0) continue;
          auto vals = parse_list(line, "waypoint row");
          if (vals.size() != 8)
            throw std::invalid_argument(
                "waypoint row needs idx,x,y,z,qw,qx,qy,qz");
          manipkd::Pose p;
          p.position = Eigen::Vector3d(vals[1], vals[2], vals[3]);
          Eigen::Quaterniond quat(vals[4], vals[5], vals[6], vals[7]);
          if (quat.norm() < 1e-12)
            throw std::invalid_argument("waypoint row: zero quaternion");
          p.rotation = quat.normalized().toRotationMatrix();
          path.waypoints.push_back(p);
        }
        path.generator = "file";
        params.rng_seed = tf_rng_seed;
        strict = tf_strict;
      }

      manipkd::JointTrajectory traj =
          manipkd::resolve_trajectory(model, path, seed, params, strict);
      os << "idx,status,pos_err,rot_err";
      for (std::size_t j = 0; j < model.dof(); ++j) os << ",q" << j;
      os << '\n';
      for (const auto& e : traj.entries) {
        os << e.index << ',' << manipkd::ik_status_name(e.status) << ','
           << format_double(e.pos_err) << ',' << format_double(e.rot_err)
           << ',' << csv_row(e.q) << '\n';
      }
      return traj.solved_count() == path.waypoints.size() ? 0 : 2;
    }
  } catch (const manipkd::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const manipkd::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const manipkd::UnsupportedModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
