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
#ifndef MANIPKD_WORKSPACE_HPP_
#define MANIPKD_WORKSPACE_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "manipkd/kinematics.hpp"
#include "manipkd/model.hpp"
#include "manipkd/num_format.hpp"

namespace manipkd {

enum class ManipBand { kLow, kMedium, kHigh };

inline const char* band_name(ManipBand b) {
  switch (b) {
    case ManipBand::kLow:
      return "low";
    case ManipBand::kMedium:
      return "medium";
    case ManipBand::kHigh:
      return "high";
  }
  return "unknown";
}

struct WorkspaceSample {
  Eigen::VectorXd q;
  Eigen::Vector3d p;      // end-effector position
  double w = 0.0;         // manipulability index
  ManipBand band = ManipBand::kLow;
};

/// Monte Carlo sweep of the reachable end-effector cloud: `count` joint
/// vectors drawn uniformly within limits from the seeded generator, each
/// scored with the manipulability index. Bands are the sample tertiles
/// of the index (lowest third = low, and so on; band sizes differ by at
/// most one). Deterministic per seed; samples keep draw order.
inline std::vector<WorkspaceSample> sample_workspace(const RobotModel& model,
                                                     std::size_t count,
                                                     std::uint64_t rng_seed) {
  if (count < 1)
    throw std::invalid_argument("sample_workspace: count must be >= 1");
  std::mt19937_64 rng(rng_seed);
  std::vector<WorkspaceSample> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    WorkspaceSample& s = samples[i];
    s.q = sample_joint_vector(model, rng);
    s.p = fpk(model, s.q).position;
    s.w = yoshikawa(jacobian(model, s.q));
  }

  // Tertile banding: stable order on (w, index) so ties split
  // deterministically.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (samples[a].w != samples[b].w) return samples[a].w < samples[b].w;
    return a < b;
  });
  const std::size_t base = count / 3, rem = count % 3;
  const std::size_t n_low = base + (rem > 0 ? 1 : 0);
  const std::size_t n_med = base + (rem > 1 ? 1 : 0);
  for (std::size_t rank = 0; rank < count; ++rank) {
    ManipBand band = rank < n_low               ? ManipBand::kLow
                     : rank < n_low + n_med     ? ManipBand::kMedium
                                                : ManipBand::kHigh;
    samples[order[rank]].band = band;
  }
  return samples;
}

/// CSV export: header `x,y,z,yoshikawa,band`, one line per sample, full
/// round-trip decimal precision.
inline std::string export_workspace_csv(
    const std::vector<WorkspaceSample>& samples) {
  if (samples.empty())
    throw std::invalid_argument("export_workspace_csv: empty sample set");
  std::string out = "x,y,z,yoshikawa,band\n";
  for (const auto& s : samples) {
    out += format_double(s.p.x());
    out += ',';
    out += format_double(s.p.y());
    out += ',';
    out += format_double(s.p.z());
    out += ',';
    out += format_double(s.w);
    out += ',';
    out += band_name(s.band);
    out += '\n';
  }
  return out;
}

}  // namespace manipkd

#endif  // MANIPKD_WORKSPACE_HPP_
