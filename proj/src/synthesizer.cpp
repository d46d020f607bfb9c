// Copyright 2026 The trajldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajldp/synthesizer.hpp"

#include <algorithm>
#include <cmath>

#include "trajldp/errors.hpp"
#include "trajldp/parallel.hpp"

namespace trajldp {

void SynthesisConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw DomainError("alpha and beta must be >= 0");
  if (target_count < 1) throw DomainError("target_count must be >= 1");
}

SampledTrajectory synthesize_sampled(const LengthDistribution& length_dist,
                                     const MobilityModel& model, const SynthesisConfig& config,
                                     Rng& rng) {
  const SparseRowMatrix& m = model.matrix();
  const Eigen::Index end_col = model.end_column();
  const Grid& grid = model.grid();

  SampledTrajectory out;
  out.sampled_length = static_cast<int>(rng.categorical(length_dist.probabilities)) + 1;

  const Eigen::Index start_row = model.start_row();
  const auto start_begin = m.outerIndexPtr()[start_row];
  const auto start_end = m.outerIndexPtr()[start_row + 1];
  const Eigen::Map<const Eigen::VectorXd> start_probs(m.valuePtr() + start_begin,
                                                      start_end - start_begin);
  const Eigen::Index start_pick = rng.categorical(start_probs);
  Eigen::Index current = m.innerIndexPtr()[start_begin + start_pick];
  out.cells.push_back(grid.cell(static_cast<int>(current)));

  double weights[16];
  for (int step = 2; step <= out.sampled_length; ++step) {
    const auto begin = m.outerIndexPtr()[current];
    const auto end = m.outerIndexPtr()[current + 1];
    const auto count = end - begin;
    if (count > 16) throw InvariantError("cell row has more than 9 entries");
    const double* values = m.valuePtr() + begin;
    const auto* cols = m.innerIndexPtr() + begin;

    double p_end = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
      if (cols[j] == end_col) p_end = values[j];
    }
    const double p_end_new = std::min(1.0, termination_multiplier(config, step) * p_end);
    const double scale = p_end < 1.0 ? (1.0 - p_end_new) / (1.0 - p_end) : 0.0;
    double total = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
      weights[j] = cols[j] == end_col ? p_end_new : values[j] * scale;
      total += weights[j];
    }
    if (!(total > 0.0)) break;
    const Eigen::Index pick =
        rng.categorical(Eigen::Map<const Eigen::VectorXd>(weights, count));
    const Eigen::Index next = cols[pick];
    if (next == end_col) break;
    current = next;
    out.cells.push_back(grid.cell(static_cast<int>(current)));
  }
  return out;
}

CellTrajectory synthesize_one(const LengthDistribution& length_dist, const MobilityModel& model,
                              const SynthesisConfig& config, Rng& rng) {
  return synthesize_sampled(length_dist, model, config, rng).cells;
}

std::vector<CellTrajectory> synthesize_dataset(const LengthDistribution& length_dist,
                                               const MobilityModel& model,
                                               const SynthesisConfig& config) {
  config.validate();
  const Rng root(config.seed);
  std::vector<CellTrajectory> out(config.target_count);
  parallel_for(config.target_count, [&](std::size_t i) {
    Rng rng = root.derive(i);
    out[i] = synthesize_one(length_dist, model, config, rng);
  });
  return out;
}

RawTrajectory realize(const Grid& grid, const CellTrajectory& cells, Rng& rng) {
  RawTrajectory out;
  out.reserve(cells.size());
  for (const CellId c : cells) {
    const Point origin = grid.cell_origin(c);
    Point p(origin.x() + rng.uniform() * grid.cell_width(),
            origin.y() + rng.uniform() * grid.cell_height());
    // Rounding can land exactly on the far cell edge.
    if (grid.locate(p) != c) p = grid.cell_center(c);
    out.push_back(p);
  }
  return out;
}

std::vector<RawTrajectory> realize_all(const Grid& grid, const std::vector<CellTrajectory>& cells,
                                       std::uint64_t seed) {
  const Rng root(seed);
  std::vector<RawTrajectory> out(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    Rng rng = root.derive(i);
    out[i] = realize(grid, cells[i], rng);
  });
  return out;
}

}  // namespace trajldp
