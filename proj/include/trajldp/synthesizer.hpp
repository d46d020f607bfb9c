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

#ifndef TRAJLDP_SYNTHESIZER_HPP_
#define TRAJLDP_SYNTHESIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trajldp/curator.hpp"
#include "trajldp/grid.hpp"
#include "trajldp/rng.hpp"

namespace trajldp {

struct SynthesisConfig {
  // Termination reweighting: at step l the end probability is scaled by
  // alpha + beta * l.
  double alpha = 0.3;
  double beta = 0.2;
  std::size_t target_count = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

inline double termination_multiplier(const SynthesisConfig& config, int step) {
  return config.alpha + config.beta * step;
}

// A synthesized trajectory together with the length cap it was sampled with.
struct SampledTrajectory {
  CellTrajectory cells;
  int sampled_length = 0;
};

// Samples a length cap L and a start cell, then walks the model. At each step
// l in [2, L] the end probability of the current row is multiplied by
// termination_multiplier(l), capped at 1, and the remaining entries are
// rescaled to keep the row a distribution. Stops at the virtual end or after L
// cells.
SampledTrajectory synthesize_sampled(const LengthDistribution& length_dist,
                                     const MobilityModel& model, const SynthesisConfig& config,
                                     Rng& rng);

CellTrajectory synthesize_one(const LengthDistribution& length_dist, const MobilityModel& model,
                              const SynthesisConfig& config, Rng& rng);

// config.target_count trajectories; trajectory i uses stream
// Rng(config.seed).derive(i).
std::vector<CellTrajectory> synthesize_dataset(const LengthDistribution& length_dist,
                                               const MobilityModel& model,
                                               const SynthesisConfig& config);

// One point per cell, uniform within the cell.
RawTrajectory realize(const Grid& grid, const CellTrajectory& cells, Rng& rng);

// realize() over a corpus; trajectory i uses Rng(seed).derive(i).
std::vector<RawTrajectory> realize_all(const Grid& grid, const std::vector<CellTrajectory>& cells,
                                       std::uint64_t seed);

}  // namespace trajldp

#endif  // TRAJLDP_SYNTHESIZER_HPP_
