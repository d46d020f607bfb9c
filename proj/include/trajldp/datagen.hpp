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

#ifndef TRAJLDP_DATAGEN_HPP_
#define TRAJLDP_DATAGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "trajldp/grid.hpp"
#include "trajldp/metrics.hpp"

namespace trajldp {

struct WeightedCell {
  CellId cell;
  double weight = 1.0;
};

// Biased random walks over a uniform grid. Lengths count visited cells and
// follow a log-normal law with the given mean and log-scale dispersion.
struct GenConfig {
  BoundingBox bbox{0.0, 0.0, 1000.0, 1000.0};
  int n = 6;
  std::size_t size = 1000;
  double mean_length = 8.0;
  double dispersion = 0.5;
  int max_length = 40;
  std::vector<WeightedCell> start_hotspots;
  std::vector<WeightedCell> end_hotspots;
  // Weight added to every cell on top of the hotspots.
  double background_weight = 1.0;
  // Strength of the pull toward the destination cell; 0 is an unbiased walk.
  double drift = 1.5;
  // Point offset inside a cell as a fraction of the cell size; 0 puts every
  // point at the cell center.
  double jitter = 0.8;
  std::uint64_t seed = 1;

  void validate() const;
};

// A few hotspots near opposite corners of an n x n grid.
GenConfig default_gen_config(int n, std::size_t size, std::uint64_t seed);

// The cell walks behind generate_corpus, for tests that want ground truth.
std::vector<CellTrajectory> generate_walks(const GenConfig& config);

RawCorpus generate_corpus(const GenConfig& config);

}  // namespace trajldp

#endif  // TRAJLDP_DATAGEN_HPP_
