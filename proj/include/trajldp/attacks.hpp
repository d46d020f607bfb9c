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

#ifndef TRAJLDP_ATTACKS_HPP_
#define TRAJLDP_ATTACKS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "trajldp/grid.hpp"
#include "trajldp/metrics.hpp"

namespace trajldp {

struct AttackConfig {
  int kappa = 2;
  double theta_ratio = 0.2;
  double delta_ratio = 0.25;
  std::vector<CellId> zone;
  double outlier_fraction = 0.01;

  void validate() const;
};

// Dynamic time warping cost with Euclidean point distance.
double dtw(const RawTrajectory& a, const RawTrajectory& b);

// The central 2x2 block (a single cell when n == 1).
std::vector<CellId> central_zone(const Grid& grid);

// Points whose cell lies in `zone`, in original order.
RawTrajectory restrict_to_zone(const RawTrajectory& traj, const Grid& grid,
                               const std::vector<CellId>& zone);

// |M| for every attacked trajectory that intersects the zone. Synthetic
// trajectories that never enter the zone cannot match.
std::vector<std::size_t> reidentification_match_counts(const RawCorpus& syn,
                                                       const RawCorpus& attacked,
                                                       const Grid& grid,
                                                       const AttackConfig& config);

std::vector<std::size_t> outlier_match_counts(const RawCorpus& real, const RawCorpus& syn,
                                              const AttackConfig& config);

// Fraction of counts strictly greater than kappa.
double resilience_ratio(const std::vector<std::size_t>& match_counts, int kappa);

double reidentification_resilience(const RawCorpus& syn, const RawCorpus& attacked,
                                   const Grid& grid, const AttackConfig& config);
double outlier_resilience(const RawCorpus& real, const RawCorpus& syn,
                          const AttackConfig& config);

struct ResilienceRecord {
  std::string attack;
  int kappa = 0;
  double ratio = 0.0;
};

// Both attacks over kappa in [kappa_min, kappa_max].
std::vector<ResilienceRecord> resilience_sweep(const RawCorpus& real, const RawCorpus& syn,
                                               const RawCorpus& attacked, const Grid& grid,
                                               const AttackConfig& config, int kappa_min = 2,
                                               int kappa_max = 10);

}  // namespace trajldp

#endif  // TRAJLDP_ATTACKS_HPP_
