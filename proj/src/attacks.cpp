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

#include "trajldp/attacks.hpp"

#include <algorithm>
#include <limits>

#include "trajldp/errors.hpp"
#include "trajldp/parallel.hpp"

namespace trajldp {

void AttackConfig::validate() const {
  if (kappa < 0) throw DomainError("kappa must be non-negative");
  if (!(theta_ratio > 0.0 && theta_ratio < 1.0)) throw DomainError("theta_ratio must lie in (0, 1)");
  if (!(delta_ratio > 0.0 && delta_ratio < 1.0)) throw DomainError("delta_ratio must lie in (0, 1)");
  if (!(outlier_fraction > 0.0 && outlier_fraction <= 1.0)) {
    throw DomainError("outlier_fraction must lie in (0, 1]");
  }
}

double dtw(const RawTrajectory& a, const RawTrajectory& b) {
  if (a.empty() || b.empty()) throw DomainError("dtw of an empty trajectory");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(b.size() + 1, kInf);
  std::vector<double> cur(b.size() + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const double cost = (a[i - 1] - b[j - 1]).norm();
      cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<CellId> central_zone(const Grid& grid) {
  const int n = grid.n();
  if (n == 1) return {CellId{0, 0}};
  const int start = (n - 2) / 2;
  return {CellId{start, start}, CellId{start, start + 1}, CellId{start + 1, start},
          CellId{start + 1, start + 1}};
}

RawTrajectory restrict_to_zone(const RawTrajectory& traj, const Grid& grid,
                               const std::vector<CellId>& zone) {
  RawTrajectory out;
  for (const Point& p : traj) {
    if (!grid.bbox().contains(p)) continue;
    if (std::find(zone.begin(), zone.end(), grid.locate(p)) != zone.end()) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> reidentification_match_counts(const RawCorpus& syn,
                                                       const RawCorpus& attacked,
                                                       const Grid& grid,
                                                       const AttackConfig& config) {
  config.validate();
  if (config.zone.empty()) throw DomainError("sensitive zone is empty");
  if (syn.empty() || attacked.empty()) throw DomainError("attack needs non-empty corpora");

  RawCorpus targets;
  for (const auto& t : attacked) {
    RawTrajectory r = restrict_to_zone(t, grid, config.zone);
    if (!r.empty()) targets.push_back(std::move(r));
  }
  if (targets.empty()) throw DomainError("no attacked trajectory intersects the sensitive zone");

  RawCorpus candidates;
  for (const auto& t : syn) {
    RawTrajectory r = restrict_to_zone(t, grid, config.zone);
    if (!r.empty()) candidates.push_back(std::move(r));
  }

  // sim_max: largest pairwise DTW among the restricted targets.
  std::vector<double> row_max(targets.size(), 0.0);
  parallel_for(targets.size(), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      row_max[i] = std::max(row_max[i], dtw(targets[i], targets[j]));
    }
  });
  const double sim_max = *std::max_element(row_max.begin(), row_max.end());
  const double theta = config.theta_ratio * sim_max;

  std::vector<std::size_t> counts(targets.size(), 0);
  parallel_for(targets.size(), [&](std::size_t i) {
    for (const auto& c : candidates) {
      if (dtw(targets[i], c) <= theta) ++counts[i];
    }
  });
  return counts;
}

std::vector<std::size_t> outlier_match_counts(const RawCorpus& real, const RawCorpus& syn,
                                              const AttackConfig& config) {
  config.validate();
  if (real.empty() || syn.empty()) throw DomainError("attack needs non-empty corpora");
  std::vector<double> real_dist(real.size());
  parallel_for(real.size(), [&](std::size_t i) { real_dist[i] = travel_distance(real[i]); });
  std::vector<double> syn_dist(syn.size());
  parallel_for(syn.size(), [&](std::size_t i) { syn_dist[i] = travel_distance(syn[i]); });

  std::sort(real_dist.begin(), real_dist.end());
  const double delta = config.delta_ratio * real_dist.back();

  std::sort(syn_dist.begin(), syn_dist.end(), std::greater<>());
  const auto n_outliers = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.outlier_fraction * syn_dist.size())));

  std::vector<std::size_t> counts;
  counts.reserve(n_outliers);
  for (std::size_t i = 0; i < n_outliers; ++i) {
    const double d = syn_dist[i];
    const auto lo = std::lower_bound(real_dist.begin(), real_dist.end(), d - delta);
    const auto hi = std::upper_bound(real_dist.begin(), real_dist.end(), d + delta);
    counts.push_back(static_cast<std::size_t>(hi - lo));
  }
  return counts;
}

double resilience_ratio(const std::vector<std::size_t>& match_counts, int kappa) {
  if (match_counts.empty()) throw DomainError("no attacked trajectories");
  const auto defended = std::count_if(match_counts.begin(), match_counts.end(), [&](std::size_t c) {
    return static_cast<long long>(c) > kappa;
  });
  return static_cast<double>(defended) / static_cast<double>(match_counts.size());
}

double reidentification_resilience(const RawCorpus& syn, const RawCorpus& attacked,
                                   const Grid& grid, const AttackConfig& config) {
  return resilience_ratio(reidentification_match_counts(syn, attacked, grid, config), config.kappa);
}

double outlier_resilience(const RawCorpus& real, const RawCorpus& syn,
                          const AttackConfig& config) {
  return resilience_ratio(outlier_match_counts(real, syn, config), config.kappa);
}

std::vector<ResilienceRecord> resilience_sweep(const RawCorpus& real, const RawCorpus& syn,
                                               const RawCorpus& attacked, const Grid& grid,
                                               const AttackConfig& config, int kappa_min,
                                               int kappa_max) {
  if (kappa_min > kappa_max) throw DomainError("empty kappa range");
  const auto reid = reidentification_match_counts(syn, attacked, grid, config);
  const auto outlier = outlier_match_counts(real, syn, config);
  std::vector<ResilienceRecord> out;
  for (int k = kappa_min; k <= kappa_max; ++k) {
    out.push_back({"reidentification", k, resilience_ratio(reid, k)});
  }
  for (int k = kappa_min; k <= kappa_max; ++k) {
    out.push_back({"outlier", k, resilience_ratio(outlier, k)});
  }
  return out;
}

}  // namespace trajldp
