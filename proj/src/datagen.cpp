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

#include "trajldp/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "trajldp/errors.hpp"
#include "trajldp/parallel.hpp"
#include "trajldp/rng.hpp"

namespace trajldp {

namespace {

Eigen::VectorXd cell_weights(const Grid& grid, const std::vector<WeightedCell>& hotspots,
                             double background) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(grid.cell_count(), background);
  for (const auto& h : hotspots) w(grid.index(h.cell)) += h.weight;
  return w;
}

int sample_length(const GenConfig& config, Rng& rng) {
  const double s = config.dispersion;
  const double mu = std::log(config.mean_length) - 0.5 * s * s;
  const double raw = std::exp(mu + s * rng.normal());
  return std::clamp(static_cast<int>(std::lround(raw)), 1, config.max_length);
}

double cell_distance(CellId a, CellId b) {
  return std::hypot(static_cast<double>(a.row - b.row), static_cast<double>(a.col - b.col));
}

}  // namespace

void GenConfig::validate() const {
  bbox.validate();
  if (n < 1) throw DomainError("grid side must be at least 1");
  if (size < 1) throw DomainError("corpus size must be at least 1");
  if (!(mean_length >= 1.0)) throw DomainError("mean_length must be at least 1");
  if (!(dispersion >= 0.0)) throw DomainError("dispersion must be non-negative");
  if (max_length < 1) throw DomainError("max_length must be at least 1");
  if (!(background_weight >= 0.0)) throw DomainError("background_weight must be non-negative");
  if (!(drift >= 0.0)) throw DomainError("drift must be non-negative");
  if (!(jitter >= 0.0 && jitter <= 1.0)) throw DomainError("jitter must lie in [0, 1]");
  const Grid grid(bbox, n);
  for (const auto* list : {&start_hotspots, &end_hotspots}) {
    double total = background_weight * grid.cell_count();
    for (const auto& h : *list) {
      if (!grid.valid(h.cell)) throw DomainError("hotspot outside the grid");
      if (!(h.weight > 0.0)) throw DomainError("hotspot weights must be positive");
      total += h.weight;
    }
    if (!(total > 0.0)) throw DomainError("start/end distribution has no mass");
  }
}

GenConfig default_gen_config(int n, std::size_t size, std::uint64_t seed) {
  GenConfig c;
  c.n = n;
  c.size = size;
  c.seed = seed;
  const int far = n - 1;
  const int mid = n / 2;
  c.start_hotspots = {{{0, 0}, 12.0}, {{mid, mid}, 8.0}, {{far, 0}, 4.0}};
  c.end_hotspots = {{{far, far}, 12.0}, {{mid, 0}, 6.0}, {{0, far}, 4.0}};
  c.background_weight = 0.5;
  return c;
}

std::vector<CellTrajectory> generate_walks(const GenConfig& config) {
  config.validate();
  const Grid grid(config.bbox, config.n);
  const Eigen::VectorXd start_w = cell_weights(grid, config.start_hotspots, config.background_weight);
  const Eigen::VectorXd end_w = cell_weights(grid, config.end_hotspots, config.background_weight);
  const Rng master(config.seed);

  std::vector<CellTrajectory> out(config.size);
  parallel_for(config.size, [&](std::size_t i) {
    Rng rng = master.derive(i);
    const int length = sample_length(config, rng);
    CellId cur = grid.cell(static_cast<int>(rng.categorical(start_w)));
    const CellId dest = grid.cell(static_cast<int>(rng.categorical(end_w)));
    CellTrajectory& walk = out[i];
    walk.reserve(static_cast<std::size_t>(length));
    walk.push_back(cur);
    std::vector<CellId> nbrs;
    Eigen::VectorXd w;
    while (static_cast<int>(walk.size()) < length) {
      nbrs = grid.neighbors(cur);
      if (nbrs.empty()) break;  // 1x1 grid
      w.resize(static_cast<Eigen::Index>(nbrs.size()));
      const double here = cell_distance(cur, dest);
      for (std::size_t j = 0; j < nbrs.size(); ++j) {
        w(static_cast<Eigen::Index>(j)) = std::exp(config.drift * (here - cell_distance(nbrs[j], dest)));
      }
      cur = nbrs[static_cast<std::size_t>(rng.categorical(w))];
      walk.push_back(cur);
    }
  });
  return out;
}

RawCorpus generate_corpus(const GenConfig& config) {
  const std::vector<CellTrajectory> walks = generate_walks(config);
  const Grid grid(config.bbox, config.n);
  const Rng master = Rng(config.seed).derive(0x9e0f);
  RawCorpus out(walks.size());
  parallel_for(walks.size(), [&](std::size_t i) {
    Rng rng = master.derive(i);
    RawTrajectory& traj = out[i];
    traj.reserve(walks[i].size());
    for (const CellId c : walks[i]) {
      const Point center = grid.cell_center(c);
      const double dx = (rng.uniform() - 0.5) * config.jitter * grid.cell_width();
      const double dy = (rng.uniform() - 0.5) * config.jitter * grid.cell_height();
      traj.emplace_back(center.x() + dx, center.y() + dy);
    }
  });
  return out;
}

}  // namespace trajldp
