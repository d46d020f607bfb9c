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

#ifndef TRAJLDP_METRICS_HPP_
#define TRAJLDP_METRICS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trajldp/errors.hpp"
#include "trajldp/grid.hpp"

namespace trajldp {

// Jensen-Shannon divergence in bits, so the result lies in [0, 1]. Both
// arguments must be normalized and of equal length.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar jsd(const Eigen::MatrixBase<DerivedP>& p,
                              const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  if (p.size() != q.size()) throw DomainError("jsd: length mismatch");
  auto kl_to_mid = [](Scalar a, Scalar mid) {
    return a > Scalar(0) ? a * std::log2(a / mid) : Scalar(0);
  };
  Scalar total(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar mid = (p(i) + q(i)) / Scalar(2);
    total += kl_to_mid(p(i), mid) + kl_to_mid(q(i), mid);
  }
  return std::max(Scalar(0), total / Scalar(2));
}

using CellCorpus = std::vector<CellTrajectory>;
using RawCorpus = std::vector<RawTrajectory>;

// Cell visit counts over a corpus, indexed by flat cell index.
Eigen::VectorXd visit_counts(const CellCorpus& corpus, const Grid& grid);

double density_error(const CellCorpus& real, const CellCorpus& syn, const Grid& grid);

struct QueryOptions {
  int n_queries = 200;
  // Fraction of the bounding box area covered by each query rectangle.
  double fraction = 1.0 / 9.0;
  std::uint64_t seed = 0;
};

// Axis-aligned query rectangle, inclusive on all sides.
struct QueryRegion {
  double min_x, min_y, max_x, max_y;
  bool contains(const Point& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
  }
};

// Rectangles with sides sqrt(fraction) of each box side, placed uniformly
// inside the box.
std::vector<QueryRegion> random_queries(const BoundingBox& bbox, const QueryOptions& options);

// Mean over random regions R of |Q(real) - Q(syn)| / max(Q(real), z), where Q
// counts points in R and z is one percent of the real point count.
double query_error(const RawCorpus& real, const RawCorpus& syn, const BoundingBox& bbox,
                   const QueryOptions& options = {});

// Top-n cells by visit count, ties broken by flat index. Throws DomainError
// naming `corpus_name` when fewer than n cells were visited.
std::vector<int> hotspots(const CellCorpus& corpus, const Grid& grid, int n,
                          const std::string& corpus_name);

double hotspot_query_error(const CellCorpus& real, const CellCorpus& syn, const Grid& grid,
                           int n_h = 5);

// (concordant - discordant) / (|C|(|C|-1)/2) over cell density pairs; a pair
// tied in either corpus counts as concordant.
double kendall_tau(const CellCorpus& real, const CellCorpus& syn, const Grid& grid);

// JSD of the joint (start cell, end cell) distributions.
double trip_error(const CellCorpus& real, const CellCorpus& syn, const Grid& grid);

// Sum of consecutive Euclidean distances.
double travel_distance(const RawTrajectory& traj);
// Maximum pairwise Euclidean distance.
double diameter(const RawTrajectory& traj);

// Equi-width histogram over [0, max] normalized to a distribution. Values
// equal to max fall in the last bucket; max == 0 puts everything in bucket 0.
Eigen::VectorXd histogram(const std::vector<double>& values, double max, int buckets);

double length_error(const RawCorpus& real, const RawCorpus& syn, int buckets = 20);
double diameter_error(const RawCorpus& real, const RawCorpus& syn, int buckets = 20);

struct PatternMetrics {
  double f1 = 0.0;
  double error = 0.0;
  std::size_t real_patterns = 0;  // size of the real top-n set actually used
  std::size_t syn_patterns = 0;
};

// Patterns are contiguous cell subsequences of length 2..max_pattern_len,
// counted with overlaps. Each corpus contributes its top_n most frequent
// patterns (ties broken lexicographically by flat cell indices). Without
// real patterns the error is 0 and F1 is 1 only if the synthetic set is empty.
PatternMetrics pattern_metrics(const CellCorpus& real, const CellCorpus& syn, const Grid& grid,
                               int top_n = 100, int max_pattern_len = 3);

struct UtilityReport {
  double density_error = 0.0;
  double query_error = 0.0;
  double hotspot_query_error = 0.0;
  double kendall_tau = 0.0;
  double trip_error = 0.0;
  double length_error = 0.0;
  double diameter_error = 0.0;
  double pattern_f1 = 0.0;
  double pattern_error = 0.0;
};

// Field names in serialization order.
const std::vector<std::string>& utility_fields();
std::vector<double> utility_values(const UtilityReport& report);
UtilityReport utility_from_values(const std::vector<double>& values);

// "density_error=0.0123 query_error=..." on one line.
std::string to_record(const UtilityReport& report);
// Two-column human-readable table.
std::string to_table(const UtilityReport& report);

struct MetricOptions {
  bool density = true;
  bool query = true;
  bool hotspot = true;
  bool kendall = true;
  bool trip = true;
  bool length = true;
  bool diameter = true;
  bool pattern = true;
  QueryOptions queries;
  int hotspot_count = 5;
  int pattern_top_n = 100;
  int pattern_max_length = 3;
};

// Computes the enabled metrics; disabled ones are left at zero.
UtilityReport evaluate_utility(const CellCorpus& real_cells, const CellCorpus& syn_cells,
                               const RawCorpus& real_raw, const RawCorpus& syn_raw,
                               const Grid& grid, const MetricOptions& options);

}  // namespace trajldp

#endif  // TRAJLDP_METRICS_HPP_
