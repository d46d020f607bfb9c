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

#include "trajldp/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "trajldp/parallel.hpp"
#include "trajldp/rng.hpp"

namespace trajldp {

namespace {

void require_nonempty(const auto& corpus, const char* name) {
  if (corpus.empty()) throw DomainError(std::string(name) + " corpus is empty");
}

Eigen::VectorXd normalize(const Eigen::VectorXd& counts) {
  const double total = counts.sum();
  if (!(total > 0.0)) throw DomainError("cannot normalize an all-zero histogram");
  return counts / total;
}

struct PatternHash {
  std::size_t operator()(const std::vector<int>& p) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const int c : p) h = mix64(h ^ static_cast<std::uint32_t>(c));
    return static_cast<std::size_t>(h);
  }
};

using PatternCounts = std::unordered_map<std::vector<int>, std::int64_t, PatternHash>;

PatternCounts count_patterns(const CellCorpus& corpus, const Grid& grid, int max_len) {
  PatternCounts counts;
  std::vector<int> flat;
  std::vector<int> key;
  for (const CellTrajectory& traj : corpus) {
    flat.clear();
    for (const CellId c : traj) flat.push_back(grid.index(c));
    for (std::size_t i = 0; i < flat.size(); ++i) {
      for (int len = 2; len <= max_len && i + static_cast<std::size_t>(len) <= flat.size(); ++len) {
        key.assign(flat.begin() + static_cast<std::ptrdiff_t>(i),
                   flat.begin() + static_cast<std::ptrdiff_t>(i) + len);
        ++counts[key];
      }
    }
  }
  return counts;
}

std::vector<std::vector<int>> top_patterns(const PatternCounts& counts, int top_n) {
  std::vector<std::pair<const std::vector<int>*, std::int64_t>> items;
  items.reserve(counts.size());
  for (const auto& [pattern, n] : counts) items.emplace_back(&pattern, n);
  const std::size_t keep = std::min(items.size(), static_cast<std::size_t>(std::max(0, top_n)));
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(keep), items.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return *a.first < *b.first;
                    });
  std::vector<std::vector<int>> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(*items[i].first);
  return out;
}

std::vector<double> map_values(const RawCorpus& corpus, double (*fn)(const RawTrajectory&)) {
  std::vector<double> out(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { out[i] = fn(corpus[i]); });
  return out;
}

double histogram_error(const RawCorpus& real, const RawCorpus& syn, int buckets,
                       double (*fn)(const RawTrajectory&)) {
  require_nonempty(real, "real");
  require_nonempty(syn, "synthetic");
  const std::vector<double> a = map_values(real, fn);
  const std::vector<double> b = map_values(syn, fn);
  const double max = std::max(*std::max_element(a.begin(), a.end()),
                              *std::max_element(b.begin(), b.end()));
  return jsd(histogram(a, max, buckets), histogram(b, max, buckets));
}

}  // namespace

Eigen::VectorXd visit_counts(const CellCorpus& corpus, const Grid& grid) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(grid.cell_count());
  for (const CellTrajectory& traj : corpus) {
    for (const CellId c : traj) counts(grid.index(c)) += 1.0;
  }
  return counts;
}

double density_error(const CellCorpus& real, const CellCorpus& syn, const Grid& grid) {
  require_nonempty(real, "real");
  require_nonempty(syn, "synthetic");
  return jsd(normalize(visit_counts(real, grid)), normalize(visit_counts(syn, grid)));
}

std::vector<QueryRegion> random_queries(const BoundingBox& bbox, const QueryOptions& options) {
  if (!(options.fraction > 0.0 && options.fraction <= 1.0)) {
    throw DomainError("query fraction must lie in (0, 1]");
  }
  if (options.n_queries < 1) throw DomainError("need at least one query");
  const double side = std::sqrt(options.fraction);
  const double w = side * bbox.width();
  const double h = side * bbox.height();
  Rng rng(options.seed);
  std::vector<QueryRegion> out;
  out.reserve(static_cast<std::size_t>(options.n_queries));
  for (int i = 0; i < options.n_queries; ++i) {
    const double x0 = bbox.min_x + rng.uniform() * (bbox.width() - w);
    const double y0 = bbox.min_y + rng.uniform() * (bbox.height() - h);
    out.push_back({x0, y0, x0 + w, y0 + h});
  }
  return out;
}

double query_error(const RawCorpus& real, const RawCorpus& syn, const BoundingBox& bbox,
                   const QueryOptions& options) {
  require_nonempty(real, "real");
  std::size_t real_points = 0;
  for (const auto& t : real) real_points += t.size();
  const double z = static_cast<double>(real_points) / 100.0;
  const std::vector<QueryRegion> regions = random_queries(bbox, options);

  auto count_in = [](const RawCorpus& corpus, const QueryRegion& r) {
    std::int64_t n = 0;
    for (const auto& t : corpus) {
      for (const Point& p : t) n += r.contains(p) ? 1 : 0;
    }
    return n;
  };
  std::vector<double> errors(regions.size());
  parallel_for(regions.size(), [&](std::size_t i) {
    const double q_real = static_cast<double>(count_in(real, regions[i]));
    const double q_syn = static_cast<double>(count_in(syn, regions[i]));
    errors[i] = std::abs(q_real - q_syn) / std::max(q_real, z);
  });
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

std::vector<int> hotspots(const CellCorpus& corpus, const Grid& grid, int n,
                          const std::string& corpus_name) {
  const Eigen::VectorXd counts = visit_counts(corpus, grid);
  std::vector<int> visited;
  for (int i = 0; i < grid.cell_count(); ++i) {
    if (counts(i) > 0) visited.push_back(i);
  }
  if (static_cast<int>(visited.size()) < n) {
    throw DomainError(corpus_name + " corpus visits " + std::to_string(visited.size()) +
                      " distinct cells, fewer than the " + std::to_string(n) + " hotspots requested");
  }
  std::stable_sort(visited.begin(), visited.end(),
                   [&](int a, int b) { return counts(a) > counts(b); });
  visited.resize(static_cast<std::size_t>(n));
  return visited;
}

double hotspot_query_error(const CellCorpus& real, const CellCorpus& syn, const Grid& grid,
                           int n_h) {
  if (n_h < 1) throw DomainError("need at least one hotspot");
  const std::vector<int> h_real = hotspots(real, grid, n_h, "real");
  const std::vector<int> h_syn = hotspots(syn, grid, n_h, "synthetic");
  // Same expression for the ideal score so identical rankings give exactly 0.
  double ideal = 0.0;
  for (int j = 1; j <= n_h; ++j) ideal += (1.0 / j) / std::log(j + 1.0);
  double score = 0.0;
  for (int rank_syn = 1; rank_syn <= n_h; ++rank_syn) {
    const auto it = std::find(h_real.begin(), h_real.end(), h_syn[static_cast<std::size_t>(rank_syn - 1)]);
    if (it == h_real.end()) continue;
    const double rel = 1.0 / static_cast<double>(it - h_real.begin() + 1);
    score += rel / std::log(rank_syn + 1.0);
  }
  return 1.0 - score / ideal;
}

double kendall_tau(const CellCorpus& real, const CellCorpus& syn, const Grid& grid) {
  const int cells = grid.cell_count();
  if (cells < 2) return 1.0;
  const Eigen::VectorXd a = visit_counts(real, grid);
  const Eigen::VectorXd b = visit_counts(syn, grid);
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  for (int i = 0; i < cells; ++i) {
    for (int j = i + 1; j < cells; ++j) {
      const bool ge = a(i) >= a(j) && b(i) >= b(j);
      const bool le = a(i) <= a(j) && b(i) <= b(j);
      if (ge || le) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs = static_cast<double>(cells) * (cells - 1) / 2.0;
  return static_cast<double>(concordant - discordant) / pairs;
}

double trip_error(const CellCorpus& real, const CellCorpus& syn, const Grid& grid) {
  require_nonempty(real, "real");
  require_nonempty(syn, "synthetic");
  const std::int64_t cells = grid.cell_count();
  std::map<std::int64_t, std::pair<double, double>> joint;
  for (const auto& t : real) {
    joint[grid.index(t.front()) * cells + grid.index(t.back())].first += 1.0;
  }
  for (const auto& t : syn) {
    joint[grid.index(t.front()) * cells + grid.index(t.back())].second += 1.0;
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(joint.size()));
  Eigen::VectorXd q(static_cast<Eigen::Index>(joint.size()));
  Eigen::Index i = 0;
  for (const auto& [key, counts] : joint) {
    p(i) = counts.first;
    q(i) = counts.second;
    ++i;
  }
  return jsd(normalize(p), normalize(q));
}

double travel_distance(const RawTrajectory& traj) {
  double total = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) total += (traj[i] - traj[i - 1]).norm();
  return total;
}

double diameter(const RawTrajectory& traj) {
  double best = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (std::size_t j = i + 1; j < traj.size(); ++j) {
      best = std::max(best, (traj[i] - traj[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

Eigen::VectorXd histogram(const std::vector<double>& values, double max, int buckets) {
  if (buckets < 1) throw DomainError("need at least one bucket");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(buckets);
  for (const double v : values) {
    int b = 0;
    if (max > 0.0) b = std::min(buckets - 1, static_cast<int>(std::floor(v / max * buckets)));
    counts(std::max(0, b)) += 1.0;
  }
  return normalize(counts);
}

double length_error(const RawCorpus& real, const RawCorpus& syn, int buckets) {
  return histogram_error(real, syn, buckets, &travel_distance);
}

double diameter_error(const RawCorpus& real, const RawCorpus& syn, int buckets) {
  return histogram_error(real, syn, buckets, &diameter);
}

PatternMetrics pattern_metrics(const CellCorpus& real, const CellCorpus& syn, const Grid& grid,
                               int top_n, int max_pattern_len) {
  require_nonempty(real, "real");
  require_nonempty(syn, "synthetic");
  if (max_pattern_len < 2) throw DomainError("patterns need at least two cells");
  const PatternCounts real_counts = count_patterns(real, grid, max_pattern_len);
  const PatternCounts syn_counts = count_patterns(syn, grid, max_pattern_len);
  const auto fp = top_patterns(real_counts, top_n);
  const auto fp_syn = top_patterns(syn_counts, top_n);

  PatternMetrics out;
  out.real_patterns = fp.size();
  out.syn_patterns = fp_syn.size();
  // Two corpora without any multi-cell pattern agree perfectly.
  if (fp.empty()) {
    out.f1 = fp_syn.empty() ? 1.0 : 0.0;
    out.error = 0.0;
    return out;
  }

  std::size_t common = 0;
  for (const auto& p : fp_syn) {
    if (std::find(fp.begin(), fp.end(), p) != fp.end()) ++common;
  }
  const double precision = fp_syn.empty() ? 0.0 : static_cast<double>(common) / fp_syn.size();
  const double recall = static_cast<double>(common) / fp.size();
  out.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;

  double err = 0.0;
  for (const auto& p : fp) {
    const double n_real = static_cast<double>(real_counts.at(p));
    const auto it = syn_counts.find(p);
    const double n_syn = it == syn_counts.end() ? 0.0 : static_cast<double>(it->second);
    err += std::abs(n_real - n_syn) / n_real;
  }
  out.error = err / static_cast<double>(fp.size());
  return out;
}

const std::vector<std::string>& utility_fields() {
  static const std::vector<std::string> kFields = {
      "density_error", "query_error",    "hotspot_query_error",
      "kendall_tau",   "trip_error",     "length_error",
      "diameter_error", "pattern_f1",    "pattern_error"};
  return kFields;
}

std::vector<double> utility_values(const UtilityReport& r) {
  return {r.density_error, r.query_error,    r.hotspot_query_error,
          r.kendall_tau,   r.trip_error,     r.length_error,
          r.diameter_error, r.pattern_f1,    r.pattern_error};
}

UtilityReport utility_from_values(const std::vector<double>& v) {
  if (v.size() != utility_fields().size()) throw DomainError("wrong number of utility values");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
}

std::string to_record(const UtilityReport& report) {
  const auto values = utility_values(report);
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g", values[i]);
    if (i) out += ' ';
    out += utility_fields()[i] + "=" + buf;
  }
  return out;
}

std::string to_table(const UtilityReport& report) {
  const auto values = utility_values(report);
  std::string out;
  char buf[96];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-20s %12.6f\n", utility_fields()[i].c_str(), values[i]);
    out += buf;
  }
  return out;
}

UtilityReport evaluate_utility(const CellCorpus& real_cells, const CellCorpus& syn_cells,
                               const RawCorpus& real_raw, const RawCorpus& syn_raw,
                               const Grid& grid, const MetricOptions& options) {
  UtilityReport r;
  if (options.density) r.density_error = density_error(real_cells, syn_cells, grid);
  if (options.query) r.query_error = query_error(real_raw, syn_raw, grid.bbox(), options.queries);
  if (options.hotspot) {
    r.hotspot_query_error = hotspot_query_error(real_cells, syn_cells, grid, options.hotspot_count);
  }
  if (options.kendall) r.kendall_tau = kendall_tau(real_cells, syn_cells, grid);
  if (options.trip) r.trip_error = trip_error(real_cells, syn_cells, grid);
  if (options.length) r.length_error = length_error(real_raw, syn_raw);
  if (options.diameter) r.diameter_error = diameter_error(real_raw, syn_raw);
  if (options.pattern) {
    const PatternMetrics pm = pattern_metrics(real_cells, syn_cells, grid, options.pattern_top_n,
                                              options.pattern_max_length);
    r.pattern_f1 = pm.f1;
    r.pattern_error = pm.error;
  }
  return r;
}

}  // namespace trajldp
