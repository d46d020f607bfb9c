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

#include "trajldp/curator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "trajldp/errors.hpp"

namespace trajldp {

namespace {

constexpr double kRowTolerance = 1e-9;
constexpr double kQuantileSlack = 1e-12;

// Clamps negatives and normalizes; uniform when nothing positive remains.
Eigen::VectorXd clamp_normalize(const Eigen::VectorXd& values) {
  Eigen::VectorXd clamped = values.cwiseMax(0.0);
  const double total = clamped.sum();
  if (!(total > 0.0)) {
    return Eigen::VectorXd::Constant(values.size(), 1.0 / static_cast<double>(values.size()));
  }
  return clamped / total;
}

void require_size(const AggregatedEstimate& est, std::size_t size, const char* what) {
  if (static_cast<std::size_t>(est.counts.size()) != size) {
    throw ProtocolError(std::string(what) + " estimates have " +
                        std::to_string(est.counts.size()) + " entries, expected " +
                        std::to_string(size));
  }
}

}  // namespace

LengthDistribution estimate_length_distribution(const AggregatedEstimate& lengths) {
  if (lengths.counts.size() == 0) throw DomainError("empty length domain");
  return {clamp_normalize(lengths.counts)};
}

LengthDistribution estimate_length_distribution(std::span<const Report> reports,
                                                std::size_t cell_count) {
  if (reports.empty()) throw DomainError("no length reports");
  return estimate_length_distribution(aggregate(reports, cell_count));
}

int length_quantile(const LengthDistribution& dist, double k) {
  if (!(k > 0.0 && k <= 1.0)) throw DomainError("quantile must lie in (0, 1]");
  if (k == 1.0) {
    for (int m = dist.max_length(); m >= 1; --m) {
      if (dist.probability(m) > 0.0) return m;
    }
    return dist.max_length();
  }
  double cumulative = 0.0;
  for (int m = 1; m <= dist.max_length(); ++m) {
    cumulative += dist.probability(m);
    if (cumulative >= k - kQuantileSlack) return m;
  }
  return dist.max_length();
}

MobilityModel::MobilityModel(const Grid& grid, SparseRowMatrix matrix)
    : grid_(grid), matrix_(std::move(matrix)) {
  const Eigen::Index cells = grid_.cell_count();
  if (matrix_.rows() != cells + 1 || matrix_.cols() != cells + 1) {
    throw InvariantError("mobility matrix must be (|C|+1) x (|C|+1)");
  }
  matrix_.makeCompressed();
  for (Eigen::Index r = 0; r <= cells; ++r) {
    double sum = 0.0;
    Eigen::Index entries = 0;
    for (SparseRowMatrix::InnerIterator it(matrix_, r); it; ++it) {
      if (!(it.value() >= 0.0) || !std::isfinite(it.value())) {
        throw InvariantError("row " + std::to_string(r) + " has an invalid probability");
      }
      if (r == cells) {
        if (it.col() == cells) throw InvariantError("start row cannot reach the virtual end");
      } else if (it.col() != cells && !adjacent(grid_.cell(static_cast<int>(r)),
                                                grid_.cell(static_cast<int>(it.col())))) {
        throw InvariantError("row " + std::to_string(r) + " reaches a non-adjacent cell");
      }
      sum += it.value();
      ++entries;
    }
    if (entries == 0 || std::abs(sum - 1.0) > kRowTolerance) {
      throw InvariantError("row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
  }
}

double MobilityModel::probability(const Node& from, const Successor& to) const {
  Eigen::Index row;
  if (const auto* c = std::get_if<CellId>(&from)) {
    row = row_of(*c);
  } else if (std::holds_alternative<VirtualStart>(from)) {
    row = start_row();
  } else {
    return 0.0;
  }
  const Eigen::Index col =
      std::holds_alternative<VirtualEnd>(to) ? end_column() : row_of(std::get<CellId>(to));
  return matrix_.coeff(row, col);
}

MobilityModel build_mobility_model(const AggregatedEstimate& transitions,
                                   const AggregatedEstimate& begins,
                                   const AggregatedEstimate& ends,
                                   const TransitionDomain& domain) {
  const Grid& grid = domain.grid();
  const int cells = grid.cell_count();
  require_size(transitions, domain.intra_size(), "transition");
  require_size(begins, domain.endpoint_size(), "beginning");
  require_size(ends, domain.endpoint_size(), "terminated");

  std::optional<double> epsilon;
  for (const AggregatedEstimate* est : {&transitions, &begins, &ends}) {
    if (!est->epsilon) continue;
    if (epsilon && *epsilon != *est->epsilon) {
      throw ProtocolError("transition estimates were aggregated at different budgets");
    }
    epsilon = est->epsilon;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(domain.intra_size() + 2 * static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) {
    const CellId from = grid.cell(i);
    const std::vector<CellId> nbs = grid.neighbors(from);
    Eigen::VectorXd row(static_cast<Eigen::Index>(nbs.size()) + 1);
    for (std::size_t j = 0; j < nbs.size(); ++j) {
      row(static_cast<Eigen::Index>(j)) =
          transitions.counts(static_cast<Eigen::Index>(*domain.transition_index(from, nbs[j])));
    }
    row(row.size() - 1) = ends.counts(static_cast<Eigen::Index>(domain.end_index(from)));
    const Eigen::VectorXd probs = clamp_normalize(row);
    for (std::size_t j = 0; j < nbs.size(); ++j) {
      triplets.emplace_back(i, grid.index(nbs[j]), probs(static_cast<Eigen::Index>(j)));
    }
    triplets.emplace_back(i, cells, probs(probs.size() - 1));
  }
  const Eigen::VectorXd start = clamp_normalize(begins.counts);
  for (int j = 0; j < cells; ++j) triplets.emplace_back(cells, j, start(j));

  SparseRowMatrix matrix(cells + 1, cells + 1);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return MobilityModel(grid, std::move(matrix));
}

void write_model(std::ostream& out, const MobilityModel& model) {
  const Grid& grid = model.grid();
  const BoundingBox& b = grid.bbox();
  char buf[64];
  auto fmt = [&buf](const char* pattern, double v) {
    std::snprintf(buf, sizeof(buf), pattern, v);
    return std::string(buf);
  };
  out << "trajldp-model 1 n=" << grid.n() << " bbox=" << fmt("%.17g", b.min_x) << ','
      << fmt("%.17g", b.min_y) << ',' << fmt("%.17g", b.max_x) << ',' << fmt("%.17g", b.max_y)
      << '\n';
  const SparseRowMatrix& m = model.matrix();
  auto write_row = [&](Eigen::Index r, const std::string& label) {
    out << label;
    for (SparseRowMatrix::InnerIterator it(m, r); it; ++it) {
      out << ' ' << (it.col() == model.end_column() ? std::string("E") : std::to_string(it.col()))
          << ':' << fmt("%.12g", it.value());
    }
    out << '\n';
  };
  write_row(model.start_row(), "S");
  for (Eigen::Index r = 0; r < model.start_row(); ++r) write_row(r, std::to_string(r));
}

MobilityModel read_model(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing model header");
  int n = 0;
  BoundingBox bbox;
  int version = 0;
  if (std::sscanf(line.c_str(), "trajldp-model %d n=%d bbox=%lf,%lf,%lf,%lf", &version, &n,
                  &bbox.min_x, &bbox.min_y, &bbox.max_x, &bbox.max_y) != 6 ||
      version != 1) {
    throw ParseError(line_no, "malformed model header");
  }
  const Grid grid(bbox, n);
  const int cells = grid.cell_count();
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<bool> seen(static_cast<std::size_t>(cells) + 1, false);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string node;
    row >> node;
    int r;
    try {
      r = node == "S" ? cells : std::stoi(node);
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad node id '" + node + "'");
    }
    if (r < 0 || r > cells || seen[static_cast<std::size_t>(r)]) {
      throw ParseError(line_no, "unexpected row '" + node + "'");
    }
    seen[static_cast<std::size_t>(r)] = true;
    std::string pair;
    while (row >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "bad entry '" + pair + "'");
      const std::string target = pair.substr(0, colon);
      try {
        const int c = target == "E" ? cells : std::stoi(target);
        if (c < 0 || c > cells) throw ParseError(line_no, "target out of range");
        triplets.emplace_back(r, c, std::stod(pair.substr(colon + 1)));
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad entry '" + pair + "'");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ParseError(line_no, "model is missing rows");
  }
  SparseRowMatrix matrix(cells + 1, cells + 1);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return MobilityModel(grid, std::move(matrix));
}

double transition_error_model(const Eigen::VectorXd& est_frequencies, double eps2, int l_k,
                              double k, double n_reports) {
  if (!(eps2 > 0.0) || l_k < 1 || !(k > 0.0 && k <= 1.0) || n_reports < 0) {
    throw DomainError("invalid transition error model inputs");
  }
  const Eigen::ArrayXd f = est_frequencies.cwiseMax(0.0).array();
  const double total = f.sum();
  if (!(total > 0.0)) throw DomainError("transition frequencies are all zero");
  const double d = static_cast<double>(f.size());
  const double sigma2 = oue_variance(n_reports, eps2 / l_k);
  const Eigen::ArrayXd share = f / total;
  // Var*(x / y) with x = f_s, y = sum of all d estimates, Var(x) = sigma2,
  // Var(y) = d * sigma2, Cov(x, y) = sigma2, expanded so f_s = 0 is finite.
  const Eigen::ArrayXd noise = sigma2 / (total * total) * (1.0 - 2.0 * share + d * share.square());
  const Eigen::ArrayXd bias = (1.0 - k) * (1.0 - k) * share.square();
  return (noise + bias).sum();
}

double suggest_k(const Eigen::VectorXd& est_frequencies, double eps2,
                 const LengthDistribution& length_dist, std::span<const double> candidate_ks,
                 double n_users) {
  if (candidate_ks.empty()) throw DomainError("no candidate quantiles");
  double best_k = candidate_ks.front();
  double best_error = std::numeric_limits<double>::infinity();
  for (const double k : candidate_ks) {
    const int l_k = length_quantile(length_dist, k);
    double expected_reports = 0.0;
    for (int m = 1; m <= length_dist.max_length(); ++m) {
      expected_reports += length_dist.probability(m) * std::min(m - 1, l_k);
    }
    const double error = transition_error_model(est_frequencies, eps2, l_k, k,
                                                n_users * expected_reports);
    if (error < best_error || (error == best_error && k > best_k)) {
      best_error = error;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace trajldp
