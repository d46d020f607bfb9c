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

#ifndef TRAJLDP_CURATOR_HPP_
#define TRAJLDP_CURATOR_HPP_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "trajldp/client.hpp"
#include "trajldp/frequency_oracle.hpp"
#include "trajldp/grid.hpp"

namespace trajldp {

// Categorical distribution over trajectory lengths 1..size().
struct LengthDistribution {
  // probabilities(m - 1) is the probability of length m.
  Eigen::VectorXd probabilities;

  int max_length() const { return static_cast<int>(probabilities.size()); }
  double probability(int length) const {
    return length >= 1 && length <= max_length() ? probabilities(length - 1) : 0.0;
  }
};

// Negative estimates are clamped to zero before normalizing; if nothing is
// left the result is uniform.
LengthDistribution estimate_length_distribution(const AggregatedEstimate& lengths);

// Aggregates length reports first. Throws ProtocolError for mixed budgets and
// DomainError for an empty collection.
LengthDistribution estimate_length_distribution(std::span<const Report> reports,
                                                std::size_t cell_count);

// Smallest m with P(length <= m) >= k. Throws DomainError unless 0 < k <= 1.
int length_quantile(const LengthDistribution& dist, double k);

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Row-stochastic transition model over cells plus virtual start/end nodes.
//
// Rows 0..|C|-1 are cells and row |C| is the virtual start. Columns 0..|C|-1
// are cells and column |C| is the virtual end. A cell row stores exactly its
// aggregated neighbourhood (explicit zeros included); the start row stores
// every cell.
class MobilityModel {
 public:
  // Throws InvariantError if the matrix shape, row supports or row sums are
  // invalid.
  MobilityModel(const Grid& grid, SparseRowMatrix matrix);

  const Grid& grid() const { return grid_; }
  const SparseRowMatrix& matrix() const { return matrix_; }

  Eigen::Index start_row() const { return grid_.cell_count(); }
  Eigen::Index end_column() const { return grid_.cell_count(); }
  Eigen::Index row_of(CellId c) const { return grid_.index(c); }

  double probability(const Node& from, const Successor& to) const;

 private:
  Grid grid_;
  SparseRowMatrix matrix_;
};

// Combines intra-trajectory, beginning and terminated estimates. Each cell
// row is normalized over its neighbours plus the virtual end after clamping
// negatives; an all-zero row becomes uniform over the same support. Throws
// ProtocolError on a dimension or budget mismatch.
MobilityModel build_mobility_model(const AggregatedEstimate& transitions,
                                   const AggregatedEstimate& begins,
                                   const AggregatedEstimate& ends,
                                   const TransitionDomain& domain);

// Plain-text export, versioned. Header
//   trajldp-model 1 n=<n> bbox=<min_x>,<min_y>,<max_x>,<max_y>
// then one line per row: the node ("S" for the virtual start, otherwise the
// flat cell index) followed by "<target>:<probability>" pairs, the virtual
// end written as "E". Probabilities use 12 significant digits.
void write_model(std::ostream& out, const MobilityModel& model);
MobilityModel read_model(std::istream& in);

// Noise-plus-bias error of the transition model when each user reports at
// most l_k transitions at budget eps2 / l_k:
//   sum_s Var*(Pr(s)) + (1 - k)^2 Pr(s)^2
// where Pr(s) is the estimated share of state s and Var* is the delta-method
// variance of that share. `est_frequencies` are estimated counts (negatives
// are clamped); n_reports is the number of transition reports.
double transition_error_model(const Eigen::VectorXd& est_frequencies, double eps2, int l_k,
                              double k, double n_reports);

// Grid search over candidate quantiles; ties go to the larger k. The number
// of reports for each candidate is the expected number of transitions sent by
// n_users users under `length_dist`.
double suggest_k(const Eigen::VectorXd& est_frequencies, double eps2,
                 const LengthDistribution& length_dist, std::span<const double> candidate_ks,
                 double n_users);

}  // namespace trajldp

#endif  // TRAJLDP_CURATOR_HPP_
