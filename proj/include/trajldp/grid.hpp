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

#ifndef TRAJLDP_GRID_HPP_
#define TRAJLDP_GRID_HPP_

#include <compare>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace trajldp {

using Point = Eigen::Vector2d;

// Ordered continuous-space points. Timestamps are not modelled.
using RawTrajectory = std::vector<Point>;

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 1.0;
  double max_y = 1.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool contains(const Point& p) const {
    return p.x() >= min_x && p.x() <= max_x && p.y() >= min_y && p.y() <= max_y;
  }
  // Throws DomainError unless max_x > min_x and max_y > min_y.
  void validate() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct CellId {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

// Non-empty; consecutive cells are 8-adjacent.
using CellTrajectory = std::vector<CellId>;

struct VirtualStart {
  friend bool operator==(VirtualStart, VirtualStart) { return true; }
};
struct VirtualEnd {
  friend bool operator==(VirtualEnd, VirtualEnd) { return true; }
};

// A node of the aggregated mobility model.
using Node = std::variant<CellId, VirtualStart, VirtualEnd>;
// Anything a node can transition to.
using Successor = std::variant<CellId, VirtualEnd>;

// True iff a and b differ by at most one in each coordinate and are distinct.
bool adjacent(CellId a, CellId b);

// True iff `traj` is non-empty and every consecutive pair is adjacent.
bool is_continuous(const CellTrajectory& traj);

// Uniform n x n partition of a bounding box. Row indexes y, column indexes x.
class Grid {
 public:
  Grid(const BoundingBox& bbox, int n);

  const BoundingBox& bbox() const { return bbox_; }
  int n() const { return n_; }
  int cell_count() const { return n_ * n_; }
  double cell_width() const { return bbox_.width() / n_; }
  double cell_height() const { return bbox_.height() / n_; }

  bool valid(CellId c) const {
    return c.row >= 0 && c.row < n_ && c.col >= 0 && c.col < n_;
  }
  // Row-major flat index. Throws DomainError for cells outside the grid.
  int index(CellId c) const;
  CellId cell(int index) const;

  // Points on the max edges belong to the last row/column. Throws
  // OutOfDomainError for points outside the box.
  CellId locate(const Point& p) const;

  Point cell_origin(CellId c) const;
  Point cell_center(CellId c) const;

  // 8-neighbourhood clipped to the grid, in row-major order.
  std::vector<CellId> neighbors(CellId c) const;

  // Cells (and the virtual end) reachable from `node` in the mobility model:
  // a cell's neighbours plus the virtual end, every cell for the virtual
  // start, nothing for the virtual end.
  std::vector<Successor> aggregated_neighbors(const Node& node) const;

  // Cells crossed by the segment a -> b, from locate(a) to locate(b), with
  // consecutive entries 8-adjacent. An exact corner crossing is a single
  // diagonal step.
  CellTrajectory traverse(const Point& a, const Point& b) const;

  // Maps points to cells, collapses repeats, and fills gaps between
  // non-adjacent consecutive cells with traverse().
  CellTrajectory discretize(const RawTrajectory& traj) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double to_u(double x) const { return (x - bbox_.min_x) / bbox_.width() * n_; }
  double to_v(double y) const { return (y - bbox_.min_y) / bbox_.height() * n_; }

  BoundingBox bbox_;
  int n_;
};

// Real-valued granularity λ·(|T|·L_R·(e^x − 1)² / e^x)^(1/4) with
// x = ε·f / L_R, where |T| is the number of trajectories, L_R the mean number
// of points per trajectory and f the device sampling ratio.
double granularity_estimate(double n_trajectories, double avg_points,
                            double sampling_ratio, double epsilon,
                            double lambda);

// floor(granularity_estimate(...)), at least 1. Throws DomainError unless
// every input is strictly positive.
int select_granularity(double n_trajectories, double avg_points,
                       double sampling_ratio, double epsilon, double lambda);

}  // namespace trajldp

#endif  // TRAJLDP_GRID_HPP_
