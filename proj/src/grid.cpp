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

#include "trajldp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "trajldp/errors.hpp"

namespace trajldp {

namespace {

int clamp_cell(double coord, int n) {
  const int c = static_cast<int>(std::floor(coord));
  return std::clamp(c, 0, n - 1);
}

}  // namespace

void BoundingBox::validate() const {
  if (!(max_x > min_x) || !(max_y > min_y) || !std::isfinite(min_x) ||
      !std::isfinite(min_y) || !std::isfinite(max_x) || !std::isfinite(max_y)) {
    std::ostringstream os;
    os << "degenerate bounding box [" << min_x << ", " << max_x << "] x ["
       << min_y << ", " << max_y << "]";
    throw DomainError(os.str());
  }
}

bool adjacent(CellId a, CellId b) {
  return a != b && std::abs(a.row - b.row) <= 1 && std::abs(a.col - b.col) <= 1;
}

bool is_continuous(const CellTrajectory& traj) {
  if (traj.empty()) return false;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    if (!adjacent(traj[i - 1], traj[i])) return false;
  }
  return true;
}

Grid::Grid(const BoundingBox& bbox, int n) : bbox_(bbox), n_(n) {
  bbox_.validate();
  if (n < 1) throw DomainError("grid granularity must be >= 1, got " + std::to_string(n));
}

int Grid::index(CellId c) const {
  if (!valid(c)) {
    throw DomainError("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                      ") outside " + std::to_string(n_) + "x" + std::to_string(n_) + " grid");
  }
  return c.row * n_ + c.col;
}

CellId Grid::cell(int index) const {
  if (index < 0 || index >= cell_count()) {
    throw DomainError("cell index " + std::to_string(index) + " out of range");
  }
  return {index / n_, index % n_};
}

CellId Grid::locate(const Point& p) const {
  if (!(p.x() >= bbox_.min_x && p.x() <= bbox_.max_x)) {
    std::ostringstream os;
    os.precision(17);
    os << "x=" << p.x() << " outside [" << bbox_.min_x << ", " << bbox_.max_x << "]";
    throw OutOfDomainError(os.str());
  }
  if (!(p.y() >= bbox_.min_y && p.y() <= bbox_.max_y)) {
    std::ostringstream os;
    os.precision(17);
    os << "y=" << p.y() << " outside [" << bbox_.min_y << ", " << bbox_.max_y << "]";
    throw OutOfDomainError(os.str());
  }
  return {clamp_cell(to_v(p.y()), n_), clamp_cell(to_u(p.x()), n_)};
}

Point Grid::cell_origin(CellId c) const {
  index(c);
  return {bbox_.min_x + c.col * cell_width(), bbox_.min_y + c.row * cell_height()};
}

Point Grid::cell_center(CellId c) const {
  index(c);
  return {bbox_.min_x + (c.col + 0.5) * cell_width(),
          bbox_.min_y + (c.row + 0.5) * cell_height()};
}

std::vector<CellId> Grid::neighbors(CellId c) const {
  index(c);
  std::vector<CellId> out;
  out.reserve(8);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const CellId nb{c.row + dr, c.col + dc};
      if (valid(nb)) out.push_back(nb);
    }
  }
  return out;
}

std::vector<Successor> Grid::aggregated_neighbors(const Node& node) const {
  std::vector<Successor> out;
  if (const auto* c = std::get_if<CellId>(&node)) {
    for (const CellId nb : neighbors(*c)) out.emplace_back(nb);
    out.emplace_back(VirtualEnd{});
    return out;
  }
  if (std::holds_alternative<VirtualEnd>(node)) return out;  // absorbing
  out.reserve(cell_count());
  for (int i = 0; i < cell_count(); ++i) out.emplace_back(cell(i));
  return out;
}

CellTrajectory Grid::traverse(const Point& a, const Point& b) const {
  CellId cur = locate(a);
  const CellId end = locate(b);
  CellTrajectory out{cur};
  if (cur == end) return out;

  const double u0 = to_u(a.x());
  const double v0 = to_v(a.y());
  const double du = to_u(b.x()) - u0;
  const double dv = to_v(b.y()) - v0;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const int step_c = end.col > cur.col ? 1 : (end.col < cur.col ? -1 : 0);
  const int step_r = end.row > cur.row ? 1 : (end.row < cur.row ? -1 : 0);

  // Parametric distance along the segment to the next column/row boundary.
  auto first_crossing = [](double origin, double delta, int cell, int step) {
    if (step == 0 || delta == 0.0) return kInf;
    const double boundary = step > 0 ? cell + 1 : cell;
    return std::max(0.0, (boundary - origin) / delta);
  };
  double t_col = first_crossing(u0, du, cur.col, step_c);
  double t_row = first_crossing(v0, dv, cur.row, step_r);
  const double dt_col = du == 0.0 ? kInf : 1.0 / std::abs(du);
  const double dt_row = dv == 0.0 ? kInf : 1.0 / std::abs(dv);

  const int max_steps = 2 * n_ + 2;
  for (int steps = 0; cur != end; ++steps) {
    if (steps > max_steps) throw InvariantError("grid traversal did not terminate");
    if (cur.col == end.col) t_col = kInf;
    if (cur.row == end.row) t_row = kInf;
    const double tol = 1e-12 * std::max(1.0, std::min(t_col, t_row));
    if (t_col < t_row - tol) {
      cur.col += step_c;
      t_col += dt_col;
    } else if (t_row < t_col - tol) {
      cur.row += step_r;
      t_row += dt_row;
    } else {
      cur.col += step_c;
      cur.row += step_r;
      t_col += dt_col;
      t_row += dt_row;
    }
    out.push_back(cur);
  }
  return out;
}

CellTrajectory Grid::discretize(const RawTrajectory& traj) const {
  if (traj.empty()) throw DomainError("cannot discretize an empty trajectory");
  CellTrajectory out{locate(traj.front())};
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const CellId next = locate(traj[i]);
    const CellId last = out.back();
    if (next == last) continue;
    if (adjacent(last, next)) {
      out.push_back(next);
      continue;
    }
    const CellTrajectory path = traverse(traj[i - 1], traj[i]);
    out.insert(out.end(), path.begin() + 1, path.end());
  }
  return out;
}

double granularity_estimate(double n_trajectories, double avg_points,
                            double sampling_ratio, double epsilon, double lambda) {
  if (!(n_trajectories > 0) || !(avg_points > 0) || !(sampling_ratio > 0) ||
      !(epsilon > 0) || !(lambda > 0)) {
    throw DomainError("granularity inputs must be strictly positive");
  }
  const double x = epsilon * sampling_ratio / avg_points;
  const double em1 = std::expm1(x);
  const double inner = n_trajectories * avg_points * em1 * em1 / std::exp(x);
  return lambda * std::pow(inner, 0.25);
}

int select_granularity(double n_trajectories, double avg_points,
                       double sampling_ratio, double epsilon, double lambda) {
  const double n = granularity_estimate(n_trajectories, avg_points, sampling_ratio,
                                        epsilon, lambda);
  return std::max(1, static_cast<int>(std::floor(n)));
}

}  // namespace trajldp
