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

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <gtest/gtest.h>

#include "trajldp/errors.hpp"
#include "trajldp/grid.hpp"
#include "trajldp/rng.hpp"

namespace trajldp {
namespace {

const BoundingBox kUnit{0.0, 0.0, 1.0, 1.0};

TEST(Grid, LocateUsesFloorWithRowFromY) {
  EXPECT_EQ(Grid(kUnit, 2).locate({0.75, 0.25}), (CellId{0, 1}));
  EXPECT_EQ(Grid(kUnit, 4).locate({0.49, 0.51}), (CellId{2, 1}));
}

TEST(Grid, LocateClampsMaxEdge) {
  EXPECT_EQ(Grid(kUnit, 2).locate({1.0, 1.0}), (CellId{1, 1}));
  EXPECT_EQ(Grid(kUnit, 2).locate({0.0, 0.0}), (CellId{0, 0}));
}

TEST(Grid, LocateOutsideNamesCoordinate) {
  const Grid g(kUnit, 2);
  try {
    g.locate({1.5, 0.5});
    FAIL() << "expected OutOfDomainError";
  } catch (const OutOfDomainError& e) {
    EXPECT_NE(std::string(e.what()).find("x=1.5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(g.locate({0.5, -0.1}), OutOfDomainError);
}

TEST(Grid, RejectsDegenerateInputs) {
  EXPECT_THROW(Grid(kUnit, 0), DomainError);
  EXPECT_THROW(Grid(BoundingBox{0, 0, 0, 1}, 2), DomainError);
  EXPECT_THROW(Grid(kUnit, 2).index({2, 0}), DomainError);
  EXPECT_THROW(Grid(kUnit, 2).neighbors({-1, 0}), DomainError);
}

TEST(Grid, FlatIndexIsBijective) {
  const Grid g(kUnit, 5);
  std::set<int> seen;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const int i = g.index({r, c});
      EXPECT_EQ(i, r * 5 + c);
      EXPECT_EQ(g.cell(i), (CellId{r, c}));
      seen.insert(i);
    }
  }
  EXPECT_EQ(seen.size(), 25U);
}

TEST(Grid, LocateOfCenterIsIdentity) {
  const Grid g(BoundingBox{-3.0, 10.0, 7.0, 12.5}, 7);
  for (int i = 0; i < g.cell_count(); ++i) EXPECT_EQ(g.locate(g.cell_center(g.cell(i))), g.cell(i));
}

TEST(Grid, NeighborCounts) {
  const Grid g(kUnit, 3);
  EXPECT_EQ(g.neighbors({1, 1}).size(), 8U);
  EXPECT_EQ(g.neighbors({0, 1}).size(), 5U);
  const auto corner = g.neighbors({0, 0});
  EXPECT_EQ(std::set<CellId>(corner.begin(), corner.end()),
            (std::set<CellId>{{0, 1}, {1, 0}, {1, 1}}));
  EXPECT_TRUE(Grid(kUnit, 1).neighbors({0, 0}).empty());
}

TEST(Grid, NeighborsAreSymmetric) {
  const Grid g(kUnit, 4);
  for (int i = 0; i < g.cell_count(); ++i) {
    for (const CellId b : g.neighbors(g.cell(i))) {
      const auto back = g.neighbors(b);
      EXPECT_NE(std::find(back.begin(), back.end(), g.cell(i)), back.end());
    }
  }
}

TEST(Grid, AggregatedNeighbors) {
  const Grid g(kUnit, 3);
  const auto center = g.aggregated_neighbors(CellId{1, 1});
  EXPECT_EQ(center.size(), 9U);
  EXPECT_EQ(std::count_if(center.begin(), center.end(),
                          [](const Successor& s) { return std::holds_alternative<VirtualEnd>(s); }),
            1);
  const auto start = g.aggregated_neighbors(VirtualStart{});
  EXPECT_EQ(start.size(), 9U);
  for (const auto& s : start) EXPECT_TRUE(std::holds_alternative<CellId>(s));
  const auto single = Grid(kUnit, 1).aggregated_neighbors(CellId{0, 0});
  ASSERT_EQ(single.size(), 1U);
  EXPECT_TRUE(std::holds_alternative<VirtualEnd>(single[0]));
  EXPECT_TRUE(g.aggregated_neighbors(VirtualEnd{}).empty());
}

TEST(Grid, DiscretizeHorizontalSegment) {
  const Grid g(kUnit, 4);
  EXPECT_EQ(g.discretize({{0.1, 0.1}, {0.9, 0.1}}),
            (CellTrajectory{{0, 0}, {0, 1}, {0, 2}, {0, 3}}));
}

TEST(Grid, DiscretizeCollapsesAndHandlesSinglePoints) {
  const Grid g(kUnit, 4);
  EXPECT_EQ(g.discretize({{0.3, 0.3}}), (CellTrajectory{{1, 1}}));
  EXPECT_EQ(g.discretize({{0.3, 0.3}, {0.4, 0.45}}), (CellTrajectory{{1, 1}}));
  EXPECT_THROW(g.discretize({}), DomainError);
  EXPECT_THROW(g.discretize({{0.3, 0.3}, {2.0, 0.3}}), OutOfDomainError);
}

TEST(Grid, ExactCornerCrossingIsOneDiagonalStep) {
  const Grid g(kUnit, 4);
  EXPECT_EQ(g.traverse({0.125, 0.125}, {0.625, 0.625}),
            (CellTrajectory{{0, 0}, {1, 1}, {2, 2}}));
}

// Cells whose square meets the open segment in a piece of positive length,
// ordered by entry parameter (Liang-Barsky clipping per cell).
CellTrajectory clipped_cells(const Grid& g, const Point& a, const Point& b) {
  std::vector<std::pair<double, CellId>> hits;
  for (int i = 0; i < g.cell_count(); ++i) {
    const CellId c = g.cell(i);
    const Point lo = g.cell_origin(c);
    const Point hi = lo + Point(g.cell_width(), g.cell_height());
    double t0 = 0.0;
    double t1 = 1.0;
    bool inside = true;
    for (int axis = 0; axis < 2 && inside; ++axis) {
      const double d = b(axis) - a(axis);
      if (d == 0.0) {
        inside = a(axis) >= lo(axis) && a(axis) < hi(axis);
        continue;
      }
      double ta = (lo(axis) - a(axis)) / d;
      double tb = (hi(axis) - a(axis)) / d;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    if (inside && t1 - t0 > 1e-12) hits.emplace_back(t0, c);
  }
  std::sort(hits.begin(), hits.end());
  CellTrajectory out;
  for (const auto& [t, c] : hits) out.push_back(c);
  return out;
}

TEST(Grid, TraverseMatchesClippingOracle) {
  const Grid g(BoundingBox{0.0, 0.0, 10.0, 6.0}, 9);
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const Point a(rng.uniform() * 10.0, rng.uniform() * 6.0);
    const Point b(rng.uniform() * 10.0, rng.uniform() * 6.0);
    EXPECT_EQ(g.traverse(a, b), clipped_cells(g, a, b)) << "trial " << trial;
  }
}

TEST(Grid, DiscretizedRandomTrajectoriesAreContinuous) {
  const Grid g(BoundingBox{-5.0, -5.0, 5.0, 5.0}, 13);
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    RawTrajectory t;
    const int len = 1 + static_cast<int>(rng.uniform_index(20));
    for (int i = 0; i < len; ++i) t.emplace_back(rng.uniform() * 10 - 5, rng.uniform() * 10 - 5);
    const CellTrajectory cells = g.discretize(t);
    EXPECT_TRUE(is_continuous(cells));
    EXPECT_EQ(cells.front(), g.locate(t.front()));
    EXPECT_EQ(cells.back(), g.locate(t.back()));
  }
}

// Direct long-double evaluation of the closed form.
long double granularity_oracle(long double t, long double l, long double f, long double eps,
                               long double lambda) {
  const long double x = eps * f / l;
  const long double e = std::exp(x);
  return lambda * std::pow(t * l * (e - 1) * (e - 1) / e, 0.25L);
}

TEST(Granularity, PortoSettingGivesSix) {
  const double est = granularity_estimate(361591, 34.13, 1.0 / 15.0, 1.0, 2.5);
  EXPECT_NEAR(est, static_cast<double>(granularity_oracle(361591, 34.13, 1.0L / 15, 1, 2.5)),
              1e-9);
  EXPECT_EQ(select_granularity(361591, 34.13, 1.0 / 15.0, 1.0, 2.5), 6);
}

TEST(Granularity, FloorsAtOneAndScalesWithLambda) {
  EXPECT_EQ(select_granularity(1000, 10, 0.1, 1.0, 1e-9), 1);
  const double base = granularity_estimate(5000, 20, 0.2, 2.0, 1.0);
  EXPECT_NEAR(granularity_estimate(5000, 20, 0.2, 2.0, 2.0), 2.0 * base, 1e-12 * base);
  EXPECT_THROW(select_granularity(0, 10, 0.1, 1.0, 1.0), DomainError);
  EXPECT_THROW(select_granularity(10, 10, 0.1, -1.0, 1.0), DomainError);
}

TEST(Granularity, MonotoneInCorpusSizeAndLambda) {
  int prev = 0;
  for (double t = 1e3; t < 1e8; t *= 1.7) {
    const int n = select_granularity(t, 30, 1.0 / 15, 1.0, 2.5);
    EXPECT_GE(n, prev);
    prev = n;
  }
  prev = 0;
  for (double lambda = 0.1; lambda < 20; lambda *= 1.3) {
    const int n = select_granularity(1e5, 30, 1.0 / 15, 1.0, lambda);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

}  // namespace
}  // namespace trajldp
