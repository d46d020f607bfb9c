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

#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "trajldp/errors.hpp"
#include "trajldp/synthesizer.hpp"

namespace trajldp {
namespace {

const BoundingBox kUnit{0.0, 0.0, 1.0, 1.0};

// Builds a model from full rows; entries outside the support must be zero.
MobilityModel model_from_dense(const Grid& g, const Eigen::MatrixXd& dense) {
  const int cells = g.cell_count();
  SparseRowMatrix m(cells + 1, cells + 1);
  for (int r = 0; r <= cells; ++r) {
    const Node from = r == cells ? Node{VirtualStart{}} : Node{g.cell(r)};
    for (const Successor& s : g.aggregated_neighbors(from)) {
      const int c = std::holds_alternative<VirtualEnd>(s) ? cells : g.index(std::get<CellId>(s));
      m.insert(r, c) = dense(r, c);
    }
  }
  return MobilityModel(g, m);
}

// Uniform moves over neighbours, terminal mass `p_end` per cell, uniform start.
MobilityModel uniform_walk(const Grid& g, double p_end) {
  const int cells = g.cell_count();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(cells + 1, cells + 1);
  for (int i = 0; i < cells; ++i) {
    const auto nb = g.neighbors(g.cell(i));
    for (const CellId c : nb) d(i, g.index(c)) = (1.0 - p_end) / static_cast<double>(nb.size());
    d(i, cells) = p_end;
  }
  for (int j = 0; j < cells; ++j) d(cells, j) = 1.0 / cells;
  return model_from_dense(g, d);
}

LengthDistribution point_mass(int length, int max_length) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(max_length);
  p(length - 1) = 1.0;
  return {p};
}

TEST(Synthesis, TerminationMultiplier) {
  SynthesisConfig c;
  EXPECT_NEAR(termination_multiplier(c, 4), 1.1, 1e-15);
  EXPECT_NEAR(termination_multiplier(c, 2), 0.7, 1e-15);
}

TEST(Synthesis, ForcedTermination) {
  const Grid g(kUnit, 2);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(5, 5);
  d(0, 4) = 1.0;  // X = (0,0) always ends
  for (int i = 1; i < 4; ++i) d(i, 0) = 1.0;
  d(4, 0) = 1.0;
  const MobilityModel m = model_from_dense(g, d);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const SampledTrajectory t = synthesize_sampled(point_mass(5, 4 * 2), m, SynthesisConfig{}, rng);
    EXPECT_EQ(t.sampled_length, 5);
    EXPECT_EQ(t.cells, (CellTrajectory{{0, 0}}));
  }
}

TEST(Synthesis, NoTerminationReachesSampledLength) {
  const Grid g(kUnit, 3);
  const MobilityModel m = uniform_walk(g, 0.0);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) EXPECT_EQ(synthesize_one(point_mass(4, 9), m, {}, rng).size(), 4U);
}

TEST(Synthesis, LengthOneEmitsStartOnly) {
  const Grid g(kUnit, 3);
  Rng rng(3);
  EXPECT_EQ(synthesize_one(point_mass(1, 9), uniform_walk(g, 0.0), {}, rng).size(), 1U);
}

TEST(Synthesis, OutputsAreContinuousAndCapped) {
  const Grid g(kUnit, 4);
  const MobilityModel m = uniform_walk(g, 0.15);
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(16, 1.0, 16.0);
  const LengthDistribution lengths{p / p.sum()};
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    const SampledTrajectory t = synthesize_sampled(lengths, m, {}, rng);
    ASSERT_TRUE(is_continuous(t.cells));
    ASSERT_GE(t.cells.size(), 1U);
    ASSERT_LE(static_cast<int>(t.cells.size()), t.sampled_length);
  }
}

TEST(Synthesis, LengthsFollowDistributionWithoutTermination) {
  const Grid g(kUnit, 3);
  const MobilityModel m = uniform_walk(g, 0.0);
  Eigen::VectorXd p(9);
  p << 0.05, 0.1, 0.2, 0.25, 0.15, 0.1, 0.08, 0.05, 0.02;
  const LengthDistribution lengths{p};
  SynthesisConfig c;
  c.alpha = 0.0;
  c.beta = 0.0;
  c.target_count = 20000;
  c.seed = 5;
  std::vector<double> observed(9, 0.0);
  for (const auto& t : synthesize_dataset(lengths, m, c)) observed[t.size() - 1] += 1.0;
  double chi2 = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double e = p(i) * 20000;
    chi2 += (observed[i] - e) * (observed[i] - e) / e;
  }
  const double pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared(8), chi2));
  EXPECT_GT(pvalue, 0.01) << "chi2=" << chi2;
}

TEST(Synthesis, StartCellsFollowStartRow) {
  const Grid g(kUnit, 2);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 4; ++i) d(i, 4) = 1.0;
  d(4, 0) = 0.1;
  d(4, 1) = 0.2;
  d(4, 2) = 0.3;
  d(4, 3) = 0.4;
  const MobilityModel m = model_from_dense(g, d);
  SynthesisConfig c;
  c.target_count = 100000;
  c.seed = 6;
  std::vector<double> counts(4, 0.0);
  for (const auto& t : synthesize_dataset(point_mass(1, 4), m, c)) counts[g.index(t.front())] += 1;
  double tv = 0.0;
  for (int j = 0; j < 4; ++j) tv += std::abs(counts[j] / 100000.0 - d(4, j));
  EXPECT_LE(tv / 2, 0.02);
}

TEST(Synthesis, DatasetIsDeterministicAndValidated) {
  const Grid g(kUnit, 4);
  const MobilityModel m = uniform_walk(g, 0.1);
  const LengthDistribution lengths{Eigen::VectorXd::Constant(16, 1.0 / 16)};
  SynthesisConfig c;
  c.target_count = 500;
  c.seed = 99;
  EXPECT_EQ(synthesize_dataset(lengths, m, c), synthesize_dataset(lengths, m, c));
  EXPECT_EQ(synthesize_dataset(lengths, m, c).size(), 500U);
  c.target_count = 0;
  EXPECT_THROW(synthesize_dataset(lengths, m, c), DomainError);
  c.target_count = 1;
  c.alpha = -0.1;
  EXPECT_THROW(synthesize_dataset(lengths, m, c), DomainError);
}

TEST(Realize, OnePointPerCellInsideIt) {
  Rng rng(7);
  const RawTrajectory one = realize(Grid(kUnit, 1), {{0, 0}}, rng);
  ASSERT_EQ(one.size(), 1U);
  EXPECT_GE(one[0].x(), 0.0);
  EXPECT_LT(one[0].x(), 1.0);
  EXPECT_GE(one[0].y(), 0.0);
  EXPECT_LT(one[0].y(), 1.0);

  const Grid g(BoundingBox{-2, -2, 2, 6}, 5);
  const CellTrajectory cells{{0, 0}, {1, 1}, {1, 2}, {2, 2}, {3, 1}, {4, 0}};
  const RawTrajectory pts = realize(g, cells, rng);
  ASSERT_EQ(pts.size(), cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) EXPECT_EQ(g.locate(pts[i]), cells[i]);
  const auto a = realize_all(g, {cells, cells}, 11);
  EXPECT_EQ(a, realize_all(g, {cells, cells}, 11));
  EXPECT_NE(a[0], a[1]);
}

}  // namespace
}  // namespace trajldp
