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

#ifndef TRAJLDP_RNG_HPP_
#define TRAJLDP_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace trajldp {

// Seedable random stream with deterministic child streams.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. All derived quantities (uniform doubles, Bernoulli draws, bounded
// integers) are computed here from raw 64-bit outputs instead of through
// <random> distributions, so results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  // Independent stream keyed by `key`. Depends only on this stream's seed,
  // not on how many values have been drawn from it.
  Rng derive(std::uint64_t key) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // True with probability p. One engine draw per call.
  bool bernoulli(double p) {
    const bool hit = next_u64() < bernoulli_threshold(p);
    return hit || p >= 1.0;
  }

  // Uniform on [0, n). Requires n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  double normal();

  // Index sampled proportionally to non-negative weights. Requires a positive
  // total weight.
  template <typename Derived>
  Eigen::Index categorical(const Eigen::MatrixBase<Derived>& weights) {
    const double total = weights.sum();
    const double target = uniform() * total;
    double acc = 0.0;
    Eigen::Index last_positive = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (weights(i) <= 0) continue;
      acc += weights(i);
      last_positive = i;
      if (target < acc) return i;
    }
    return last_positive;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // Threshold t such that a uniform 64-bit draw u satisfies u < t with
  // probability p.
  static std::uint64_t bernoulli_threshold(double p);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer, used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace trajldp

#endif  // TRAJLDP_RNG_HPP_
