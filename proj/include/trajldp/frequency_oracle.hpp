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

#ifndef TRAJLDP_FREQUENCY_ORACLE_HPP_
#define TRAJLDP_FREQUENCY_ORACLE_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "trajldp/rng.hpp"

namespace trajldp {

// Fixed-length bit vector packed into 64-bit words, bit i in word i / 64.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  std::size_t count() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// A perturbed bit vector together with the budget it was perturbed at. This
// is everything a user transmits.
struct Report {
  BitVector bits;
  double epsilon = 0.0;

  friend bool operator==(const Report&, const Report&) = default;
};

// Probability that a 1-bit survives perturbation.
inline constexpr double kOueKeepProbability = 0.5;

// Probability that a 0-bit is flipped to 1: q = 1 / (e^ε + 1).
double oue_flip_probability(double epsilon);

// One-hot vector of length domain_size with bit `value` set.
BitVector encode(std::size_t value, std::size_t domain_size);

// Keeps each 1-bit with probability 1/2 and raises each 0-bit with
// probability q. Consumes exactly one engine draw per bit, in bit order.
Report perturb(const BitVector& encoded, double epsilon, Rng& rng);

struct AggregatedEstimate {
  // Unbiased count estimates, one per domain element. May be negative.
  Eigen::VectorXd counts;
  std::int64_t n = 0;
  // Budget shared by all aggregated reports; empty when n == 0.
  std::optional<double> epsilon;
};

// Partial aggregate of reports over one domain: per-bit set counts and the
// number of reports. Partial aggregates merge associatively and
// commutatively; finalize() applies the unbiasing step once.
class FrequencyAccumulator {
 public:
  using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

  explicit FrequencyAccumulator(std::size_t domain_size = 0);

  // Throws ProtocolError on a length or budget mismatch.
  void add(const Report& report);
  void merge(const FrequencyAccumulator& other);

  std::size_t domain_size() const { return static_cast<std::size_t>(bit_counts_.size()); }
  std::int64_t report_count() const { return n_; }
  const std::optional<double>& epsilon() const { return epsilon_; }
  const Counts& bit_counts() const { return bit_counts_; }

  AggregatedEstimate finalize() const;

 private:
  void check_epsilon(double epsilon);

  Counts bit_counts_;
  std::int64_t n_ = 0;
  std::optional<double> epsilon_;
};

AggregatedEstimate aggregate(std::span<const Report> reports, std::size_t domain_size);

// Variance of one unbiased count estimate for an element with zero true
// frequency: n·4e^ε / (e^ε − 1)².
double oue_variance(double n, double epsilon);

// Exact variance of the estimate for an element with true count `count`
// among n reports. Equals oue_variance() when count == 0.
double oue_count_variance(double n, double count, double epsilon);

struct RatioStats {
  double mean = 0.0;
  double variance = 0.0;
};

// First-order (delta method) mean and variance of X/Y for estimators with
// means fx, fy, variances var_x, var_y and covariance cov. Throws DomainError
// when fy == 0.
RatioStats ratio_stats(double fx, double fy, double var_x, double var_y, double cov);

}  // namespace trajldp

#endif  // TRAJLDP_FREQUENCY_ORACLE_HPP_
