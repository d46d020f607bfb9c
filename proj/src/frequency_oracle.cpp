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

#include "trajldp/frequency_oracle.hpp"

#include <cmath>
#include <string>

#include "trajldp/errors.hpp"

namespace trajldp {

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw DomainError("privacy budget must be positive, got " + std::to_string(epsilon));
  }
}

}  // namespace

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (const std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

double oue_flip_probability(double epsilon) {
  require_epsilon(epsilon);
  return 1.0 / (std::exp(epsilon) + 1.0);
}

BitVector encode(std::size_t value, std::size_t domain_size) {
  if (value >= domain_size) {
    throw DomainError("value " + std::to_string(value) + " outside domain of size " +
                      std::to_string(domain_size));
  }
  BitVector bits(domain_size);
  bits.set(value);
  return bits;
}

Report perturb(const BitVector& encoded, double epsilon, Rng& rng) {
  const std::uint64_t keep = Rng::bernoulli_threshold(kOueKeepProbability);
  const std::uint64_t flip = Rng::bernoulli_threshold(oue_flip_probability(epsilon));
  Report out{BitVector(encoded.size()), epsilon};
  auto in_words = encoded.words();
  auto out_words = out.bits.words();
  for (std::size_t w = 0; w < in_words.size(); ++w) {
    const std::size_t bits_here = std::min<std::size_t>(64, encoded.size() - w * 64);
    std::uint64_t result = 0;
    for (std::size_t b = 0; b < bits_here; ++b) {
      const bool one = (in_words[w] >> b) & 1U;
      if (rng.next_u64() < (one ? keep : flip)) result |= std::uint64_t{1} << b;
    }
    out_words[w] = result;
  }
  return out;
}

FrequencyAccumulator::FrequencyAccumulator(std::size_t domain_size)
    : bit_counts_(Counts::Zero(static_cast<Eigen::Index>(domain_size))) {}

void FrequencyAccumulator::check_epsilon(double epsilon) {
  if (!epsilon_) {
    epsilon_ = epsilon;
  } else if (*epsilon_ != epsilon) {
    throw ProtocolError("cannot aggregate reports with budgets " + std::to_string(*epsilon_) +
                        " and " + std::to_string(epsilon));
  }
}

void FrequencyAccumulator::add(const Report& report) {
  if (report.bits.size() != domain_size()) {
    throw ProtocolError("report has " + std::to_string(report.bits.size()) +
                        " bits, domain has " + std::to_string(domain_size()));
  }
  require_epsilon(report.epsilon);
  check_epsilon(report.epsilon);
  report.bits.for_each_set([this](std::size_t i) { ++bit_counts_(static_cast<Eigen::Index>(i)); });
  ++n_;
}

void FrequencyAccumulator::merge(const FrequencyAccumulator& other) {
  if (other.domain_size() != domain_size()) {
    throw ProtocolError("cannot merge aggregates over different domains");
  }
  if (other.n_ == 0) return;
  check_epsilon(*other.epsilon_);
  bit_counts_ += other.bit_counts_;
  n_ += other.n_;
}

AggregatedEstimate FrequencyAccumulator::finalize() const {
  AggregatedEstimate out;
  out.n = n_;
  out.epsilon = epsilon_;
  if (n_ == 0) {
    out.counts = Eigen::VectorXd::Zero(bit_counts_.size());
    return out;
  }
  const double q = oue_flip_probability(*epsilon_);
  out.counts = (bit_counts_.cast<double>().array() - static_cast<double>(n_) * q) /
               (kOueKeepProbability - q);
  return out;
}

AggregatedEstimate aggregate(std::span<const Report> reports, std::size_t domain_size) {
  FrequencyAccumulator acc(domain_size);
  for (const Report& r : reports) acc.add(r);
  return acc.finalize();
}

double oue_variance(double n, double epsilon) {
  require_epsilon(epsilon);
  if (n < 0) throw DomainError("report count must be non-negative");
  // 4e^ε / (e^ε − 1)² written in e^-ε so large budgets do not overflow.
  const double inv = std::exp(-epsilon);
  const double denom = -std::expm1(-epsilon);
  return n * 4.0 * inv / (denom * denom);
}

double oue_count_variance(double n, double count, double epsilon) {
  require_epsilon(epsilon);
  if (n < 0 || count < 0 || count > n) throw DomainError("invalid report counts");
  const double q = oue_flip_probability(epsilon);
  const double p = kOueKeepProbability;
  const double scale = (p - q) * (p - q);
  return (count * p * (1.0 - p) + (n - count) * q * (1.0 - q)) / scale;
}

RatioStats ratio_stats(double fx, double fy, double var_x, double var_y, double cov) {
  if (fy == 0.0) throw DomainError("ratio denominator frequency is zero");
  const double mean = fx / fy;
  // Written without dividing by fx so fx == 0 stays finite.
  const double variance =
      var_x / (fy * fy) - 2.0 * fx * cov / (fy * fy * fy) + fx * fx * var_y / (fy * fy * fy * fy);
  return {mean, variance};
}

}  // namespace trajldp
