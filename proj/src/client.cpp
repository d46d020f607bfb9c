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

#include "trajldp/client.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "trajldp/errors.hpp"

namespace trajldp {

namespace {

// Child stream keys. Transition i uses kTransitionKey + i.
constexpr std::uint64_t kLengthKey = 1;
constexpr std::uint64_t kBeginKey = 2;
constexpr std::uint64_t kEndKey = 3;
constexpr std::uint64_t kShuffleKey = 4;
constexpr std::uint64_t kTransitionKey = 16;

template <typename T>
void put_le(std::string& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  buf.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T get_le(const unsigned char* p) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

double length_budget(double eps_total) {
  if (!(eps_total > 0.0)) throw DomainError("total budget must be positive");
  return eps_total / 10.0;
}

PrivacyBudget plan_budget(double eps_total, int l_k) {
  if (!(eps_total > 0.0)) throw DomainError("total budget must be positive");
  if (l_k < 1) throw DomainError("transition cap must be >= 1, got " + std::to_string(l_k));
  PrivacyBudget b;
  b.eps_total = eps_total;
  b.eps_length = length_budget(eps_total);
  b.eps_transitions = 9.0 * eps_total / 10.0;
  b.per_transition = b.eps_transitions / (l_k + 2);
  b.transition_cap = l_k;
  return b;
}

TransitionDomain::TransitionDomain(const Grid& grid)
    : grid_(grid), slots_(static_cast<std::size_t>(grid.cell_count()) * 9, -1) {
  for (int i = 0; i < grid_.cell_count(); ++i) {
    const CellId from = grid_.cell(i);
    for (const CellId to : grid_.neighbors(from)) {
      slots_[static_cast<std::size_t>(i) * 9 + direction(from, to)] =
          static_cast<int>(states_.size());
      states_.emplace_back(from, to);
    }
  }
}

std::optional<std::size_t> TransitionDomain::transition_index(CellId from, CellId to) const {
  if (!grid_.valid(from) || !grid_.valid(to) || !adjacent(from, to)) return std::nullopt;
  const int slot = slots_[static_cast<std::size_t>(grid_.index(from)) * 9 + direction(from, to)];
  if (slot < 0) return std::nullopt;
  return static_cast<std::size_t>(slot);
}

std::pair<CellId, CellId> TransitionDomain::transition(std::size_t index) const {
  if (index >= states_.size()) throw DomainError("transition index out of range");
  return states_[index];
}

Report report_length(const CellTrajectory& traj, std::size_t cell_count, double eps_length,
                     const Rng& stream) {
  if (traj.empty()) throw DomainError("trajectory must contain at least one cell");
  const std::size_t bit = std::min(traj.size(), cell_count) - 1;
  Rng rng = stream.derive(kLengthKey);
  return perturb(encode(bit, cell_count), eps_length, rng);
}

std::vector<Report> report_transitions(const CellTrajectory& traj, const TransitionDomain& domain,
                                       const PrivacyBudget& budget, const Rng& stream) {
  if (!(budget.per_transition > 0.0)) throw DomainError("per-transition budget must be positive");
  std::vector<Report> out;
  if (traj.size() < 2) return out;
  const std::size_t count =
      std::min(traj.size() - 1, static_cast<std::size_t>(std::max(0, budget.transition_cap)));
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto index = domain.transition_index(traj[i], traj[i + 1]);
    if (!index) {
      throw InvariantError("transition " + std::to_string(i) + " joins non-adjacent cells");
    }
    Rng rng = stream.derive(kTransitionKey + i);
    out.push_back(perturb(encode(*index, domain.intra_size()), budget.per_transition, rng));
  }
  Rng shuffler = stream.derive(kShuffleKey);
  shuffler.shuffle(out);
  return out;
}

std::pair<Report, Report> report_endpoints(const CellTrajectory& traj,
                                           const TransitionDomain& domain,
                                           const PrivacyBudget& budget, const Rng& stream) {
  if (traj.empty()) throw DomainError("trajectory must contain at least one cell");
  if (!(budget.per_transition > 0.0)) throw DomainError("per-transition budget must be positive");
  Rng begin_rng = stream.derive(kBeginKey);
  Rng end_rng = stream.derive(kEndKey);
  return {perturb(encode(domain.begin_index(traj.front()), domain.endpoint_size()),
                  budget.per_transition, begin_rng),
          perturb(encode(domain.end_index(traj.back()), domain.endpoint_size()),
                  budget.per_transition, end_rng)};
}

RoundTwoReports report_round_two(const CellTrajectory& traj, const TransitionDomain& domain,
                                 const PrivacyBudget& budget, const Rng& stream) {
  RoundTwoReports out;
  out.transitions = report_transitions(traj, domain, budget, stream);
  auto [begin, end] = report_endpoints(traj, domain, budget, stream);
  out.begin = std::move(begin);
  out.end = std::move(end);
  return out;
}

void write_report(std::ostream& out, ReportDomain domain, const Report& report) {
  const std::size_t nbits = report.bits.size();
  const std::size_t nbytes = (nbits + 7) / 8;
  std::string body;
  body.reserve(1 + 8 + 4 + nbytes);
  put_le<std::uint8_t>(body, static_cast<std::uint8_t>(domain));
  put_le<double>(body, report.epsilon);
  put_le<std::uint32_t>(body, static_cast<std::uint32_t>(nbits));
  const auto words = report.bits.words();
  for (std::size_t i = 0; i < nbytes; ++i) {
    body.push_back(static_cast<char>((words[i / 8] >> (8 * (i % 8))) & 0xFFU));
  }
  std::string record;
  put_le<std::uint32_t>(record, static_cast<std::uint32_t>(body.size()));
  record += body;
  out.write(record.data(), static_cast<std::streamsize>(record.size()));
}

std::optional<std::pair<ReportDomain, Report>> read_report(std::istream& in) {
  unsigned char prefix[4];
  in.read(reinterpret_cast<char*>(prefix), 4);
  if (in.gcount() == 0) return std::nullopt;
  if (in.gcount() != 4) throw ProtocolError("truncated report length prefix");
  const auto length = get_le<std::uint32_t>(prefix);
  if (length < 13) throw ProtocolError("report record too short");
  std::vector<unsigned char> body(length);
  in.read(reinterpret_cast<char*>(body.data()), length);
  if (static_cast<std::uint32_t>(in.gcount()) != length) throw ProtocolError("truncated report");

  const std::uint8_t domain = body[0];
  if (domain > static_cast<std::uint8_t>(ReportDomain::kEnd)) {
    throw ProtocolError("unknown report domain " + std::to_string(domain));
  }
  const double epsilon = get_le<double>(body.data() + 1);
  const auto nbits = get_le<std::uint32_t>(body.data() + 9);
  const std::size_t nbytes = (static_cast<std::size_t>(nbits) + 7) / 8;
  if (length != 13 + nbytes) throw ProtocolError("report length does not match bit count");

  Report report{BitVector(nbits), epsilon};
  auto words = report.bits.words();
  for (std::size_t i = 0; i < nbytes; ++i) {
    words[i / 8] |= static_cast<std::uint64_t>(body[13 + i]) << (8 * (i % 8));
  }
  if (nbits % 64 != 0 && !words.empty()) {
    if (words.back() >> (nbits % 64)) throw ProtocolError("padding bits set in report");
  }
  return std::make_pair(static_cast<ReportDomain>(domain), std::move(report));
}

void write_bundle(std::ostream& out, const ClientReportBundle& bundle) {
  write_report(out, ReportDomain::kLength, bundle.length);
  for (const Report& r : bundle.transitions) write_report(out, ReportDomain::kTransition, r);
  write_report(out, ReportDomain::kBegin, bundle.begin);
  write_report(out, ReportDomain::kEnd, bundle.end);
}

}  // namespace trajldp
