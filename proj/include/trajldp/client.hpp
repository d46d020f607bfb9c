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

#ifndef TRAJLDP_CLIENT_HPP_
#define TRAJLDP_CLIENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "trajldp/frequency_oracle.hpp"
#include "trajldp/grid.hpp"
#include "trajldp/rng.hpp"

namespace trajldp {

// Per-user budget split. One tenth of the total goes to the length report; the
// rest is shared equally by up to `transition_cap` intra-trajectory
// transitions plus the beginning and terminated transitions.
struct PrivacyBudget {
  double eps_total = 0.0;
  double eps_length = 0.0;
  double eps_transitions = 0.0;
  double per_transition = 0.0;
  int transition_cap = 0;

  // Budget spent by a user who sends `intra_reports` intra-trajectory reports.
  double consumed(int intra_reports) const {
    return eps_length + (intra_reports + 2) * per_transition;
  }
};

// Length budget, known before the transition cap is announced.
double length_budget(double eps_total);

// Throws DomainError unless eps_total > 0 and l_k >= 1.
PrivacyBudget plan_budget(double eps_total, int l_k);

// Dense enumeration of the report domains for one grid: ordered adjacent cell
// pairs (intra-trajectory transitions), and one beginning and one terminated
// state per cell.
class TransitionDomain {
 public:
  explicit TransitionDomain(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t intra_size() const { return states_.size(); }
  std::size_t endpoint_size() const { return static_cast<std::size_t>(grid_.cell_count()); }

  // Dense index of from -> to, or nullopt if the cells are not adjacent.
  std::optional<std::size_t> transition_index(CellId from, CellId to) const;
  std::pair<CellId, CellId> transition(std::size_t index) const;

  std::size_t begin_index(CellId c) const { return static_cast<std::size_t>(grid_.index(c)); }
  std::size_t end_index(CellId c) const { return static_cast<std::size_t>(grid_.index(c)); }

 private:
  static int direction(CellId from, CellId to) {
    return (to.row - from.row + 1) * 3 + (to.col - from.col + 1);
  }

  Grid grid_;
  std::vector<int> slots_;  // cell * 9 + direction -> dense index or -1
  std::vector<std::pair<CellId, CellId>> states_;
};

// Which report domain a serialized report belongs to.
enum class ReportDomain : std::uint8_t {
  kLength = 0,
  kTransition = 1,
  kBegin = 2,
  kEnd = 3,
};

struct RoundTwoReports {
  std::vector<Report> transitions;
  Report begin;
  Report end;
};

// Everything a user sends over both rounds.
struct ClientReportBundle {
  Report length;
  std::vector<Report> transitions;
  Report begin;
  Report end;
};

// Every report below is perturbed on its own child stream of `stream`, so the
// result depends only on the stream's seed.

// Round one: one-hot at min(|traj|, cell_count) - 1, perturbed at eps_length.
Report report_length(const CellTrajectory& traj, std::size_t cell_count,
                     double eps_length, const Rng& stream);

// First min(|traj| - 1, budget.transition_cap) transitions, each perturbed at
// budget.per_transition, shuffled. Throws InvariantError on a non-adjacent
// pair.
std::vector<Report> report_transitions(const CellTrajectory& traj,
                                       const TransitionDomain& domain,
                                       const PrivacyBudget& budget, const Rng& stream);

// Beginning state of the first cell and terminated state of the last cell,
// each perturbed at budget.per_transition.
std::pair<Report, Report> report_endpoints(const CellTrajectory& traj,
                                           const TransitionDomain& domain,
                                           const PrivacyBudget& budget, const Rng& stream);

RoundTwoReports report_round_two(const CellTrajectory& traj, const TransitionDomain& domain,
                                 const PrivacyBudget& budget, const Rng& stream);

// Binary record: u32 byte count of the remainder, u8 domain, f64 epsilon,
// u32 bit count, then ceil(bits / 8) bytes with bit i at byte i / 8, position
// i % 8. All integers and floats little-endian.
void write_report(std::ostream& out, ReportDomain domain, const Report& report);

// Returns nullopt at a clean end of stream. Throws ProtocolError on a
// truncated or inconsistent record.
std::optional<std::pair<ReportDomain, Report>> read_report(std::istream& in);

void write_bundle(std::ostream& out, const ClientReportBundle& bundle);

}  // namespace trajldp

#endif  // TRAJLDP_CLIENT_HPP_
