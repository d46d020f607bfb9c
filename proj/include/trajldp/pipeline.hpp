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

#ifndef TRAJLDP_PIPELINE_HPP_
#define TRAJLDP_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajldp/attacks.hpp"
#include "trajldp/client.hpp"
#include "trajldp/curator.hpp"
#include "trajldp/frequency_oracle.hpp"
#include "trajldp/grid.hpp"
#include "trajldp/metrics.hpp"
#include "trajldp/rng.hpp"

namespace trajldp {

struct PipelineConfig {
  std::string input;
  std::string output_dir = "out";
  double epsilon = 1.0;
  double k = 0.9;
  double alpha = 0.3;
  double beta = 0.2;
  double lambda = 2.5;
  // Grid side; 0 selects it from the corpus statistics.
  int grid = 0;
  double sampling_ratio = 1.0 / 15.0;
  std::uint64_t seed = 0;
  int repetitions = 1;
  int query_count = 200;
  double query_fraction = 1.0 / 9.0;

  bool density = true;
  bool query = true;
  bool hotspot = true;
  bool kendall = true;
  bool trip = true;
  bool length = true;
  bool diameter = true;
  bool pattern = true;

  bool reidentification = true;
  bool outlier = true;
  // Real trajectories crossing the sensitive zone that the re-identification
  // attack targets; 0 means all of them.
  std::size_t attack_targets = 200;
  double outlier_fraction = 0.01;

  // Also write every client report to reports.bin.
  bool write_reports = false;

  void validate() const;
};

// Names accepted by set_config_value, in declaration order.
const std::vector<std::string>& config_keys();
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const PipelineConfig& config, const std::string& key);

// `key = value` lines; '#' starts a comment. Unknown keys are errors.
std::map<std::string, std::string> parse_config(std::istream& in);
PipelineConfig load_config(const std::string& path);

MetricOptions metric_options(const PipelineConfig& config, std::uint64_t query_seed,
                             int cell_count);

// What the curator receives in each round: aggregates of client reports only.
struct RoundOneInbox {
  FrequencyAccumulator lengths;
};

struct RoundTwoInbox {
  FrequencyAccumulator transitions;
  FrequencyAccumulator begins;
  FrequencyAccumulator ends;
};

struct RoundOneResult {
  LengthDistribution lengths;
  int l_k = 1;
  PrivacyBudget budget;
};

// Client side. `clients` is the master stream; user i draws from
// clients.derive(i). When `sink` is set, every report is appended to it.
RoundOneInbox simulate_round_one(const std::vector<CellTrajectory>& users, const Grid& grid,
                                 double eps_length, const Rng& clients,
                                 std::ostream* sink = nullptr);
RoundTwoInbox simulate_round_two(const std::vector<CellTrajectory>& users,
                                 const TransitionDomain& domain, const PrivacyBudget& budget,
                                 const Rng& clients, std::ostream* sink = nullptr);

// Curator side.
RoundOneResult curate_round_one(const RoundOneInbox& inbox, double epsilon, double k);
MobilityModel curate_round_two(const RoundTwoInbox& inbox, const TransitionDomain& domain);

struct LedgerEntry {
  std::string stage;
  double epsilon = 0.0;
};

// Per-user worst-case budget by stage; sums to the total budget.
std::vector<LedgerEntry> privacy_ledger(const PrivacyBudget& budget);
double ledger_total(const std::vector<LedgerEntry>& ledger);

struct PipelineResult {
  int grid_n = 0;
  BoundingBox bbox;
  int l_k = 0;
  PrivacyBudget budget;
  std::vector<LedgerEntry> ledger;
  LengthDistribution lengths;
  std::optional<MobilityModel> model;
  std::vector<RawCorpus> synthetic;
  std::vector<UtilityReport> utilities;
  std::vector<std::vector<ResilienceRecord>> resilience;
};

int choose_grid(const RawCorpus& corpus, const PipelineConfig& config);

// Runs the protocol, synthesis, metrics and attacks in memory. Synthesis is
// repeated `repetitions` times over one set of client reports.
PipelineResult run_protocol(const RawCorpus& corpus, const BoundingBox& bbox,
                            const PipelineConfig& config, std::ostream* report_sink = nullptr);

// Loads config.input, runs the protocol and writes the artifacts into
// config.output_dir.
PipelineResult run_pipeline(const PipelineConfig& config);

// Mean and sample standard deviation per utility field.
struct UtilitySummary {
  UtilityReport mean;
  UtilityReport stddev;
};
UtilitySummary summarize(const std::vector<UtilityReport>& reports);

std::string format_report(const PipelineConfig& config, const PipelineResult& result);
std::string format_records(const PipelineResult& result);
std::string format_ledger(const PipelineResult& result);

}  // namespace trajldp

#endif  // TRAJLDP_PIPELINE_HPP_
