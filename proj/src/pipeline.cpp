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

#include "trajldp/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trajldp/corpus_io.hpp"
#include "trajldp/errors.hpp"
#include "trajldp/parallel.hpp"
#include "trajldp/synthesizer.hpp"

namespace trajldp {

namespace {

// Stage keys below the master seed.
constexpr std::uint64_t kClientKey = 1;
constexpr std::uint64_t kQueryKey = 3;
constexpr std::uint64_t kTargetKey = 4;
constexpr std::uint64_t kSynthesisKey = 100;
constexpr std::uint64_t kRealizeKey = 100000;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("bad value '" + text + "' for " + key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError("bad boolean '" + text + "' for " + key);
}

struct Field {
  std::string name;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

Field string_field(std::string name, std::string PipelineConfig::*member) {
  return {name, [member](PipelineConfig& c, const std::string& v) { c.*member = v; },
          [member](const PipelineConfig& c) { return c.*member; }};
}

Field double_field(std::string name, double PipelineConfig::*member) {
  return {name,
          [name, member](PipelineConfig& c, const std::string& v) {
            c.*member = parse_value<double>(name, v);
          },
          [member](const PipelineConfig& c) { return format_double(c.*member); }};
}

template <typename T>
Field integer_field(std::string name, T PipelineConfig::*member) {
  return {name,
          [name, member](PipelineConfig& c, const std::string& v) {
            c.*member = parse_value<T>(name, v);
          },
          [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
}

Field bool_field(std::string name, bool PipelineConfig::*member) {
  return {name,
          [name, member](PipelineConfig& c, const std::string& v) {
            c.*member = parse_bool(name, v);
          },
          [member](const PipelineConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      string_field("input", &PipelineConfig::input),
      string_field("output_dir", &PipelineConfig::output_dir),
      double_field("epsilon", &PipelineConfig::epsilon),
      double_field("k", &PipelineConfig::k),
      double_field("alpha", &PipelineConfig::alpha),
      double_field("beta", &PipelineConfig::beta),
      double_field("lambda", &PipelineConfig::lambda),
      // "auto" is the same as 0.
      {"grid",
       [](PipelineConfig& c, const std::string& v) {
         c.grid = v == "auto" ? 0 : parse_value<int>("grid", v);
       },
       [](const PipelineConfig& c) { return c.grid == 0 ? std::string("auto") : std::to_string(c.grid); }},
      double_field("sampling_ratio", &PipelineConfig::sampling_ratio),
      integer_field("seed", &PipelineConfig::seed),
      integer_field("repetitions", &PipelineConfig::repetitions),
      integer_field("query_count", &PipelineConfig::query_count),
      double_field("query_fraction", &PipelineConfig::query_fraction),
      bool_field("density", &PipelineConfig::density),
      bool_field("query", &PipelineConfig::query),
      bool_field("hotspot", &PipelineConfig::hotspot),
      bool_field("kendall", &PipelineConfig::kendall),
      bool_field("trip", &PipelineConfig::trip),
      bool_field("length", &PipelineConfig::length),
      bool_field("diameter", &PipelineConfig::diameter),
      bool_field("pattern", &PipelineConfig::pattern),
      bool_field("reidentification", &PipelineConfig::reidentification),
      bool_field("outlier", &PipelineConfig::outlier),
      integer_field("attack_targets", &PipelineConfig::attack_targets),
      double_field("outlier_fraction", &PipelineConfig::outlier_fraction),
      bool_field("write_reports", &PipelineConfig::write_reports),
  };
  return kFields;
}

const Field& find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.name == key) return f;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Per-chunk buffers merged in chunk order, so totals and the report stream do
// not depend on the worker count.
template <typename Inbox, typename MakeInbox, typename Visit, typename Merge>
Inbox collect(std::size_t n_users, MakeInbox make, Visit visit, Merge merge, std::ostream* sink) {
  const std::size_t slots = worker_count();
  std::vector<Inbox> partial;
  partial.reserve(slots);
  for (std::size_t i = 0; i < slots; ++i) partial.push_back(make());
  std::vector<std::ostringstream> streams(slots);
  const std::size_t used = parallel_chunks(n_users, [&](std::size_t c, std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) visit(partial[c], u, sink ? &streams[c] : nullptr);
  });
  Inbox total = make();
  for (std::size_t c = 0; c < used; ++c) {
    merge(total, partial[c]);
    if (sink) *sink << streams[c].str();
  }
  return total;
}

std::vector<std::size_t> attack_targets(const RawCorpus& real, const Grid& grid,
                                        const std::vector<CellId>& zone, std::size_t limit,
                                        Rng rng) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (!restrict_to_zone(real[i], grid, zone).empty()) idx.push_back(i);
  }
  if (limit > 0 && idx.size() > limit) {
    rng.shuffle(idx);
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be a positive finite number, got " + format_double(epsilon));
  }
  if (!(k > 0.0 && k <= 1.0)) throw ConfigError("k must lie in (0, 1]");
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ConfigError("alpha and beta must be non-negative");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (grid < 0) throw ConfigError("grid must be positive or auto");
  if (!(sampling_ratio > 0.0 && sampling_ratio <= 1.0)) {
    throw ConfigError("sampling_ratio must lie in (0, 1]");
  }
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (query_count < 1) throw ConfigError("query_count must be at least 1");
  if (!(query_fraction > 0.0 && query_fraction <= 1.0)) {
    throw ConfigError("query_fraction must lie in (0, 1]");
  }
  if (!(outlier_fraction > 0.0 && outlier_fraction <= 1.0)) {
    throw ConfigError("outlier_fraction must lie in (0, 1]");
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> keys;
    for (const Field& f : fields()) keys.push_back(f.name);
    return keys;
  }();
  return kKeys;
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
  find_field(key).set(config, value);
}

std::string get_config_value(const PipelineConfig& config, const std::string& key) {
  return find_field(key).get(config);
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    find_field(key);
    out[key] = value;
  }
  return out;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  PipelineConfig config;
  for (const auto& [key, value] : parse_config(in)) set_config_value(config, key, value);
  return config;
}

MetricOptions metric_options(const PipelineConfig& config, std::uint64_t query_seed,
                             int cell_count) {
  MetricOptions m;
  m.density = config.density;
  m.query = config.query;
  m.hotspot = config.hotspot;
  m.kendall = config.kendall;
  m.trip = config.trip;
  m.length = config.length;
  m.diameter = config.diameter;
  m.pattern = config.pattern;
  m.queries.n_queries = config.query_count;
  m.queries.fraction = config.query_fraction;
  m.queries.seed = query_seed;
  m.hotspot_count = std::min(m.hotspot_count, cell_count);
  return m;
}

RoundOneInbox simulate_round_one(const std::vector<CellTrajectory>& users, const Grid& grid,
                                 double eps_length, const Rng& clients, std::ostream* sink) {
  const auto cells = static_cast<std::size_t>(grid.cell_count());
  return collect<RoundOneInbox>(
      users.size(), [&] { return RoundOneInbox{FrequencyAccumulator(cells)}; },
      [&](RoundOneInbox& inbox, std::size_t u, std::ostream* out) {
        const Report r = report_length(users[u], cells, eps_length, clients.derive(u));
        if (out) write_report(*out, ReportDomain::kLength, r);
        inbox.lengths.add(r);
      },
      [](RoundOneInbox& total, const RoundOneInbox& part) { total.lengths.merge(part.lengths); },
      sink);
}

RoundTwoInbox simulate_round_two(const std::vector<CellTrajectory>& users,
                                 const TransitionDomain& domain, const PrivacyBudget& budget,
                                 const Rng& clients, std::ostream* sink) {
  return collect<RoundTwoInbox>(
      users.size(),
      [&] {
        return RoundTwoInbox{FrequencyAccumulator(domain.intra_size()),
                             FrequencyAccumulator(domain.endpoint_size()),
                             FrequencyAccumulator(domain.endpoint_size())};
      },
      [&](RoundTwoInbox& inbox, std::size_t u, std::ostream* out) {
        const RoundTwoReports r = report_round_two(users[u], domain, budget, clients.derive(u));
        for (const Report& t : r.transitions) {
          if (out) write_report(*out, ReportDomain::kTransition, t);
          inbox.transitions.add(t);
        }
        if (out) {
          write_report(*out, ReportDomain::kBegin, r.begin);
          write_report(*out, ReportDomain::kEnd, r.end);
        }
        inbox.begins.add(r.begin);
        inbox.ends.add(r.end);
      },
      [](RoundTwoInbox& total, const RoundTwoInbox& part) {
        total.transitions.merge(part.transitions);
        total.begins.merge(part.begins);
        total.ends.merge(part.ends);
      },
      sink);
}

RoundOneResult curate_round_one(const RoundOneInbox& inbox, double epsilon, double k) {
  if (inbox.lengths.report_count() == 0) throw ProtocolError("no length reports received");
  RoundOneResult out;
  out.lengths = estimate_length_distribution(inbox.lengths.finalize());
  out.l_k = length_quantile(out.lengths, k);
  out.budget = plan_budget(epsilon, out.l_k);
  return out;
}

MobilityModel curate_round_two(const RoundTwoInbox& inbox, const TransitionDomain& domain) {
  return build_mobility_model(inbox.transitions.finalize(), inbox.begins.finalize(),
                              inbox.ends.finalize(), domain);
}

std::vector<LedgerEntry> privacy_ledger(const PrivacyBudget& budget) {
  return {{"round1.length", budget.eps_length},
          {"round2.transitions", budget.per_transition * budget.transition_cap},
          {"round2.begin", budget.per_transition},
          {"round2.end", budget.per_transition}};
}

double ledger_total(const std::vector<LedgerEntry>& ledger) {
  double total = 0.0;
  for (const auto& e : ledger) total += e.epsilon;
  return total;
}

int choose_grid(const RawCorpus& corpus, const PipelineConfig& config) {
  if (config.grid > 0) return config.grid;
  if (corpus.empty()) throw DomainError("cannot size a grid for an empty corpus");
  std::size_t points = 0;
  for (const auto& t : corpus) points += t.size();
  const double n = static_cast<double>(corpus.size());
  return select_granularity(n, static_cast<double>(points) / n, config.sampling_ratio,
                            config.epsilon, config.lambda);
}

PipelineResult run_protocol(const RawCorpus& corpus, const BoundingBox& bbox,
                            const PipelineConfig& config, std::ostream* report_sink) {
  config.validate();
  if (corpus.empty()) throw DomainError("input corpus is empty");
  PipelineResult result;
  result.bbox = bbox;
  result.grid_n = choose_grid(corpus, config);
  const Grid grid(bbox, result.grid_n);

  std::vector<CellTrajectory> cells(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { cells[i] = grid.discretize(corpus[i]); });

  const Rng master(config.seed);
  const Rng clients = master.derive(kClientKey);

  const RoundOneInbox inbox1 =
      simulate_round_one(cells, grid, length_budget(config.epsilon), clients, report_sink);
  const RoundOneResult round1 = curate_round_one(inbox1, config.epsilon, config.k);
  result.lengths = round1.lengths;
  result.l_k = round1.l_k;
  result.budget = round1.budget;
  result.ledger = privacy_ledger(round1.budget);

  const TransitionDomain domain(grid);
  const RoundTwoInbox inbox2 = simulate_round_two(cells, domain, round1.budget, clients, report_sink);
  result.model.emplace(curate_round_two(inbox2, domain));

  const MetricOptions metrics =
      metric_options(config, master.derive(kQueryKey).next_u64(), grid.cell_count());
  AttackConfig attack;
  attack.zone = central_zone(grid);
  attack.outlier_fraction = config.outlier_fraction;
  RawCorpus targets;
  if (config.reidentification) {
    for (const std::size_t i : attack_targets(corpus, grid, attack.zone, config.attack_targets,
                                              master.derive(kTargetKey))) {
      targets.push_back(corpus[i]);
    }
  }

  for (int rep = 0; rep < config.repetitions; ++rep) {
    SynthesisConfig synth;
    synth.alpha = config.alpha;
    synth.beta = config.beta;
    synth.target_count = corpus.size();
    synth.seed = master.derive(kSynthesisKey + static_cast<std::uint64_t>(rep)).next_u64();
    const std::vector<CellTrajectory> syn_cells =
        synthesize_dataset(result.lengths, *result.model, synth);
    RawCorpus syn = realize_all(
        grid, syn_cells, master.derive(kRealizeKey + static_cast<std::uint64_t>(rep)).next_u64());

    result.utilities.push_back(evaluate_utility(cells, syn_cells, corpus, syn, grid, metrics));

    std::vector<ResilienceRecord> records;
    if (config.reidentification) {
      const auto counts = reidentification_match_counts(syn, targets, grid, attack);
      for (int kappa = 2; kappa <= 10; ++kappa) {
        records.push_back({"reidentification", kappa, resilience_ratio(counts, kappa)});
      }
    }
    if (config.outlier) {
      const auto counts = outlier_match_counts(corpus, syn, attack);
      for (int kappa = 2; kappa <= 10; ++kappa) {
        records.push_back({"outlier", kappa, resilience_ratio(counts, kappa)});
      }
    }
    result.resilience.push_back(std::move(records));
    result.synthetic.push_back(std::move(syn));
  }
  return result;
}

UtilitySummary summarize(const std::vector<UtilityReport>& reports) {
  if (reports.empty()) throw DomainError("nothing to summarize");
  const std::size_t n_fields = utility_fields().size();
  std::vector<double> mean(n_fields, 0.0);
  std::vector<double> var(n_fields, 0.0);
  for (const auto& r : reports) {
    const auto v = utility_values(r);
    for (std::size_t f = 0; f < n_fields; ++f) mean[f] += v[f];
  }
  for (auto& m : mean) m /= static_cast<double>(reports.size());
  for (const auto& r : reports) {
    const auto v = utility_values(r);
    for (std::size_t f = 0; f < n_fields; ++f) var[f] += (v[f] - mean[f]) * (v[f] - mean[f]);
  }
  // A single run has no spread to report.
  for (auto& s : var) {
    s = reports.size() > 1 ? std::sqrt(s / static_cast<double>(reports.size() - 1)) : 0.0;
  }
  return {utility_from_values(mean), utility_from_values(var)};
}

std::string format_ledger(const PipelineResult& result) {
  std::string out;
  for (const auto& e : result.ledger) out += e.stage + "=" + format_double(e.epsilon) + "\n";
  out += "total=" + format_double(ledger_total(result.ledger)) + "\n";
  out += "epsilon=" + format_double(result.budget.eps_total) + "\n";
  return out;
}

std::string format_report(const PipelineConfig& config, const PipelineResult& result) {
  std::ostringstream out;
  for (const std::string& key : config_keys()) {
    if (key == "input" || key == "output_dir") continue;
    out << "config." << key << "=" << get_config_value(config, key) << "\n";
  }
  const BoundingBox& b = result.bbox;
  out << "grid=" << result.grid_n << "\n"
      << "bbox=" << format_double(b.min_x) << "," << format_double(b.min_y) << ","
      << format_double(b.max_x) << "," << format_double(b.max_y) << "\n"
      << "l_k=" << result.l_k << "\n"
      << "eps_length=" << format_double(result.budget.eps_length) << "\n"
      << "per_transition=" << format_double(result.budget.per_transition) << "\n"
      << "budget_consumed=" << format_double(ledger_total(result.ledger)) << "\n";

  for (std::size_t rep = 0; rep < result.utilities.size(); ++rep) {
    out << "\nrepetition=" << rep << " " << to_record(result.utilities[rep]) << "\n";
    out << to_table(result.utilities[rep]);
    for (const auto& r : result.resilience[rep]) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "resilience %-16s kappa=%-2d ratio=%.6f\n", r.attack.c_str(),
                    r.kappa, r.ratio);
      out << buf;
    }
  }

  const UtilitySummary s = summarize(result.utilities);
  const auto mean = utility_values(s.mean);
  const auto sd = utility_values(s.stddev);
  out << "\nsummary over " << result.utilities.size() << " repetition(s)\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-20s %12s %12s\n", "metric", "mean", "stddev");
  out << buf;
  for (std::size_t f = 0; f < mean.size(); ++f) {
    std::snprintf(buf, sizeof(buf), "%-20s %12.6f %12.6f\n", utility_fields()[f].c_str(), mean[f],
                  sd[f]);
    out << buf;
  }
  return out.str();
}

std::string format_records(const PipelineResult& result) {
  using nlohmann::json;
  std::string out;
  json run = {{"type", "run"},         {"grid", result.grid_n},
              {"l_k", result.l_k},     {"epsilon", result.budget.eps_total},
              {"eps_length", result.budget.eps_length},
              {"per_transition", result.budget.per_transition},
              {"budget_consumed", ledger_total(result.ledger)}};
  out += run.dump() + "\n";
  for (std::size_t rep = 0; rep < result.utilities.size(); ++rep) {
    json u = {{"type", "utility"}, {"repetition", rep}};
    const auto values = utility_values(result.utilities[rep]);
    for (std::size_t f = 0; f < values.size(); ++f) u[utility_fields()[f]] = values[f];
    out += u.dump() + "\n";
    for (const auto& r : result.resilience[rep]) {
      json j = {{"type", "resilience"}, {"repetition", rep}, {"attack", r.attack},
                {"kappa", r.kappa},     {"ratio", r.ratio}};
      out += j.dump() + "\n";
    }
  }
  const UtilitySummary s = summarize(result.utilities);
  for (const auto& [name, report] : {std::pair{"mean", s.mean}, std::pair{"stddev", s.stddev}}) {
    json j = {{"type", "summary"}, {"statistic", name}};
    const auto values = utility_values(report);
    for (std::size_t f = 0; f < values.size(); ++f) j[utility_fields()[f]] = values[f];
    out += j.dump() + "\n";
  }
  return out;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  if (config.input.empty()) throw ConfigError("no input corpus given");
  const LoadedCorpus loaded = load_corpus(config.input);

  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  auto write_file = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
  };

  std::ofstream reports;
  if (config.write_reports) {
    reports.open(dir / "reports.bin", std::ios::binary);
    if (!reports) throw ConfigError("cannot write " + (dir / "reports.bin").string());
  }
  PipelineResult result = run_protocol(loaded.trajectories, loaded.bbox, config,
                                       config.write_reports ? &reports : nullptr);

  for (std::size_t rep = 0; rep < result.synthetic.size(); ++rep) {
    save_corpus((dir / ("synthetic_" + std::to_string(rep) + ".txt")).string(),
                result.synthetic[rep]);
  }
  std::ostringstream model;
  write_model(model, *result.model);
  write_file("model.txt", model.str());
  write_file("report.txt", format_report(config, result));
  write_file("records.jsonl", format_records(result));
  write_file("privacy_ledger.txt", format_ledger(result));
  return result;
}

}  // namespace trajldp
