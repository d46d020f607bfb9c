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

// Command-line front end: generate, gridsize, synthesize, evaluate, attack.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "trajldp/attacks.hpp"
#include "trajldp/corpus_io.hpp"
#include "trajldp/datagen.hpp"
#include "trajldp/errors.hpp"
#include "trajldp/grid.hpp"
#include "trajldp/metrics.hpp"
#include "trajldp/pipeline.hpp"

namespace {

using namespace trajldp;

struct CorpusPair {
  LoadedCorpus real;
  LoadedCorpus syn;
  BoundingBox bbox;
};

CorpusPair load_pair(const std::string& real_path, const std::string& syn_path) {
  CorpusPair p{load_corpus(real_path), load_corpus(syn_path), {}};
  RawCorpus both = p.real.trajectories;
  both.insert(both.end(), p.syn.trajectories.begin(), p.syn.trajectories.end());
  p.bbox = padded_bounds(both);
  return p;
}

CellCorpus discretize_all(const Grid& grid, const RawCorpus& corpus) {
  CellCorpus out;
  out.reserve(corpus.size());
  for (const auto& t : corpus) out.push_back(grid.discretize(t));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory synthesis under local differential privacy"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic input corpus");
  std::string gen_out;
  int gen_n = 6;
  std::size_t gen_size = 1000;
  std::uint64_t gen_seed = 1;
  double gen_mean = 8.0;
  int gen_max = 40;
  double gen_drift = 1.5;
  gen->add_option("--output,-o", gen_out, "corpus file")->required();
  gen->add_option("--n", gen_n, "grid side used for the walks");
  gen->add_option("--size", gen_size, "number of trajectories");
  gen->add_option("--mean_length", gen_mean, "mean trajectory length in cells");
  gen->add_option("--max_length", gen_max, "longest trajectory in cells");
  gen->add_option("--drift", gen_drift, "pull toward the destination");
  gen->add_option("--seed", gen_seed);

  // gridsize
  auto* gs = app.add_subcommand("gridsize", "grid granularity for a corpus");
  std::string gs_input;
  double gs_count = 0, gs_points = 0, gs_ratio = 1.0 / 15.0, gs_eps = 1.0, gs_lambda = 2.5;
  gs->add_option("--input", gs_input, "corpus file to take |T| and mean points from");
  gs->add_option("--trajectories", gs_count, "|T|");
  gs->add_option("--avg_points", gs_points, "mean points per trajectory");
  gs->add_option("--sampling_ratio", gs_ratio);
  gs->add_option("--epsilon", gs_eps);
  gs->add_option("--lambda", gs_lambda);

  // synthesize: one flag per config key, applied over the config file.
  auto* syn = app.add_subcommand("synthesize", "run the full protocol and write artifacts");
  std::string config_path;
  std::map<std::string, std::string> overrides;
  syn->add_option("--config", config_path, "key = value config file");
  for (const std::string& key : trajldp::config_keys()) {
    syn->add_option("--" + key, overrides[key]);
  }

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "utility metrics between two corpora");
  std::string ev_real, ev_syn;
  int ev_grid = 6, ev_queries = 200;
  double ev_fraction = 1.0 / 9.0;
  std::uint64_t ev_seed = 0;
  ev->add_option("--real", ev_real)->required();
  ev->add_option("--synthetic", ev_syn)->required();
  ev->add_option("--grid", ev_grid);
  ev->add_option("--query_count", ev_queries);
  ev->add_option("--query_fraction", ev_fraction);
  ev->add_option("--seed", ev_seed);

  // attack
  auto* at = app.add_subcommand("attack", "resilience sweep over kappa = 2..10");
  std::string at_real, at_syn;
  int at_grid = 6;
  std::size_t at_targets = 200;
  double at_fraction = 0.01;
  at->add_option("--real", at_real)->required();
  at->add_option("--synthetic", at_syn)->required();
  at->add_option("--grid", at_grid);
  at->add_option("--attack_targets", at_targets, "0 attacks every zone-crossing trajectory");
  at->add_option("--outlier_fraction", at_fraction);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GenConfig c = default_gen_config(gen_n, gen_size, gen_seed);
      c.mean_length = gen_mean;
      c.max_length = gen_max;
      c.drift = gen_drift;
      save_corpus(gen_out, generate_corpus(c));
      std::cout << "wrote " << gen_size << " trajectories to " << gen_out << "\n";
    } else if (*gs) {
      if (!gs_input.empty()) {
        const LoadedCorpus c = load_corpus(gs_input);
        std::size_t points = 0;
        for (const auto& t : c.trajectories) points += t.size();
        gs_count = static_cast<double>(c.trajectories.size());
        gs_points = static_cast<double>(points) / gs_count;
      }
      const double raw = granularity_estimate(gs_count, gs_points, gs_ratio, gs_eps, gs_lambda);
      std::printf("estimate=%.6f\ngrid=%d\n", raw,
                  select_granularity(gs_count, gs_points, gs_ratio, gs_eps, gs_lambda));
    } else if (*syn) {
      PipelineConfig config = config_path.empty() ? PipelineConfig{} : load_config(config_path);
      for (const auto& [key, value] : overrides) {
        if (syn->count("--" + key) > 0) set_config_value(config, key, value);
      }
      const PipelineResult r = run_pipeline(config);
      std::printf("grid=%d l_k=%d budget_consumed=%.17g\n", r.grid_n, r.l_k,
                  ledger_total(r.ledger));
      std::cout << to_table(summarize(r.utilities).mean);
      std::cout << "artifacts in " << config.output_dir << "\n";
    } else if (*ev) {
      const CorpusPair p = load_pair(ev_real, ev_syn);
      const Grid grid(p.bbox, ev_grid);
      MetricOptions m;
      m.queries.n_queries = ev_queries;
      m.queries.fraction = ev_fraction;
      m.queries.seed = ev_seed;
      m.hotspot_count = std::min(m.hotspot_count, grid.cell_count());
      const UtilityReport r = evaluate_utility(
          discretize_all(grid, p.real.trajectories), discretize_all(grid, p.syn.trajectories),
          p.real.trajectories, p.syn.trajectories, grid, m);
      std::cout << to_table(r);
    } else if (*at) {
      const CorpusPair p = load_pair(at_real, at_syn);
      const Grid grid(p.bbox, at_grid);
      AttackConfig c;
      c.zone = central_zone(grid);
      c.outlier_fraction = at_fraction;
      RawCorpus targets;
      for (const auto& t : p.real.trajectories) {
        if (at_targets != 0 && targets.size() >= at_targets) break;
        if (!restrict_to_zone(t, grid, c.zone).empty()) targets.push_back(t);
      }
      for (const auto& rec :
           resilience_sweep(p.real.trajectories, p.syn.trajectories, targets, grid, c)) {
        std::printf("%-16s kappa=%-2d ratio=%.6f\n", rec.attack.c_str(), rec.kappa, rec.ratio);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
