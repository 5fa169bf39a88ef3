// Copyright 2026 The peepbench Authors
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

// Pipeline commands behind the peepbench CLI: dataset building, candidate
// generation, scoring, error analysis and the shots sweep. Every report
// embeds the run configuration, the dataset manifest hash and the tool
// version, and is byte-identical across runs with equal inputs when the
// adapter is oracle or replay.

#ifndef PEEPBENCH_HARNESS_H_
#define PEEPBENCH_HARNESS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "peepbench/adapter.h"
#include "peepbench/corpus.h"
#include "peepbench/equivalence.h"
#include "peepbench/error_taxonomy.h"
#include "peepbench/metrics.h"

namespace peepbench {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
  std::string dataset;
  std::string candidates;
  std::string shots_from;  // pool for shot selection; empty = dataset
  AdapterConfig adapter;
  int shots = 0;
  int trials = kDefaultTrials;
  uint64_t seed = kDefaultSeed;
  std::string out;
  int jobs = 1;
  long min_samples = kDefaultMinSamples;
  int top = 10;
  // shots sweep
  int k_min = 0;
  int k_max = 5;
  int sweep_samples = 20;
};

std::string run_config_to_json(const RunConfig& config);

struct ExtractOptions {
  std::string input_dir;       // <name>.O0.s / <name>.opt.s pairs
  std::optional<int> synthetic;  // generate N synthetic blocks instead
  uint64_t seed = 7;
  int max_lines = kMaxBlockLines;
  std::optional<long> sample_n;
  int jobs = 1;
  std::string out;
};

struct Candidate {
  std::string id;
  std::string candidate;  // extracted block text; "" when unavailable
  int64_t latency_ms = 0;
  int shots = 0;
  std::string error;
};

std::string candidate_to_json(const Candidate& c);
// Malformed lines are skipped and reported through `log`.
std::vector<Candidate> read_candidates(const std::string& path, std::ostream& log);
void write_candidates(const std::string& path, const std::vector<Candidate>& candidates);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// First k pairs of the seeded ranking over `pool`; the set for k is a prefix
// of the set for k+1.
std::vector<Shot> select_shots(const Dataset& pool, int k, uint64_t seed);

// One adapter call per target; cache misses are collected into `misses`.
std::vector<Candidate> generate_candidates(const std::vector<SamplePair>& targets,
                                           const std::vector<Shot>& shots,
                                           const AdapterConfig& adapter, int jobs,
                                           std::vector<std::string>* misses);

// Scores every pair against its candidate (missing candidates score as
// empty). The IO seed of a sample derives from (seed, sample id).
std::vector<SampleMetrics> score_candidates(const std::vector<SamplePair>& pairs,
                                            const std::map<std::string, std::string>& candidates,
                                            int trials, uint64_t seed, int jobs);

std::string format_summary_table(const std::vector<std::pair<std::string, MetricsSummary>>& rows);

int cmd_extract(const ExtractOptions& options, std::ostream& log);
int cmd_optimize(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_errors(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_shots_sweep(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace peepbench

#endif  // PEEPBENCH_HARNESS_H_
