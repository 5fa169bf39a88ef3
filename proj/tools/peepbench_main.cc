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

// peepbench command-line driver.
//
//   peepbench extract      --synthetic N | --input DIR  --out data.jsonl
//   peepbench optimize     --dataset D --adapter oracle|replay|remote --out cands.jsonl
//   peepbench evaluate     --dataset D --candidates C --out DIR
//   peepbench errors       --dataset D --candidates C --out DIR
//   peepbench shots-sweep  --dataset D --adapter ... --out sweep.csv
//   peepbench opt          [FILE] [--trace]     optimize one block
//   peepbench validate     [FILE]               validate one block
//   peepbench equiv        A B [--trials N]     IO-equivalence of two blocks
//
// Exit codes: 0 success, 1 internal error, 2 input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "peepbench/asm.h"
#include "peepbench/equivalence.h"
#include "peepbench/harness.h"
#include "peepbench/peephole.h"
#include "peepbench/validate.h"

namespace {

using namespace peepbench;

std::string read_input(const std::string& path) {
  std::ostringstream os;
  if (path.empty() || path == "-") {
    os << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    os << in.rdbuf();
  }
  return os.str();
}

void add_adapter_options(CLI::App* cmd, RunConfig& cfg, std::string& adapter) {
  cmd->add_option("--adapter", adapter, "oracle | replay | remote")
      ->check(CLI::IsMember({"oracle", "replay", "remote"}));
  cmd->add_option("--endpoint", cfg.adapter.endpoint, "chat-completions URL (remote)");
  cmd->add_option("--model", cfg.adapter.model, "model name sent to the endpoint");
  cmd->add_option("--cache", cfg.adapter.cache_dir, "response cache directory");
  cmd->add_option("--api-key-env", cfg.adapter.api_key_env,
                  "environment variable holding the bearer token");
  cmd->add_option("--max-in-flight", cfg.adapter.max_in_flight, "concurrent remote requests");
  cmd->add_option("--rate", cfg.adapter.rate_per_sec, "remote requests per second");
  cmd->add_option("--shots-from", cfg.shots_from, "dataset to draw prompt shots from");
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dataset", cfg.dataset, "dataset JSONL")->required();
  cmd->add_option("--out", cfg.out, "output path")->required();
  cmd->add_option("--seed", cfg.seed, "run seed");
  cmd->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peepbench: peephole-optimization benchmark harness for AArch64 basic blocks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  ExtractOptions ex;
  int synthetic = 0;
  long sample_n = -1;
  auto* extract = app.add_subcommand("extract", "build a dataset");
  extract->add_option("--input", ex.input_dir, "directory of <name>.O0.s / <name>.opt.s pairs");
  extract->add_option("--synthetic", synthetic, "generate N synthetic blocks");
  extract->add_option("--seed", ex.seed, "generator / sampling seed");
  extract->add_option("--max-lines", ex.max_lines, "instruction bound per block");
  extract->add_option("--sample", sample_n, "keep a seeded sample of N pairs");
  extract->add_option("--jobs", ex.jobs, "worker threads")->check(CLI::PositiveNumber);
  extract->add_option("--out", ex.out, "dataset JSONL path")->required();

  RunConfig cfg;
  std::string adapter = "oracle";
  auto* optimize_cmd = app.add_subcommand("optimize", "generate candidates with an adapter");
  add_common_options(optimize_cmd, cfg);
  add_adapter_options(optimize_cmd, cfg, adapter);
  optimize_cmd->add_option("--shots", cfg.shots, "prompt shots (0..8)");

  auto* evaluate = app.add_subcommand("evaluate", "score candidates");
  add_common_options(evaluate, cfg);
  evaluate->add_option("--candidates", cfg.candidates, "candidates JSONL")->required();
  evaluate->add_option("--trials", cfg.trials, "IO-equivalence trials per sample");

  auto* errors = app.add_subcommand("errors", "error taxonomy report");
  add_common_options(errors, cfg);
  errors->add_option("--candidates", cfg.candidates, "candidates JSONL")->required();
  errors->add_option("--min-samples", cfg.min_samples, "keep mnemonics with more samples");
  errors->add_option("--top", cfg.top, "rows in the top/bottom tables");

  auto* sweep = app.add_subcommand("shots-sweep", "EMR/BLEU versus number of prompt shots");
  add_common_options(sweep, cfg);
  add_adapter_options(sweep, cfg, adapter);
  sweep->add_option("--k-min", cfg.k_min, "smallest shot count");
  sweep->add_option("--k-max", cfg.k_max, "largest shot count");
  sweep->add_option("--samples", cfg.sweep_samples, "evaluated sub-sample size");
  sweep->add_option("--trials", cfg.trials, "IO-equivalence trials per sample");

  std::string block_path;
  bool trace = false;
  auto* opt = app.add_subcommand("opt", "optimize one block with the reference engine");
  opt->add_option("file", block_path, "block file (default stdin)");
  opt->add_flag("--trace", trace, "print the rule trace as JSON to stderr");

  auto* validate = app.add_subcommand("validate", "validate one block");
  validate->add_option("file", block_path, "block file (default stdin)");

  std::string path_a, path_b;
  int trials = kDefaultTrials;
  uint64_t seed = kDefaultSeed;
  auto* equiv = app.add_subcommand("equiv", "IO-equivalence of two blocks");
  equiv->add_option("a", path_a, "first block file")->required();
  equiv->add_option("b", path_b, "second block file")->required();
  equiv->add_option("--trials", trials, "random initial states");
  equiv->add_option("--seed", seed, "trial seed");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.adapter.kind = parse_adapter_kind(adapter);
    if (*extract) {
      if (synthetic > 0) ex.synthetic = synthetic;
      if (sample_n >= 0) ex.sample_n = sample_n;
      return cmd_extract(ex, std::cerr);
    }
    if (*optimize_cmd) return cmd_optimize(cfg, std::cerr);
    if (*evaluate) return cmd_evaluate(cfg, std::cout, std::cerr);
    if (*errors) return cmd_errors(cfg, std::cout, std::cerr);
    if (*sweep) return cmd_shots_sweep(cfg, std::cout, std::cerr);
    if (*opt) {
      OptimizeResult r = optimize(parse_block(read_input(block_path)));
      std::cout << print_block(r.block) << "\n";
      if (trace) std::cerr << trace_to_json(r.trace) << "\n";
      return kExitOk;
    }
    if (*validate) {
      ValidationReport report = validate_block(parse_block(read_input(block_path)));
      std::cout << diagnostics_to_jsonl(report);
      return report.valid() ? kExitOk : kExitInput;
    }
    if (*equiv) {
      EquivalenceVerdict v = io_equivalent(parse_block(read_input(path_a)),
                                           parse_block(read_input(path_b)), trials, seed);
      std::cout << verdict_name(v.verdict);
      if (!v.detail.empty()) std::cout << " " << v.detail;
      std::cout << "\n";
      if (v.witness) std::cout << witness_to_json(*v.witness) << "\n";
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
