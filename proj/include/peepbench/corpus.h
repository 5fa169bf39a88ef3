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

// Dataset construction: pairing basic blocks from non-optimized / optimized
// assembly listings, normalization, seeded sampling, synthetic generation
// and JSONL persistence.

#ifndef PEEPBENCH_CORPUS_H_
#define PEEPBENCH_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace peepbench {

// Version string of the metadata-stripping rules applied by normalize().
// norm-v1 drops every line starting with '.' except .cfi_* directives and
// labels; drops pairs whose non-optimized side has more than the line bound
// of instructions; dedups by content hash.
inline constexpr std::string_view kNormalizationVersion = "norm-v1";
inline constexpr int kMaxBlockLines = 15;

struct SampleSource {
  enum class Kind : uint8_t { kIngested, kSynthetic };
  Kind kind = Kind::kSynthetic;
  std::string file;
  std::string function;
  int block_ordinal = 0;
  uint64_t generator_seed = 0;

  // Grouping key for per-source reports: "synthetic" or the file stem.
  std::string tag() const;
};

struct SamplePair {
  std::string id;
  SampleSource source;
  std::string nonopt;
  std::string opt;
  std::map<std::string, long> histogram;  // mnemonic counts of nonopt
};

// Content hash of (nonopt, opt).
std::string pair_id(std::string_view nonopt, std::string_view opt);

// Builds a pair with id and histogram filled in.
SamplePair make_pair(SampleSource source, std::string nonopt, std::string opt);

struct Manifest {
  std::string created;  // generation recipe, not a wall-clock time
  std::string normalization_version{kNormalizationVersion};
  std::map<std::string, long> counts_per_source;
  std::optional<long> sample_n;
  std::optional<uint64_t> sample_seed;
};

struct Dataset {
  std::vector<SamplePair> pairs;
  Manifest manifest;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnparseableFileError : public CorpusError {
 public:
  UnparseableFileError(std::string file, int line, const std::string& msg)
      : CorpusError(file + ":" + std::to_string(line) + ": " + msg),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

class NotEnoughSamplesError : public CorpusError {
 public:
  using CorpusError::CorpusError;
};

// Pairs blocks by (function symbol, block ordinal). Functions present in
// only one listing or whose block counts differ are skipped; a reason line
// is appended to `log` for each.
std::vector<SamplePair> extract_pairs(std::string_view nonopt_asm, std::string_view opt_asm,
                                      std::string_view file_name = "",
                                      std::vector<std::string>* log = nullptr);

// True for directive lines norm-v1 keeps.
bool kept_directive(std::string_view directive_text);

std::vector<SamplePair> normalize(std::vector<SamplePair> pairs, int max_lines = kMaxBlockLines);

// Seeded uniform sample without replacement. Selection ranks pairs by a
// hash of (seed, id), so it does not depend on input order.
Dataset sample(const Dataset& dataset, size_t n, uint64_t seed);

// Deterministic synthetic blocks from templated patterns; opt side is the
// reference engine's output.
std::vector<SamplePair> synth_blocks(int count, uint64_t seed, int max_len = kMaxBlockLines);

// Mnemonic counts over non-optimized blocks, sorted by count descending then
// mnemonic.
std::vector<std::pair<std::string, long>> corpus_stats(const Dataset& dataset);

// Recomputes manifest.counts_per_source from the pairs.
void refresh_counts(Dataset& dataset);

std::string pair_to_json(const SamplePair& pair);
SamplePair pair_from_json(std::string_view line);
std::string manifest_to_json(const Manifest& manifest);
Manifest manifest_from_json(std::string_view text);

// <path> holds one pair per line; the manifest goes to <path>.manifest.json.
void write_dataset(const std::string& path, const Dataset& dataset);
Dataset read_dataset(const std::string& path);
std::string manifest_path(const std::string& dataset_path);

}  // namespace peepbench

#endif  // PEEPBENCH_CORPUS_H_
