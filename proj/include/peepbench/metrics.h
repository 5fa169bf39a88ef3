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

// The four evaluation metrics (BLEU, exact match, syntactic accuracy and IO
// accuracy) and their aggregation.

#ifndef PEEPBENCH_METRICS_H_
#define PEEPBENCH_METRICS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "peepbench/equivalence.h"

namespace peepbench {

// Stamped into every report so scores stay comparable across runs.
inline constexpr std::string_view kBleuConfig = "bleu-a4-uniform";

// Whitespace split plus "," "[" "]" "#" ":" as standalone tokens.
std::vector<std::string> bleu_tokens(std::string_view text);

// Canonical text: parse+print when the text parses, otherwise the raw lines
// with trailing whitespace trimmed.
std::string canonical_text(std::string_view text);

// Sentence BLEU over bleu_tokens. Both sides are canonicalized first when
// both parse. Max n-gram order is min(4, candidate length) with uniform
// weights; clipped precisions; brevity penalty exp(1 - r/c) when c < r. A
// zero precision of order n >= 2 is add-one smoothed; a zero unigram
// precision yields 0.
double bleu(std::string_view candidate, std::string_view reference);

// 1 iff the canonical forms match (an empty candidate never matches).
int emr(std::string_view candidate, std::string_view reference);

enum class IoOutcome : uint8_t { kFail, kPass, kUncheckable };

std::string_view io_outcome_name(IoOutcome o);

struct SampleMetrics {
  double bleu = 0.0;
  int emr = 0;
  int syntactic = 0;
  IoOutcome io = IoOutcome::kFail;
  std::string io_detail;
};

// Scores `candidate` against the reference-optimized block text.
SampleMetrics evaluate_sample(std::string_view reference, std::string_view candidate,
                              int trials = kDefaultTrials, uint64_t seed = kDefaultSeed);

struct MetricsSummary {
  int n = 0;
  double bleu = 0.0;
  double emr = 0.0;
  double syntactic = 0.0;
  double io = 0.0;  // over checkable samples; 0 when none are checkable
  int io_checkable = 0;
  int io_uncheckable = 0;
};

class EmptyInputError : public std::invalid_argument {
 public:
  EmptyInputError() : std::invalid_argument("aggregate: no records") {}
};

MetricsSummary aggregate(const std::vector<SampleMetrics>& records);

}  // namespace peepbench

#endif  // PEEPBENCH_METRICS_H_
