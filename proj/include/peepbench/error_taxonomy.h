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

// Instruction-level error classification of candidate blocks against their
// references, and per-mnemonic error probabilities with normal-approximation
// confidence intervals.

#ifndef PEEPBENCH_ERROR_TAXONOMY_H_
#define PEEPBENCH_ERROR_TAXONOMY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "peepbench/asm.h"

namespace peepbench {

enum class ErrorCategory : uint8_t { kOpcode, kRegister, kImmediateValue, kLabel };

std::string_view error_category_name(ErrorCategory c);

// One aligned row: indices into the candidate / reference instruction lists;
// a missing side is an insertion or deletion.
struct AlignedPair {
  std::optional<int> candidate;
  std::optional<int> reference;
};

struct Alignment {
  std::vector<AlignedPair> pairs;
  double cost = 0.0;
};

inline constexpr double kGapCost = 0.6;

// Sequence alignment over instructions. Substitution cost is 1 - Jaccard of
// the lines' token sets; insertion/deletion cost kGapCost. Ties prefer
// substitution.
Alignment align_instructions(const BasicBlock& candidate, const BasicBlock& reference);

struct ErrorRecord {
  ErrorCategory category = ErrorCategory::kOpcode;
  std::string candidate_line;
  std::string reference_line;
  std::string token;               // offending candidate token
  std::string reference_mnemonic;  // keys the per-mnemonic statistics
  int reference_index = -1;
  std::string sample_id;  // set by callers aggregating over a dataset
};

// Every differing substituted pair is classified in order: Opcode (mnemonic
// differs or is unknown; no further categories for that line), then at most
// one Register, one ImmediateValue and one Label record.
std::vector<ErrorRecord> classify_errors(const BasicBlock& candidate, const BasicBlock& reference);

// Per-category counts over a record list.
std::map<ErrorCategory, long> category_counts(const std::vector<ErrorRecord>& records);

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kZ95 = 1.96;

struct Interval {
  double p = 0.0;
  double halfwidth = 0.0;
};

// p = errors/total, halfwidth = z * sqrt(p(1-p)/total). Throws DomainError
// when total == 0 or errors is outside [0, total].
Interval confidence_interval(long errors, long total, double z = kZ95);

struct MnemonicErrorStat {
  std::string mnemonic;
  long error_count = 0;
  long total_count = 0;
  double error_prob = 0.0;
  double conf = 0.0;
};

inline constexpr long kDefaultMinSamples = 50;

// Keeps mnemonics with total_count > min_samples; sorted by error_prob
// descending, then mnemonic ascending.
std::vector<MnemonicErrorStat> per_mnemonic_error_stats(
    const std::map<std::string, long>& error_counts,
    const std::map<std::string, long>& total_counts, long min_samples = kDefaultMinSamples);

// Error counts taken from records: one error per distinct erroneous reference
// line (sample_id, reference_index), keyed by the reference mnemonic.
std::vector<MnemonicErrorStat> per_mnemonic_error_stats(
    const std::vector<ErrorRecord>& records, const std::map<std::string, long>& total_counts,
    long min_samples = kDefaultMinSamples);

// The k most error-prone and k least error-prone rows.
std::vector<MnemonicErrorStat> top_k(const std::vector<MnemonicErrorStat>& stats, size_t k);
std::vector<MnemonicErrorStat> bottom_k(const std::vector<MnemonicErrorStat>& stats, size_t k);

std::string stats_to_csv(const std::vector<MnemonicErrorStat>& stats);
std::string stats_to_table(const std::vector<MnemonicErrorStat>& stats);

}  // namespace peepbench

#endif  // PEEPBENCH_ERROR_TAXONOMY_H_
