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

// Randomized differential IO-equivalence of two basic blocks.
//
// Two blocks are equivalent when, from the same seeded initial states, they
// agree on the observable effects: the final x0, how the block terminates and
// the multiset of stores that land outside the block's own stack frame.

#ifndef PEEPBENCH_EQUIVALENCE_H_
#define PEEPBENCH_EQUIVALENCE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peepbench/asm.h"
#include "peepbench/machine.h"

namespace peepbench {

inline constexpr int kDefaultTrials = 100;
inline constexpr uint64_t kDefaultSeed = 0xC0FFEE;

// Size in bytes of the frame claimed by a leading "sub sp, sp, #k" and
// released by a matching "add sp, sp, #k" as the last non-terminator
// instruction. nullopt when the block has no such pattern.
std::optional<int64_t> own_frame_size(const BasicBlock& block);

struct EffectSet {
  uint64_t x0 = 0;
  TerminatorOutcome terminator;
  std::vector<StoreRecord> stores;  // sorted; a multiset
  friend bool operator==(const EffectSet&, const EffectSet&) = default;
};

// `result` must come from run_block(init, block) with result.trap empty.
EffectSet observable_effects(const ExecutionResult& result, const BasicBlock& block,
                             uint64_t initial_sp = MachineState::kInitialSp);

enum class Verdict : uint8_t { kEquivalent, kDivergent, kUncheckable };

std::string_view verdict_name(Verdict v);

struct Witness {
  int trial = 0;
  uint64_t seed = 0;  // per-trial seed passed to init_state
  MachineState state;
  std::string mismatched_effect;  // "x0", "terminator" or "stores"
};

struct EquivalenceVerdict {
  Verdict verdict = Verdict::kEquivalent;
  std::optional<Witness> witness;  // set iff kDivergent
  std::string detail;              // human-readable reason or mismatch
};

EquivalenceVerdict io_equivalent(const BasicBlock& a, const BasicBlock& b,
                                 int trials = kDefaultTrials, uint64_t seed = kDefaultSeed);

// {trial, seed, registers, mismatched_effect}
std::string witness_to_json(const Witness& w);

}  // namespace peepbench

#endif  // PEEPBENCH_EQUIVALENCE_H_
