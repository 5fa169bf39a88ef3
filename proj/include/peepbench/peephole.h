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

// Reference rule-based peephole optimizer over a single basic block.
//
// Rules are grouped in six categories and tried in a fixed priority order:
// constant folding > algebraic laws > strength reduction > null sequences >
// combine operations > address-mode operations. One pass scans instruction
// positions left to right and applies at most one rule per position;
// optimize() iterates passes to a fixpoint (capped).
//
// Liveness is block-local. A block ending in ret keeps x0, the callee-saved
// registers x19..x30, sp and the destination of its last register-defining
// instruction live; any other block keeps every register and NZCV live.

#ifndef PEEPBENCH_PEEPHOLE_H_
#define PEEPBENCH_PEEPHOLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "peepbench/asm.h"

namespace peepbench {

enum class RuleCategory : uint8_t {
  kConstantFolding,
  kAlgebraicLaws,
  kStrengthReduction,
  kNullSequences,
  kCombineOperations,
  kAddressModeOperations,
};

std::string_view category_name(RuleCategory c);

inline constexpr int kIterationCap = 32;

struct TraceStep {
  std::string rule;
  RuleCategory category = RuleCategory::kConstantFolding;
  std::string before;  // affected lines of the input window
  std::string after;   // their replacement ("" when deleted)
  int iteration = 0;
};

struct OptimizationTrace {
  std::vector<TraceStep> applied;
  int iterations = 0;
  bool cap_exceeded = false;  // IterationCapExceeded diagnostic
};

struct PassResult {
  BasicBlock block;
  bool changed = false;
  std::vector<TraceStep> steps;
};

struct OptimizeResult {
  BasicBlock block;
  OptimizationTrace trace;
};

struct RuleInfo {
  std::string name;
  RuleCategory category;
};

// Every rule in priority order.
const std::vector<RuleInfo>& rule_inventory();

PassResult apply_rules_once(const BasicBlock& block);

// One pass restricted to a single named rule; for testing rules in
// isolation. Throws std::invalid_argument for an unknown name.
PassResult apply_single_rule(const BasicBlock& block, std::string_view rule);

OptimizeResult optimize(const BasicBlock& block);

std::string trace_to_json(const OptimizationTrace& trace);

}  // namespace peepbench

#endif  // PEEPBENCH_PEEPHOLE_H_
