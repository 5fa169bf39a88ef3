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

#include "peepbench/equivalence.h"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "peepbench/hashing.h"

namespace peepbench {
namespace {

// "sub sp, sp, #k" / "add sp, sp, #k" with a plain positive immediate.
std::optional<int64_t> sp_adjust(const Instruction& inst, const char* mnemonic) {
  if (inst.mnemonic != mnemonic || inst.operands.size() != 3) return std::nullopt;
  const auto* d = std::get_if<Register>(&inst.operands[0]);
  const auto* n = std::get_if<Register>(&inst.operands[1]);
  const auto* i = std::get_if<Imm>(&inst.operands[2]);
  if (!d || !n || !i || !d->is_sp() || !n->is_sp() || i->value <= 0) return std::nullopt;
  return i->value << i->lsl;
}

std::string hex(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::string describe(const TerminatorOutcome& t) {
  std::string s(outcome_name(t.kind));
  if (!t.target.empty()) s += "(" + t.target + ")";
  return s;
}

std::string describe(const std::vector<StoreRecord>& stores) {
  std::string s = "[";
  for (size_t i = 0; i < stores.size(); ++i) {
    if (i) s += ", ";
    s += hex(stores[i].address) + "/" + std::to_string(stores[i].width) + "=" +
         hex(stores[i].value);
  }
  return s + "]";
}

std::string trap_reason(const Trap& t) {
  switch (t.kind) {
    case TrapKind::kUnsupportedInstruction: return "UnsupportedInstruction(" + t.detail + ")";
    case TrapKind::kMisaligned: return "Misaligned(" + t.detail + ")";
    case TrapKind::kUnresolvedSymbol: return "UnresolvedSymbol(" + t.detail + ")";
  }
  return "trap";
}

std::optional<std::string> static_uncheckable(const BasicBlock& block) {
  for (const Instruction* inst : block.instructions()) {
    if (inst->mnemonic == "bl" || inst->mnemonic == "blr") return std::string("CalledExternal");
  }
  return std::nullopt;
}

}  // namespace

std::optional<int64_t> own_frame_size(const BasicBlock& block) {
  std::vector<const Instruction*> insts = block.instructions();
  if (block.terminator().kind != TerminatorKind::kNone && !insts.empty()) insts.pop_back();
  if (insts.size() < 2) return std::nullopt;
  auto k = sp_adjust(*insts.front(), "sub");
  auto k2 = sp_adjust(*insts.back(), "add");
  if (!k || !k2 || *k != *k2) return std::nullopt;
  return k;
}

EffectSet observable_effects(const ExecutionResult& result, const BasicBlock& block,
                             uint64_t initial_sp) {
  EffectSet e;
  e.x0 = result.final.x[0];
  e.terminator = result.terminator;
  const int64_t frame = own_frame_size(block).value_or(0);
  const uint64_t lo = initial_sp - static_cast<uint64_t>(frame);
  for (const StoreRecord& s : result.stores) {
    bool inside = frame > 0 && s.address >= lo &&
                  s.address <= initial_sp - static_cast<uint64_t>(s.width);
    if (!inside) e.stores.push_back(s);
  }
  std::sort(e.stores.begin(), e.stores.end());
  return e;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kEquivalent: return "Equivalent";
    case Verdict::kDivergent: return "Divergent";
    case Verdict::kUncheckable: return "Uncheckable";
  }
  return "?";
}

EquivalenceVerdict io_equivalent(const BasicBlock& a, const BasicBlock& b, int trials,
                                 uint64_t seed) {
  EquivalenceVerdict out;
  for (const BasicBlock* blk : {&a, &b}) {
    if (auto why = static_uncheckable(*blk)) {
      out.verdict = Verdict::kUncheckable;
      out.detail = *why;
      return out;
    }
  }
  for (int i = 0; i < std::max(trials, 1); ++i) {
    const uint64_t trial_seed = mix_seed(seed, static_cast<uint64_t>(i));
    const MachineState init = init_state(trial_seed);
    ExecutionResult ra = run_block(init, a);
    ExecutionResult rb = run_block(init, b);
    for (const ExecutionResult* r : {&ra, &rb}) {
      if (r->trap) {
        out.verdict = Verdict::kUncheckable;
        out.detail = trap_reason(*r->trap);
        return out;
      }
      if (r->terminator.kind == Outcome::kCalledExternal) {
        out.verdict = Verdict::kUncheckable;
        out.detail = "CalledExternal";
        return out;
      }
    }
    EffectSet ea = observable_effects(ra, a);
    EffectSet eb = observable_effects(rb, b);
    if (ea == eb) continue;
    Witness w{i, trial_seed, init, ""};
    if (ea.x0 != eb.x0) {
      w.mismatched_effect = "x0";
      out.detail = "x0: " + hex(ea.x0) + " vs " + hex(eb.x0);
    } else if (!(ea.terminator == eb.terminator)) {
      w.mismatched_effect = "terminator";
      out.detail = "terminator: " + describe(ea.terminator) + " vs " + describe(eb.terminator);
    } else {
      w.mismatched_effect = "stores";
      out.detail = "stores: " + describe(ea.stores) + " vs " + describe(eb.stores);
    }
    out.verdict = Verdict::kDivergent;
    out.witness = std::move(w);
    return out;
  }
  return out;
}

std::string witness_to_json(const Witness& w) {
  nlohmann::ordered_json j;
  j["trial"] = w.trial;
  j["seed"] = w.seed;
  nlohmann::ordered_json regs;
  for (int i = 0; i < 31; ++i) regs["x" + std::to_string(i)] = hex(w.state.x[i]);
  regs["sp"] = hex(w.state.sp);
  j["registers"] = regs;
  j["mismatched_effect"] = w.mismatched_effect;
  return j.dump();
}

}  // namespace peepbench
