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

#include "peepbench/peephole.h"

#include <array>
#include <bit>
#include <bitset>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "peepbench/equivalence.h"
#include "peepbench/machine.h"
#include "peepbench/validate.h"

namespace peepbench {
namespace {

// Slots 0..30 are the general registers, 32 is sp. The zero register is
// never tracked.
using Slots = std::bitset<33>;
constexpr int kSpSlot = Register::kSpSlot;

constexpr uint64_t mask(int width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1);
}

int slot_of(const Register& r) {
  int s = r.slot();
  return (s == Register::kZeroSlot || s == Register::kNoSlot) ? -1 : s;
}

// ---------------------------------------------------------------------------
// Per-instruction facts.

const std::set<std::string, std::less<>>& modeled_mnemonics() {
  static const std::set<std::string, std::less<>> kSet = {
      "nop",   "mov",    "movz",   "movn",   "movk",   "add",    "adds",   "sub",
      "subs",  "cmp",    "cmn",    "tst",    "neg",    "negs",   "mvn",    "and",
      "orr",   "eor",    "bic",    "orn",    "eon",    "ands",   "bics",   "lsl",
      "lsr",   "asr",    "ror",    "mul",    "mneg",   "madd",   "msub",   "udiv",
      "sdiv",  "smull",  "umull",  "smnegl", "umnegl", "smaddl", "umaddl", "smsubl",
      "umsubl", "smulh", "umulh",  "cset",   "csetm",  "csel",   "csinc",  "csinv",
      "csneg", "cinc",   "cinv",   "cneg",   "ccmp",   "ccmn",   "sxtw",   "sxtb",
      "sxth",  "uxtb",   "uxth",   "ubfx",   "sbfx",   "ubfiz",  "sbfiz",  "bfi",
      "bfxil", "extr",   "clz",    "cls",    "rbit",   "rev",    "ldr",    "ldur",
      "ldrb",  "ldurb",  "ldrh",   "ldurh",  "ldrsb",  "ldursb", "ldrsh",  "ldursh",
      "ldrsw", "ldursw", "str",    "stur",   "strb",   "sturb",  "strh",   "sturh",
      "ldp",   "ldpsw",  "stp",    "adrp",   "adr",    "ret",    "b",      "br",
      "cbz",   "cbnz",   "tbz",    "tbnz",
  };
  return kSet;
}

// Pure data-processing mnemonics whose result can be computed from constant
// register inputs.
const std::set<std::string, std::less<>>& evaluable_mnemonics() {
  static const std::set<std::string, std::less<>> kSet = {
      "mov",   "movz",   "movn",   "movk",   "add",    "sub",    "mul",    "mneg",
      "madd",  "msub",   "udiv",   "sdiv",   "and",    "orr",    "eor",    "bic",
      "orn",   "eon",    "lsl",    "lsr",    "asr",    "ror",    "neg",    "mvn",
      "sxtw",  "sxtb",   "sxth",   "uxtb",   "uxth",   "ubfx",   "sbfx",   "ubfiz",
      "sbfiz", "bfi",    "bfxil",  "extr",   "clz",    "cls",    "rbit",   "rev",
      "smull", "umull",  "smnegl", "umnegl", "smaddl", "umaddl", "smsubl", "umsubl",
      "smulh", "umulh",  "adds",   "subs",   "ands",   "bics",   "negs",
  };
  return kSet;
}

bool in(std::string_view m, std::initializer_list<std::string_view> names) {
  for (auto n : names) {
    if (m == n) return true;
  }
  return false;
}

bool is_load_mnemonic(std::string_view m) {
  return in(m, {"ldr", "ldur", "ldrb", "ldurb", "ldrh", "ldurh", "ldrsb", "ldursb", "ldrsh",
                "ldursh", "ldrsw", "ldursw", "ldp", "ldpsw"});
}

bool is_store_mnemonic(std::string_view m) {
  return in(m, {"str", "stur", "strb", "sturb", "strh", "sturh", "stp"});
}

bool writes_flags(std::string_view m) {
  return in(m, {"adds", "subs", "ands", "bics", "negs", "cmp", "cmn", "tst", "ccmp", "ccmn"});
}

bool reads_flags(std::string_view m) {
  return m.rfind("b.", 0) == 0 ||
         in(m, {"cset", "csetm", "csel", "csinc", "csinv", "csneg", "cinc", "cinv", "cneg",
                "ccmp", "ccmn"});
}

// Number of leading operands that are written rather than read.
int def_count(const Instruction& inst) {
  const std::string& m = inst.mnemonic;
  if (is_store_mnemonic(m) || is_terminator_mnemonic(m) ||
      in(m, {"cmp", "cmn", "tst", "ccmp", "ccmn", "nop"})) {
    return 0;
  }
  if (m == "ldp" || m == "ldpsw") return 2;
  return 1;
}

// Destination that is also an input (insert-style instructions).
bool dest_is_read(std::string_view m) { return in(m, {"movk", "bfi", "bfxil"}); }

int access_bytes(const Instruction& inst) {
  const std::string& m = inst.mnemonic;
  const auto* r = std::get_if<Register>(&inst.operands.front());
  int reg_bytes = r ? r->width() / 8 : 8;
  if (in(m, {"ldrb", "ldurb", "ldrsb", "ldursb", "strb", "sturb"})) return 1;
  if (in(m, {"ldrh", "ldurh", "ldrsh", "ldursh", "strh", "sturh"})) return 2;
  if (in(m, {"ldrsw", "ldursw"})) return 4;
  if (m == "ldpsw") return 8;
  if (m == "ldp" || m == "stp") return 2 * reg_bytes;
  return reg_bytes;
}

enum class Site { kPlain, kShifted, kExtended, kMemBase, kMemBaseWriteback, kMemIndex, kDestRead };

// Calls f(reg, site) for every register the instruction reads.
template <class Inst, class F>
void for_each_use(Inst& inst, F&& f) {
  const int defs = def_count(inst);
  const bool dest_read = dest_is_read(inst.mnemonic);
  for (size_t k = 0; k < inst.operands.size(); ++k) {
    auto& op = inst.operands[k];
    const bool def_pos = static_cast<int>(k) < defs;
    if (auto* r = std::get_if<Register>(&op)) {
      if (!def_pos) {
        f(*r, Site::kPlain);
      } else if (dest_read) {
        f(*r, Site::kDestRead);
      }
    } else if (auto* s = std::get_if<ShiftedReg>(&op)) {
      f(s->reg, Site::kShifted);
    } else if (auto* e = std::get_if<ExtendedReg>(&op)) {
      f(e->reg, Site::kExtended);
    } else if (auto* mm = std::get_if<Mem>(&op)) {
      f(mm->base, mm->mode == AddrMode::kOffset ? Site::kMemBase : Site::kMemBaseWriteback);
      if (mm->index) f(mm->index->reg, Site::kMemIndex);
    }
  }
}

bool mentions_fp_or_malformed(const Instruction& inst) {
  for (const Operand& op : inst.operands) {
    if (const auto* r = std::get_if<Register>(&op); r && r->is_fp()) return true;
    if (std::holds_alternative<Malformed>(op) || std::holds_alternative<FpImm>(op)) return true;
  }
  return false;
}

// Instructions the engine reasons about. Everything else is a barrier that
// reads and writes every register, the flags and memory.
bool is_modeled(const Instruction& inst) {
  const std::string& m = inst.mnemonic;
  bool known = modeled_mnemonics().count(m) > 0 ||
               (m.rfind("b.", 0) == 0 && parse_cond(std::string_view(m).substr(2)));
  if (!known || mentions_fp_or_malformed(inst)) return false;
  if (!validate_instruction(inst).empty()) return false;
  const int defs = def_count(inst);
  for (int k = 0; k < defs; ++k) {
    if (!std::holds_alternative<Register>(inst.operands[k])) return false;
  }
  if ((is_load_mnemonic(m) || is_store_mnemonic(m))) {
    bool has_mem = false;
    for (const Operand& op : inst.operands) has_mem |= std::holds_alternative<Mem>(op);
    if (!has_mem) return false;
  }
  return true;
}

struct Info {
  Slots uses;
  Slots defs;
  bool reads_flags = false;
  bool writes_flags = false;
  bool barrier = false;
  bool load = false;
  bool store = false;
  bool terminator = false;
  int bytes = 0;
  const Mem* mem = nullptr;
  bool dest_w = false;  // a 32-bit register destination (zero-extends)
};

Info analyze_instruction(const Instruction& inst) {
  Info f;
  f.terminator = is_terminator_mnemonic(inst.mnemonic);
  if (!is_modeled(inst)) {
    f.barrier = true;
    f.uses.set();
    f.defs.set();
    f.reads_flags = f.writes_flags = f.load = f.store = true;
    return f;
  }
  for_each_use(inst, [&](const Register& r, Site) {
    if (int s = slot_of(r); s >= 0) f.uses.set(s);
  });
  if (inst.mnemonic == "ret" && inst.operands.empty()) f.uses.set(30);
  const int defs = def_count(inst);
  for (int k = 0; k < defs; ++k) {
    const auto& r = std::get<Register>(inst.operands[k]);
    if (int s = slot_of(r); s >= 0) f.defs.set(s);
    if (r.kind == RegKind::kGpr32) f.dest_w = true;
  }
  f.reads_flags = reads_flags(inst.mnemonic);
  f.writes_flags = writes_flags(inst.mnemonic);
  f.load = is_load_mnemonic(inst.mnemonic);
  f.store = is_store_mnemonic(inst.mnemonic);
  if (f.load || f.store) {
    for (const Operand& op : inst.operands) {
      if (const auto* m = std::get_if<Mem>(&op)) f.mem = m;
    }
    f.bytes = access_bytes(inst);
    if (f.mem->mode != AddrMode::kOffset) {
      if (int s = slot_of(f.mem->base); s >= 0) f.defs.set(s);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Block analysis: liveness, constants, sp offsets and frame facts.

struct Env {
  std::array<std::optional<uint64_t>, 33> val{};
  Slots upper_zero;  // bits 63..32 known to be zero
};

struct Analysis {
  std::vector<Instruction> insts;
  std::vector<size_t> item_of;
  std::vector<Info> info;
  std::vector<Slots> live_after;
  std::vector<bool> flags_after;
  std::vector<Env> env_before;
  std::vector<std::optional<int64_t>> sp_before;  // sp minus its entry value
  std::optional<int64_t> frame;
  int frame_add = -1;
  bool frame_rules = false;  // frame exists and sp never escapes
  bool sp_only_frame = false;  // sp is referenced by the frame pair alone
};

std::optional<uint64_t> evaluate(const Instruction& inst, const Info& f, const Env& env) {
  if (f.barrier || f.load || f.store || f.reads_flags || f.defs.count() != 1 || f.defs[kSpSlot]) {
    return std::nullopt;
  }
  if (!evaluable_mnemonics().count(inst.mnemonic)) return std::nullopt;
  for (const Operand& op : inst.operands) {
    if (std::holds_alternative<LabelRef>(op)) return std::nullopt;
  }
  MachineState st;
  for (int s = 0; s < 33; ++s) {
    if (!f.uses[s]) continue;
    if (s == kSpSlot || !env.val[s]) return std::nullopt;
    st.x[s] = *env.val[s];
  }
  ExecutionResult r = run_block(st, BasicBlock({inst}));
  if (r.trap) return std::nullopt;
  for (int s = 0; s < 31; ++s) {
    if (f.defs[s]) return r.final.x[s];
  }
  return std::nullopt;
}

std::optional<int64_t> sp_adjust(const Instruction& inst, const char* mnemonic) {
  if (inst.mnemonic != mnemonic || inst.operands.size() != 3) return std::nullopt;
  const auto* d = std::get_if<Register>(&inst.operands[0]);
  const auto* n = std::get_if<Register>(&inst.operands[1]);
  const auto* i = std::get_if<Imm>(&inst.operands[2]);
  if (!d || !n || !i || !d->is_sp() || !n->is_sp()) return std::nullopt;
  return i->value << i->lsl;
}

// True when sp appears as a data operand (not just as a memory base).
bool sp_as_data(const Instruction& inst) {
  for (const Operand& op : inst.operands) {
    if (const auto* r = std::get_if<Register>(&op); r && r->is_sp()) return true;
    if (const auto* s = std::get_if<ShiftedReg>(&op); s && s->reg.is_sp()) return true;
    if (const auto* e = std::get_if<ExtendedReg>(&op); e && e->reg.is_sp()) return true;
    if (const auto* m = std::get_if<Mem>(&op);
        m && m->base.is_sp() && m->mode != AddrMode::kOffset) {
      return true;
    }
  }
  return false;
}

bool sp_as_base(const Instruction& inst) {
  for (const Operand& op : inst.operands) {
    if (const auto* m = std::get_if<Mem>(&op); m && m->base.is_sp()) return true;
  }
  return false;
}

Analysis analyze(const std::vector<BlockItem>& items) {
  Analysis a;
  for (size_t k = 0; k < items.size(); ++k) {
    if (const auto* inst = std::get_if<Instruction>(&items[k])) {
      a.insts.push_back(*inst);
      a.item_of.push_back(k);
    }
  }
  const int n = static_cast<int>(a.insts.size());
  for (const Instruction& inst : a.insts) a.info.push_back(analyze_instruction(inst));
  // Re-point memory operands at the owned copies.
  for (int j = 0; j < n; ++j) {
    if (a.info[j].mem) {
      for (const Operand& op : a.insts[j].operands) {
        if (const auto* m = std::get_if<Mem>(&op)) a.info[j].mem = m;
      }
    }
  }

  const bool returns = n > 0 && a.insts.back().mnemonic == "ret";
  Slots live;
  bool flags = true;
  if (returns) {
    live.set(0);
    for (int s = 19; s <= 30; ++s) live.set(s);
    live.set(kSpSlot);
    for (int j = n - 1; j >= 0; --j) {
      if (!a.info[j].terminator && a.info[j].defs.any()) {
        live |= a.info[j].defs;
        break;
      }
    }
    flags = false;
  } else {
    live.set();
  }
  a.live_after.resize(n);
  a.flags_after.resize(n);
  for (int j = n - 1; j >= 0; --j) {
    a.live_after[j] = live;
    a.flags_after[j] = flags;
    live = (live & ~a.info[j].defs) | a.info[j].uses;
    if (a.info[j].writes_flags) flags = false;
    if (a.info[j].reads_flags) flags = true;
  }

  Env env;
  std::optional<int64_t> off = 0;
  for (int j = 0; j < n; ++j) {
    a.env_before.push_back(env);
    a.sp_before.push_back(off);
    const Info& f = a.info[j];
    const Instruction& inst = a.insts[j];
    if (f.barrier) {
      env = Env{};
      off.reset();
      continue;
    }
    std::optional<uint64_t> v = evaluate(inst, f, env);
    for (int s = 0; s < 33; ++s) {
      if (!f.defs[s]) continue;
      env.val[s] = v;
      bool writeback_base = f.mem && slot_of(f.mem->base) == s && f.mem->mode != AddrMode::kOffset;
      env.upper_zero[s] = (!writeback_base && f.dest_w) || (v && *v <= 0xFFFFFFFFull);
      if (writeback_base) env.val[s].reset();
    }
    if (f.defs[kSpSlot] && off) {
      if (auto k = sp_adjust(inst, "sub")) {
        off = *off - *k;
      } else if (auto k2 = sp_adjust(inst, "add")) {
        off = *off + *k2;
      } else if (f.mem && f.mem->base.is_sp() && f.mem->mode != AddrMode::kOffset) {
        off = *off + f.mem->disp;
      } else {
        off.reset();
      }
    }
  }

  if (n > 0) {
    std::vector<BlockItem> copy = items;
    a.frame = own_frame_size(BasicBlock(std::move(copy)));
  }
  if (a.frame) {
    a.frame_add = returns || a.info.back().terminator ? n - 2 : n - 1;
    bool escapes = false;
    bool other_base = false;
    for (int j = 0; j < n; ++j) {
      if (j == 0 || j == a.frame_add) continue;
      escapes |= a.info[j].barrier || sp_as_data(a.insts[j]);
      other_base |= sp_as_base(a.insts[j]);
    }
    a.frame_rules = !escapes;
    a.sp_only_frame = !escapes && !other_base;
  }
  return a;
}

bool is_dead(const Analysis& a, int j) {
  const Info& f = a.info[j];
  if (f.barrier || f.store || f.terminator) return false;
  if ((f.defs & a.live_after[j]).any()) return false;
  return !(f.writes_flags && a.flags_after[j]);
}

int last_def(const Analysis& a, int slot, int before) {
  for (int k = before - 1; k >= 0; --k) {
    if (a.info[k].defs[slot]) return k;
  }
  return -1;
}

Slots defs_between(const Analysis& a, int j, int i) {
  Slots s;
  for (int k = j + 1; k < i; ++k) s |= a.info[k].defs;
  return s;
}

Slots uses_between(const Analysis& a, int j, int i) {
  Slots s;
  for (int k = j + 1; k < i; ++k) s |= a.info[k].uses;
  return s;
}

int count_uses(const Instruction& inst, int slot) {
  int c = 0;
  for_each_use(inst, [&](const Register& r, Site) { c += slot_of(r) == slot; });
  return c;
}

// ---------------------------------------------------------------------------
// Operand helpers.

const Register* reg_at(const Instruction& inst, size_t k) {
  return k < inst.operands.size() ? std::get_if<Register>(&inst.operands[k]) : nullptr;
}

// A plain general-purpose register that is neither sp nor a zero register.
const Register* gpr_at(const Instruction& inst, size_t k) {
  const Register* r = reg_at(inst, k);
  return (r && r->is_gpr() && !r->is_sp() && !r->is_zero()) ? r : nullptr;
}

std::optional<uint64_t> value_of(const Operand& op, const Env& env, int width) {
  if (const auto* r = std::get_if<Register>(&op)) {
    if (r->is_zero()) return 0;
    int s = slot_of(*r);
    if (s < 0 || s == kSpSlot || !env.val[s]) return std::nullopt;
    return *env.val[s] & mask(width);
  }
  if (const auto* i = std::get_if<Imm>(&op)) {
    return (static_cast<uint64_t>(i->value) << i->lsl) & mask(width);
  }
  return std::nullopt;
}

std::optional<uint64_t> value_at(const Instruction& inst, size_t k, const Env& env, int width) {
  if (k >= inst.operands.size()) return std::nullopt;
  return value_of(inst.operands[k], env, width);
}

Register zero_reg(int width) { return width == 32 ? Register::wzr() : Register::xzr(); }

Instruction mov_const(const Register& d, uint64_t v) {
  const int w = d.width();
  v &= mask(w);
  if (v == 0) return make_instruction("mov", {d, zero_reg(w)});
  int64_t s = w == 32 ? static_cast<int64_t>(static_cast<int32_t>(static_cast<uint32_t>(v)))
                      : static_cast<int64_t>(v);
  return make_instruction("mov", {d, Imm{s, false, 0}});
}

std::optional<int> log2_exact(uint64_t v) {
  if (v == 0 || (v & (v - 1)) != 0) return std::nullopt;
  return std::countr_zero(v);
}

// Encodable as an AArch64 logical (bitmask) immediate.
bool is_logical_imm(uint64_t v, int width) {
  if (width == 32) {
    v &= 0xFFFFFFFFull;
    v |= v << 32;
  }
  if (v == 0 || v == ~0ull) return false;
  for (int size = 2; size <= 64; size *= 2) {
    const uint64_t m = mask(size);
    const uint64_t elem = v & m;
    bool repeats = true;
    for (int k = size; k < 64; k += size) repeats &= ((v >> k) & m) == elem;
    if (!repeats) continue;
    for (int r = 0; r < size; ++r) {
      uint64_t rot = r == 0 ? elem : (((elem >> r) | (elem << (size - r))) & m);
      if (rot != 0 && rot != m && (rot & (rot + 1)) == 0) return true;
    }
    return false;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Rules.

struct Edit {
  std::map<int, std::optional<Instruction>> changes;  // ordinal -> replacement
  std::vector<size_t> drop_items;                     // non-instruction items
};

struct Ctx {
  const std::vector<BlockItem>& items;
  const Analysis& a;
};

using RuleFn = std::optional<Edit> (*)(const Ctx&, int);

std::vector<BlockItem> apply_edit(const std::vector<BlockItem>& items, const Analysis& a,
                                  const Edit& e) {
  std::map<size_t, int> ordinal_of;
  for (size_t o = 0; o < a.item_of.size(); ++o) ordinal_of[a.item_of[o]] = static_cast<int>(o);
  std::vector<BlockItem> out;
  for (size_t k = 0; k < items.size(); ++k) {
    if (std::find(e.drop_items.begin(), e.drop_items.end(), k) != e.drop_items.end()) continue;
    auto it = ordinal_of.find(k);
    if (it != ordinal_of.end()) {
      auto ch = e.changes.find(it->second);
      if (ch != e.changes.end()) {
        if (!ch->second) continue;
        Instruction repl = *ch->second;
        repl.line = std::get<Instruction>(items[k]).line;
        out.emplace_back(std::move(repl));
        continue;
      }
    }
    out.push_back(items[k]);
  }
  return out;
}

// Adds deletions for candidate instructions that become dead once `e` is
// applied. `e` must only replace instructions, so ordinals stay stable.
Edit delete_newly_dead(const Ctx& c, Edit e, const std::vector<int>& candidates) {
  Analysis after = analyze(apply_edit(c.items, c.a, e));
  for (int j : candidates) {
    if (j >= 0 && !e.changes.count(j) && is_dead(after, j)) e.changes[j] = std::nullopt;
  }
  return e;
}

Edit replace(int pos, Instruction inst) {
  Edit e;
  e.changes[pos] = std::move(inst);
  return e;
}

Edit erase(int pos) {
  Edit e;
  e.changes[pos] = std::nullopt;
  return e;
}

// -- Constant folding -------------------------------------------------------

bool is_constant_move(const Instruction& inst) {
  if (inst.mnemonic == "movz" || inst.mnemonic == "movn") return true;
  if (inst.mnemonic != "mov" || inst.operands.size() != 2) return false;
  if (std::holds_alternative<Imm>(inst.operands[1])) return true;
  const Register* s = reg_at(inst, 1);
  return s && s->is_zero();
}

std::optional<Edit> rule_fold_constant(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  const Info& f = c.a.info[pos];
  if (f.writes_flags || is_constant_move(inst)) return std::nullopt;
  auto v = evaluate(inst, f, c.a.env_before[pos]);
  if (!v) return std::nullopt;
  const Register* d = reg_at(inst, 0);
  if (!d) return std::nullopt;
  std::vector<int> anchors;
  for (int s = 0; s < 33; ++s) {
    if (f.uses[s]) anchors.push_back(last_def(c.a, s, pos));
  }
  return delete_newly_dead(c, replace(pos, mov_const(*d, *v)), anchors);
}

std::optional<Edit> rule_propagate_immediate(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  const Env& env = c.a.env_before[pos];
  const std::string& m = inst.mnemonic;
  Instruction out = inst;
  auto known_reg = [&](size_t k, int width) -> std::optional<uint64_t> {
    const Register* r = gpr_at(inst, k);
    if (!r) return std::nullopt;
    return value_of(*r, env, width);
  };
  if (in(m, {"add", "sub", "adds", "subs"}) && inst.operands.size() == 3) {
    const Register* d = reg_at(inst, 0);
    const int w = d ? d->width() : 64;
    if (auto v = known_reg(2, w); v && *v <= 4095) {
      out.operands[2] = Imm{static_cast<int64_t>(*v), false, 0};
      return replace(pos, out);
    }
    if (in(m, {"add", "adds"}) && gpr_at(inst, 2)) {
      if (auto v = known_reg(1, w); v && *v <= 4095) {
        out.operands[1] = inst.operands[2];
        out.operands[2] = Imm{static_cast<int64_t>(*v), false, 0};
        return replace(pos, out);
      }
    }
    return std::nullopt;
  }
  if (in(m, {"cmp", "cmn"}) && inst.operands.size() == 2) {
    const Register* n = reg_at(inst, 0);
    if (auto v = known_reg(1, n ? n->width() : 64); v && *v <= 4095) {
      out.operands[1] = Imm{static_cast<int64_t>(*v), false, 0};
      return replace(pos, out);
    }
    return std::nullopt;
  }
  if (in(m, {"and", "orr", "eor", "ands", "tst"})) {
    const size_t rhs = m == "tst" ? 1 : 2;
    if (inst.operands.size() != rhs + 1) return std::nullopt;
    const Register* d = reg_at(inst, 0);
    const int w = d ? d->width() : 64;
    auto as_imm = [&](uint64_t v) -> std::optional<Imm> {
      if (!is_logical_imm(v, w) || static_cast<int64_t>(v) < 0) return std::nullopt;
      return Imm{static_cast<int64_t>(v), true, 0};
    };
    if (auto v = known_reg(rhs, w)) {
      if (auto imm = as_imm(*v)) {
        out.operands[rhs] = *imm;
        return replace(pos, out);
      }
    }
    if (gpr_at(inst, rhs)) {
      if (auto v = known_reg(rhs - 1, w)) {
        if (auto imm = as_imm(*v)) {
          out.operands[rhs - 1] = inst.operands[rhs];
          out.operands[rhs] = *imm;
          return replace(pos, out);
        }
      }
    }
    return std::nullopt;
  }
  if (in(m, {"lsl", "lsr", "asr", "ror"}) && inst.operands.size() == 3) {
    const Register* d = reg_at(inst, 0);
    const int w = d ? d->width() : 64;
    if (auto v = known_reg(2, 64)) {
      out.operands[2] = Imm{static_cast<int64_t>(*v % static_cast<uint64_t>(w)), false, 0};
      return replace(pos, out);
    }
  }
  return std::nullopt;
}

// -- Algebraic laws ----------------------------------------------------------

// "mov d, s", or nothing at all when the move cannot change d.
Edit move_or_erase(const Analysis& a, int pos, const Register& d, const Register& s) {
  if (slot_of(d) >= 0 && slot_of(d) == slot_of(s) &&
      (d.kind != RegKind::kGpr32 || a.env_before[pos].upper_zero[slot_of(d)])) {
    return erase(pos);
  }
  return replace(pos, make_instruction("mov", {d, s}));
}

std::optional<Edit> rule_zero_result(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  const std::string& m = inst.mnemonic;
  if (inst.operands.size() != 3) return std::nullopt;
  const Register* d = reg_at(inst, 0);
  if (!d || !d->is_gpr() || d->is_sp() || d->is_zero()) return std::nullopt;
  const int w = d->width();
  const Env& env = c.a.env_before[pos];
  auto zero = [&](size_t k) {
    auto v = value_at(inst, k, env, w);
    return v && *v == 0;
  };
  bool result_zero = false;
  if (in(m, {"mul", "mneg", "and"})) result_zero = zero(1) || zero(2);
  if (in(m, {"udiv", "sdiv"})) result_zero = zero(1) || zero(2);
  if (in(m, {"lsl", "lsr", "asr", "ror"})) result_zero = zero(1);
  if (in(m, {"sub", "eor", "bic"})) {
    const Register* n = gpr_at(inst, 1);
    const Register* r = gpr_at(inst, 2);
    result_zero = n && r && *n == *r;
  }
  if (!result_zero) return std::nullopt;
  return replace(pos, make_instruction("mov", {*d, zero_reg(w)}));
}

std::optional<Edit> rule_identity(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  const std::string& m = inst.mnemonic;
  if (inst.operands.size() != 3) return std::nullopt;
  const Register* d = reg_at(inst, 0);
  if (!d || !d->is_gpr() || d->is_sp() || d->is_zero()) return std::nullopt;
  const int w = d->width();
  const Env& env = c.a.env_before[pos];
  auto is = [&](size_t k, uint64_t want) {
    auto v = value_at(inst, k, env, w);
    return v && *v == want;
  };
  const Register* n = reg_at(inst, 1);
  const Register* r = reg_at(inst, 2);
  if (!n) return std::nullopt;
  if (in(m, {"add", "sub", "orr", "eor", "lsl", "lsr", "asr", "ror"}) && is(2, 0)) {
    return move_or_erase(c.a, pos, *d, *n);
  }
  if (in(m, {"mul", "udiv", "sdiv"}) && is(2, 1)) return move_or_erase(c.a, pos, *d, *n);
  if (m == "and" && is(2, mask(w))) return move_or_erase(c.a, pos, *d, *n);
  // Commutative forms with the neutral element first.
  if (r && !r->is_sp() && !n->is_sp()) {
    if (in(m, {"add", "orr", "eor"}) && is(1, 0)) return move_or_erase(c.a, pos, *d, *r);
    if (m == "mul" && is(1, 1)) return move_or_erase(c.a, pos, *d, *r);
    if (m == "and" && is(1, mask(w))) return move_or_erase(c.a, pos, *d, *r);
  }
  return std::nullopt;
}

// -- Strength reduction ------------------------------------------------------

std::optional<Edit> rule_mul_pow2(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  if (inst.mnemonic != "mul" || inst.operands.size() != 3) return std::nullopt;
  const Register* d = reg_at(inst, 0);
  if (!d) return std::nullopt;
  const int w = d->width();
  const Env& env = c.a.env_before[pos];
  for (size_t k : {size_t{2}, size_t{1}}) {
    const Register* other = gpr_at(inst, k == 2 ? 1 : 2);
    if (!other) continue;
    auto v = value_at(inst, k, env, w);
    if (!v) continue;
    auto sh = log2_exact(*v);
    if (!sh || *sh == 0) continue;
    return replace(pos, make_instruction("lsl", {*d, *other, Imm{*sh, false, 0}}));
  }
  return std::nullopt;
}

std::optional<Edit> rule_udiv_pow2(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  if (inst.mnemonic != "udiv" || inst.operands.size() != 3) return std::nullopt;
  const Register* d = reg_at(inst, 0);
  const Register* n = gpr_at(inst, 1);
  if (!d || !n) return std::nullopt;
  auto v = value_at(inst, 2, c.a.env_before[pos], d->width());
  if (!v) return std::nullopt;
  auto sh = log2_exact(*v);
  if (!sh || *sh == 0) return std::nullopt;
  return replace(pos, make_instruction("lsr", {*d, *n, Imm{*sh, false, 0}}));
}

// -- Null sequences ----------------------------------------------------------

std::optional<Edit> rule_self_move(const Ctx& c, int pos) {
  const Instruction& inst = c.a.insts[pos];
  if (inst.mnemonic != "mov" || inst.operands.size() != 2) return std::nullopt;
  const Register* d = reg_at(inst, 0);
  const Register* s = reg_at(inst, 1);
  if (!d || !s || !(*d == *s) || slot_of(*d) < 0) return std::nullopt;
  if (d->kind == RegKind::kGpr32 && !c.a.env_before[pos].upper_zero[slot_of(*d)]) {
    return std::nullopt;
  }
  return erase(pos);
}

std::optional<Edit> rule_dead_code(const Ctx& c, int pos) {
  if (!is_dead(c.a, pos)) return std::nullopt;
  return erase(pos);
}

// Byte range [lo, hi) relative to the entry sp of an sp-based plain offset
// access, when known.
std::optional<std::pair<int64_t, int64_t>> stack_range(const Analysis& a, int j) {
  const Info& f = a.info[j];
  if (!f.mem || !f.mem->base.is_sp() || f.mem->mode != AddrMode::kOffset || f.mem->index ||
      f.mem->lo12 || !a.sp_before[j]) {
    return std::nullopt;
  }
  int64_t lo = *a.sp_before[j] + f.mem->disp;
  return std::make_pair(lo, lo + f.bytes);
}

bool overlaps(std::pair<int64_t, int64_t> x, std::pair<int64_t, int64_t> y) {
  return x.first < y.second && y.first < x.second;
}

std::optional<Edit> rule_dead_frame_store(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  const Info& f = a.info[pos];
  if (!a.frame_rules || !f.store || f.barrier) return std::nullopt;
  auto range = stack_range(a, pos);
  if (!range || range->first < -*a.frame || range->second > 0) return std::nullopt;
  for (int k = pos + 1; k < static_cast<int>(a.insts.size()); ++k) {
    const Info& g = a.info[k];
    if (g.barrier) return std::nullopt;
    if (!g.load || !g.mem->base.is_sp()) continue;
    auto r = stack_range(a, k);
    if (!r || overlaps(*r, *range)) return std::nullopt;
  }
  return erase(pos);
}

// -- Combine operations ------------------------------------------------------

std::optional<Edit> rule_copy_propagation(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  const Instruction& mv = a.insts[pos];
  if (mv.mnemonic != "mov" || mv.operands.size() != 2) return std::nullopt;
  const Register* d = gpr_at(mv, 0);
  const Register* s = gpr_at(mv, 1);
  if (!d || !s || d->kind != s->kind || slot_of(*d) == slot_of(*s)) return std::nullopt;
  const int ds = slot_of(*d);
  const int ss = slot_of(*s);
  Edit e;
  for (int j = pos + 1; j < static_cast<int>(a.insts.size()); ++j) {
    if (a.info[j].barrier) break;
    Instruction copy = a.insts[j];
    bool blocked = false;
    bool touched = false;
    for_each_use(copy, [&](Register& r, Site site) {
      if (slot_of(r) != ds) return;
      if (site == Site::kDestRead || site == Site::kMemBaseWriteback || r.kind != d->kind) {
        blocked = true;
        return;
      }
      r = *s;
      touched = true;
    });
    if (blocked) break;
    if (touched) {
      copy.raw = print_instruction(copy);
      e.changes[j] = std::move(copy);
    }
    if (a.info[j].defs[ds] || a.info[j].defs[ss]) break;
  }
  if (e.changes.empty()) return std::nullopt;
  return delete_newly_dead(c, std::move(e), {pos});
}

// The instruction that produces `slot` for consumer `i`, when it is the only
// reader in between, is not needed after `i`, and is read exactly `uses`
// times by `i`.
std::optional<int> sole_feeder(const Analysis& a, int i, int slot, int uses) {
  if (slot < 0 || slot == kSpSlot) return std::nullopt;
  const int j = last_def(a, slot, i);
  if (j < 0) return std::nullopt;
  const Info& p = a.info[j];
  if (p.barrier || p.defs.count() != 1 || p.writes_flags || p.load || p.store) {
    return std::nullopt;
  }
  if (uses_between(a, j, i)[slot]) return std::nullopt;
  if (a.live_after[i][slot] && !a.info[i].defs[slot]) return std::nullopt;
  if (count_uses(a.insts[i], slot) != uses) return std::nullopt;
  return j;
}

// Replaces producer j and consumer i by `merged`, which reads only the
// producer's sources. It goes at i when those sources still hold their
// values there, otherwise at j when nothing in between touches its
// destination.
std::optional<Edit> fuse(const Analysis& a, int j, int i, Instruction merged, Slots sources) {
  const Slots between = defs_between(a, j, i);
  Edit e;
  if ((sources & (between | a.info[j].defs)).none()) {
    e.changes[i] = std::move(merged);
    e.changes[j] = std::nullopt;
    return e;
  }
  const Info mi = analyze_instruction(merged);
  if ((mi.defs & (between | uses_between(a, j, i))).any()) return std::nullopt;
  e.changes[j] = std::move(merged);
  e.changes[i] = std::nullopt;
  return e;
}

struct ShiftImm {
  std::string op;
  Register dst;
  Register src;
  int amount;
};

std::optional<ShiftImm> as_shift_imm(const Instruction& inst) {
  if (!in(inst.mnemonic, {"lsl", "lsr", "asr"}) || inst.operands.size() != 3) return std::nullopt;
  const Register* d = gpr_at(inst, 0);
  const Register* s = gpr_at(inst, 1);
  const auto* i = std::get_if<Imm>(&inst.operands[2]);
  if (!d || !s || !i || d->kind != s->kind || i->value <= 0 || i->value >= d->width()) {
    return std::nullopt;
  }
  return ShiftImm{inst.mnemonic, *d, *s, static_cast<int>(i->value)};
}

Slots slots_of(const Register& r) {
  Slots s;
  if (int k = slot_of(r); k >= 0) s.set(k);
  return s;
}

std::optional<Edit> rule_merge_shifts(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  auto outer = as_shift_imm(a.insts[pos]);
  if (!outer) return std::nullopt;
  auto j = sole_feeder(a, pos, slot_of(outer->src), 1);
  if (!j) return std::nullopt;
  auto inner = as_shift_imm(a.insts[*j]);
  if (!inner || inner->op != outer->op || inner->dst.kind != outer->dst.kind) return std::nullopt;
  const int w = outer->dst.width();
  int total = inner->amount + outer->amount;
  if (outer->op == "asr") {
    total = std::min(total, w - 1);
  } else if (total >= w) {
    return std::nullopt;
  }
  Instruction merged = make_instruction(outer->op, {outer->dst, inner->src, Imm{total, false, 0}});
  return fuse(a, *j, pos, std::move(merged), slots_of(inner->src));
}

std::optional<Edit> rule_double_shifted_add(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  const Instruction& inst = a.insts[pos];
  if (inst.mnemonic != "add" || inst.operands.size() != 3) return std::nullopt;
  const Register* d = gpr_at(inst, 0);
  const Register* x = gpr_at(inst, 1);
  const Register* y = gpr_at(inst, 2);
  if (!d || !x || !y || !(*x == *y) || x->kind != d->kind) return std::nullopt;
  auto j = sole_feeder(a, pos, slot_of(*x), 2);
  if (!j) return std::nullopt;
  auto inner = as_shift_imm(a.insts[*j]);
  if (!inner || inner->op != "lsl" || inner->dst.kind != d->kind) return std::nullopt;
  if (inner->amount + 1 >= d->width()) return std::nullopt;
  Instruction merged =
      make_instruction("lsl", {*d, inner->src, Imm{inner->amount + 1, false, 0}});
  return fuse(a, *j, pos, std::move(merged), slots_of(inner->src));
}

std::optional<Edit> rule_shift_pair_to_extend(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  auto outer = as_shift_imm(a.insts[pos]);
  if (!outer || outer->op == "lsl") return std::nullopt;
  auto j = sole_feeder(a, pos, slot_of(outer->src), 1);
  if (!j) return std::nullopt;
  auto inner = as_shift_imm(a.insts[*j]);
  if (!inner || inner->op != "lsl" || inner->amount != outer->amount ||
      inner->dst.kind != outer->dst.kind) {
    return std::nullopt;
  }
  const int w = outer->dst.width();
  const int kept = w - outer->amount;
  const Register src_w = inner->src.with_width(32);
  const Register dst_w = outer->dst.with_width(32);
  const bool sign = outer->op == "asr";
  Instruction merged;
  if (kept == 8) {
    merged = sign ? make_instruction("sxtb", {outer->dst, src_w})
                  : make_instruction("uxtb", {dst_w, src_w});
  } else if (kept == 16) {
    merged = sign ? make_instruction("sxth", {outer->dst, src_w})
                  : make_instruction("uxth", {dst_w, src_w});
  } else if (kept == 32 && w == 64) {
    merged = sign ? make_instruction("sxtw", {outer->dst, src_w})
                  : make_instruction("mov", {dst_w, src_w});
  } else {
    return std::nullopt;
  }
  return fuse(a, *j, pos, std::move(merged), slots_of(inner->src));
}

// -- Address-mode operations -------------------------------------------------

std::optional<Edit> rule_stack_forwarding(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  const Instruction& ld = a.insts[pos];
  const Info& f = a.info[pos];
  if (!f.load || f.barrier || ld.mnemonic == "ldp" || ld.mnemonic == "ldpsw") return std::nullopt;
  auto want = stack_range(a, pos);
  if (!want) return std::nullopt;
  const Register* t = gpr_at(ld, 0);
  if (!t) return std::nullopt;
  Slots clobbered;
  for (int k = pos - 1; k >= 0; --k) {
    const Info& g = a.info[k];
    if (g.barrier || g.defs[kSpSlot]) return std::nullopt;
    if (g.store) {
      if (!g.mem->base.is_sp()) return std::nullopt;
      auto r = stack_range(a, k);
      if (!r) return std::nullopt;
      const Instruction& st = a.insts[k];
      // stp stores two registers in consecutive halves.
      const int halves = st.mnemonic == "stp" ? 2 : 1;
      const int64_t part = (r->second - r->first) / halves;
      for (int h = 0; h < halves; ++h) {
        std::pair<int64_t, int64_t> piece{r->first + h * part, r->first + (h + 1) * part};
        if (piece == *want) {
          const Register* v = reg_at(st, static_cast<size_t>(h));
          if (!v || v->is_sp() || (slot_of(*v) >= 0 && clobbered[slot_of(*v)])) {
            return std::nullopt;
          }
          const std::string& m = ld.mnemonic;
          const Register vw = v->with_width(32);
          Instruction out;
          if (v->is_zero()) {
            out = make_instruction("mov", {*t, zero_reg(t->width())});
          } else if (in(m, {"ldr", "ldur"})) {
            out = make_instruction("mov", {*t, v->with_width(t->width())});
          } else if (in(m, {"ldrb", "ldurb"})) {
            out = make_instruction("uxtb", {*t, vw});
          } else if (in(m, {"ldrh", "ldurh"})) {
            out = make_instruction("uxth", {*t, vw});
          } else if (in(m, {"ldrsb", "ldursb"})) {
            out = make_instruction("sxtb", {*t, vw});
          } else if (in(m, {"ldrsh", "ldursh"})) {
            out = make_instruction("sxth", {*t, vw});
          } else if (in(m, {"ldrsw", "ldursw"})) {
            out = make_instruction("sxtw", {*t, vw});
          } else {
            return std::nullopt;
          }
          return replace(pos, std::move(out));
        }
        if (overlaps(piece, *want)) return std::nullopt;
      }
    }
    clobbered |= g.defs;
  }
  return std::nullopt;
}

std::optional<Edit> rule_fold_extended_index(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  const Info& f = a.info[pos];
  if (!(f.load || f.store) || f.barrier || !f.mem->index) return std::nullopt;
  const MemIndex& idx = *f.mem->index;
  if (idx.reg.kind != RegKind::kGpr64 ||
      (idx.op != IndexOp::kNone && idx.op != IndexOp::kLsl)) {
    return std::nullopt;
  }
  auto j = sole_feeder(a, pos, slot_of(idx.reg), 1);
  if (!j) return std::nullopt;
  const Instruction& p = a.insts[*j];
  IndexOp op;
  const Register* src = gpr_at(p, 1);
  if (!src || src->kind != RegKind::kGpr32 || p.operands.size() != 2) return std::nullopt;
  if (p.mnemonic == "sxtw") {
    op = IndexOp::kSxtw;
  } else if (p.mnemonic == "mov" && reg_at(p, 0)->kind == RegKind::kGpr32) {
    op = IndexOp::kUxtw;
  } else {
    return std::nullopt;
  }
  // Both producers leave the low word of their source intact, so the source
  // may also be the producer's own destination.
  if (defs_between(a, *j, pos)[slot_of(*src)]) return std::nullopt;
  Instruction out = a.insts[pos];
  for (Operand& o : out.operands) {
    if (auto* m = std::get_if<Mem>(&o)) {
      m->index = MemIndex{*src, op, idx.op == IndexOp::kLsl ? idx.amount : std::nullopt};
    }
  }
  out.raw = print_instruction(out);
  Edit e;
  e.changes[pos] = std::move(out);
  e.changes[*j] = std::nullopt;
  return e;
}

bool is_frame_cfi(const Directive& d, int64_t k) {
  constexpr std::string_view kPrefix = ".cfi_def_cfa_offset";
  if (d.text.rfind(kPrefix, 0) != 0) return false;
  std::string rest = d.text.substr(kPrefix.size());
  try {
    size_t used = 0;
    long long v = std::stoll(rest, &used);
    return (v == k || v == 0) && rest.find_first_not_of(" \t", used) == std::string::npos;
  } catch (const std::exception&) {
    return false;
  }
}

std::optional<Edit> rule_drop_redundant_frame(const Ctx& c, int pos) {
  const Analysis& a = c.a;
  if (pos != 0 || !a.sp_only_frame) return std::nullopt;
  Edit e;
  e.changes[0] = std::nullopt;
  e.changes[a.frame_add] = std::nullopt;
  for (size_t k = 0; k < c.items.size(); ++k) {
    if (const auto* d = std::get_if<Directive>(&c.items[k]); d && is_frame_cfi(*d, *a.frame)) {
      e.drop_items.push_back(k);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Driver.

struct RuleEntry {
  const char* name;
  RuleCategory category;
  RuleFn fn;
};

const std::vector<RuleEntry>& rules() {
  static const std::vector<RuleEntry> kRules = {
      {"fold-constant", RuleCategory::kConstantFolding, rule_fold_constant},
      {"propagate-immediate", RuleCategory::kConstantFolding, rule_propagate_immediate},
      {"zero-result", RuleCategory::kAlgebraicLaws, rule_zero_result},
      {"identity-operation", RuleCategory::kAlgebraicLaws, rule_identity},
      {"mul-pow2-to-lsl", RuleCategory::kStrengthReduction, rule_mul_pow2},
      {"udiv-pow2-to-lsr", RuleCategory::kStrengthReduction, rule_udiv_pow2},
      {"self-move", RuleCategory::kNullSequences, rule_self_move},
      {"dead-code", RuleCategory::kNullSequences, rule_dead_code},
      {"dead-frame-store", RuleCategory::kNullSequences, rule_dead_frame_store},
      {"copy-propagation", RuleCategory::kCombineOperations, rule_copy_propagation},
      {"merge-shifts", RuleCategory::kCombineOperations, rule_merge_shifts},
      {"double-shifted-add", RuleCategory::kCombineOperations, rule_double_shifted_add},
      {"shift-pair-to-extend", RuleCategory::kCombineOperations, rule_shift_pair_to_extend},
      {"stack-forwarding", RuleCategory::kAddressModeOperations, rule_stack_forwarding},
      {"fold-extended-index", RuleCategory::kAddressModeOperations, rule_fold_extended_index},
      {"drop-redundant-frame", RuleCategory::kAddressModeOperations, rule_drop_redundant_frame},
  };
  return kRules;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (size_t k = 0; k < lines.size(); ++k) {
    if (k) out += '\n';
    out += lines[k];
  }
  return out;
}

TraceStep describe(const RuleEntry& r, const std::vector<BlockItem>& items, const Analysis& a,
                   const Edit& e, int iteration) {
  std::vector<std::string> before;
  std::vector<std::string> after;
  std::vector<size_t> touched;
  for (const auto& [o, repl] : e.changes) touched.push_back(a.item_of[o]);
  touched.insert(touched.end(), e.drop_items.begin(), e.drop_items.end());
  std::sort(touched.begin(), touched.end());
  std::map<size_t, int> ordinal_of;
  for (size_t o = 0; o < a.item_of.size(); ++o) ordinal_of[a.item_of[o]] = static_cast<int>(o);
  for (size_t k : touched) {
    before.push_back(print_item(items[k]));
    auto it = ordinal_of.find(k);
    if (it == ordinal_of.end()) continue;
    const auto& repl = e.changes.at(it->second);
    if (repl) after.push_back(print_instruction(*repl));
  }
  return TraceStep{r.name, r.category, join_lines(before), join_lines(after), iteration};
}

PassResult run_pass(const BasicBlock& block, const std::vector<const RuleEntry*>& active,
                    int iteration) {
  PassResult out;
  std::vector<BlockItem> items = block.items();
  Analysis a = analyze(items);
  int pos = 0;
  while (pos < static_cast<int>(a.insts.size())) {
    const Ctx ctx{items, a};
    std::optional<Edit> edit;
    const RuleEntry* hit = nullptr;
    for (const RuleEntry* r : active) {
      edit = r->fn(ctx, pos);
      if (edit) {
        hit = r;
        break;
      }
    }
    if (!edit) {
      ++pos;
      continue;
    }
    out.steps.push_back(describe(*hit, items, a, *edit, iteration));
    int survivors = 0;
    for (int o = 0; o <= pos; ++o) {
      auto it = edit->changes.find(o);
      survivors += !(it != edit->changes.end() && !it->second);
    }
    items = apply_edit(items, a, *edit);
    a = analyze(items);
    pos = survivors;
    out.changed = true;
  }
  out.block = BasicBlock(std::move(items));
  return out;
}

std::vector<const RuleEntry*> all_rules() {
  std::vector<const RuleEntry*> out;
  for (const RuleEntry& r : rules()) out.push_back(&r);
  return out;
}

}  // namespace

std::string_view category_name(RuleCategory c) {
  switch (c) {
    case RuleCategory::kConstantFolding: return "ConstantFolding";
    case RuleCategory::kAlgebraicLaws: return "AlgebraicLaws";
    case RuleCategory::kStrengthReduction: return "StrengthReduction";
    case RuleCategory::kNullSequences: return "NullSequences";
    case RuleCategory::kCombineOperations: return "CombineOperations";
    case RuleCategory::kAddressModeOperations: return "AddressModeOperations";
  }
  return "?";
}

const std::vector<RuleInfo>& rule_inventory() {
  static const std::vector<RuleInfo> kInventory = [] {
    std::vector<RuleInfo> v;
    for (const RuleEntry& r : rules()) v.push_back({r.name, r.category});
    return v;
  }();
  return kInventory;
}

PassResult apply_rules_once(const BasicBlock& block) { return run_pass(block, all_rules(), 1); }

PassResult apply_single_rule(const BasicBlock& block, std::string_view rule) {
  for (const RuleEntry& r : rules()) {
    if (rule == r.name) return run_pass(block, {&r}, 1);
  }
  throw std::invalid_argument("unknown rule: " + std::string(rule));
}

OptimizeResult optimize(const BasicBlock& block) {
  OptimizeResult out{block, {}};
  const auto active = all_rules();
  for (int it = 1;; ++it) {
    if (it > kIterationCap) {
      out.trace.cap_exceeded = true;
      break;
    }
    PassResult p = run_pass(out.block, active, it);
    out.trace.iterations = it;
    for (TraceStep& s : p.steps) out.trace.applied.push_back(std::move(s));
    if (!p.changed) break;
    out.block = std::move(p.block);
  }
  return out;
}

std::string trace_to_json(const OptimizationTrace& trace) {
  nlohmann::ordered_json j;
  j["iterations"] = trace.iterations;
  j["cap_exceeded"] = trace.cap_exceeded;
  j["applied"] = nlohmann::ordered_json::array();
  for (const TraceStep& s : trace.applied) {
    j["applied"].push_back({{"rule", s.rule},
                            {"category", std::string(category_name(s.category))},
                            {"iteration", s.iteration},
                            {"before", s.before},
                            {"after", s.after}});
  }
  return j.dump();
}

}  // namespace peepbench
