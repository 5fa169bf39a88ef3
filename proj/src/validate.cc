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

#include "peepbench/validate.h"

#include <algorithm>
#include <initializer_list>
#include <map>
#include <optional>

#include "json.hpp"

namespace peepbench {
namespace {

// Operand slot patterns.
enum class Pat : uint8_t {
  kR,       // w/x/zr; joins the width group
  kRsp,     // w/x/zr/sp; joins the width group
  kRw,      // w or wzr
  kRx,      // x or xzr
  kRAny,    // w/x/zr, not grouped
  kImm,
  kArith,   // R | ShiftedReg(lsl/lsr/asr) | ExtendedReg | Imm
  kLogic,   // R | ShiftedReg | Imm
  kShReg,   // R | ShiftedReg
  kMem,
  kLabel,
  kLo12,
  kCond,
  kFpReg,
};

using Form = std::vector<Pat>;

struct MnemonicSpec {
  std::vector<Form> forms;
  bool fp_arity_only = false;
  std::vector<size_t> fp_arities;
};

const std::map<std::string, MnemonicSpec, std::less<>>& table() {
  static const auto* kTable = [] {
    auto* t = new std::map<std::string, MnemonicSpec, std::less<>>();
    auto add = [&](std::initializer_list<const char*> names, std::vector<Form> forms) {
      for (const char* n : names) (*t)[n].forms = forms;
    };
    auto fp = [&](std::initializer_list<const char*> names, std::vector<size_t> arities) {
      for (const char* n : names) {
        (*t)[n].fp_arity_only = true;
        (*t)[n].fp_arities = arities;
      }
    };
    using P = Pat;
    add({"mov"}, {{P::kRsp, P::kRsp}, {P::kR, P::kImm}});
    add({"movz", "movn", "movk"}, {{P::kR, P::kImm}});
    add({"add", "sub"}, {{P::kRsp, P::kRsp, P::kArith}, {P::kRsp, P::kRsp, P::kLo12}});
    add({"adds", "subs"}, {{P::kR, P::kRsp, P::kArith}});
    add({"cmp", "cmn"}, {{P::kRsp, P::kArith}});
    add({"tst"}, {{P::kR, P::kLogic}});
    add({"neg", "negs", "mvn"}, {{P::kR, P::kShReg}});
    add({"and", "orr", "eor", "ands", "bic", "bics", "orn", "eon"},
        {{P::kR, P::kR, P::kLogic}});
    add({"lsl", "lsr", "asr", "ror"}, {{P::kR, P::kR, P::kImm}, {P::kR, P::kR, P::kR}});
    // The immediate form of mul is not architectural but appears in the
    // reference optimization examples, so it is accepted.
    add({"mul", "mneg"}, {{P::kR, P::kR, P::kR}, {P::kR, P::kR, P::kImm}});
    add({"madd", "msub"}, {{P::kR, P::kR, P::kR, P::kR}});
    add({"udiv", "sdiv"}, {{P::kR, P::kR, P::kR}});
    add({"smull", "umull", "smnegl", "umnegl"}, {{P::kRx, P::kRw, P::kRw}});
    add({"smulh", "umulh"}, {{P::kRx, P::kRx, P::kRx}});
    add({"smaddl", "umaddl", "smsubl", "umsubl"}, {{P::kRx, P::kRw, P::kRw, P::kRx}});
    add({"cset", "csetm"}, {{P::kR, P::kCond}});
    add({"csel", "csinc", "csinv", "csneg"}, {{P::kR, P::kR, P::kR, P::kCond}});
    add({"cinc", "cinv", "cneg"}, {{P::kR, P::kR, P::kCond}});
    add({"ccmp", "ccmn"}, {{P::kR, P::kR, P::kImm, P::kCond}, {P::kR, P::kImm, P::kImm, P::kCond}});
    add({"sxtw"}, {{P::kRx, P::kRw}});
    add({"sxtb", "sxth"}, {{P::kRAny, P::kRw}});
    add({"uxtb", "uxth"}, {{P::kRw, P::kRw}});
    add({"ubfx", "sbfx", "ubfiz", "sbfiz", "bfi", "bfxil"}, {{P::kR, P::kR, P::kImm, P::kImm}});
    add({"extr"}, {{P::kR, P::kR, P::kR, P::kImm}});
    add({"clz", "cls", "rbit", "rev"}, {{P::kR, P::kR}});
    add({"ldr"}, {{P::kRAny, P::kMem}, {P::kFpReg, P::kMem}, {P::kRAny, P::kLabel}});
    add({"str", "ldur", "stur"}, {{P::kRAny, P::kMem}, {P::kFpReg, P::kMem}});
    add({"ldrb", "ldrh", "strb", "strh", "ldurb", "ldurh", "sturb", "sturh"},
        {{P::kRw, P::kMem}});
    add({"ldrsb", "ldrsh", "ldursb", "ldursh"}, {{P::kRAny, P::kMem}});
    add({"ldrsw", "ldursw"}, {{P::kRx, P::kMem}});
    add({"ldp", "stp"}, {{P::kR, P::kR, P::kMem}, {P::kFpReg, P::kFpReg, P::kMem}});
    add({"ldpsw"}, {{P::kRx, P::kRx, P::kMem}});
    add({"adrp", "adr"}, {{P::kRx, P::kLabel}});
    add({"ret"}, {{}, {P::kRx}});
    add({"b", "bl"}, {{P::kLabel}});
    add({"br", "blr"}, {{P::kRx}});
    add({"cbz", "cbnz"}, {{P::kR, P::kLabel}});
    add({"tbz", "tbnz"}, {{P::kR, P::kImm, P::kLabel}});
    add({"nop"}, {{}});
    fp({"fmov", "fcmp", "fcmpe", "fneg", "fabs", "fsqrt", "fcvt", "frintx", "frintz",
        "frinta", "frintm", "frintp", "frintn", "scvtf", "ucvtf", "fcvtzs", "fcvtzu",
        "fcvtas", "fcvtau", "fcvtms", "fcvtmu"},
       {2});
    fp({"fadd", "fsub", "fmul", "fdiv", "fmax", "fmin", "fnmul", "fmaxnm", "fminnm"}, {3});
    fp({"fmadd", "fmsub", "fnmadd", "fnmsub", "fcsel", "fccmp", "fccmpe"}, {4});
    return t;
  }();
  return *kTable;
}

const MnemonicSpec* lookup(std::string_view mnemonic) {
  if (mnemonic.rfind("b.", 0) == 0) {
    static const MnemonicSpec kCondBranch{{{Pat::kLabel}}, false, {}};
    return parse_cond(mnemonic.substr(2)) ? &kCondBranch : nullptr;
  }
  const auto& t = table();
  auto it = t.find(mnemonic);
  return it == t.end() ? nullptr : &it->second;
}

bool is_gpr_no_sp(const Register& r) { return r.is_gpr() && !r.is_sp(); }

struct Matcher {
  const Instruction& inst;
  std::optional<int> group_width;
  std::string why;

  bool join(const Register& r) {
    if (!group_width) {
      group_width = r.width();
      return true;
    }
    if (*group_width != r.width()) {
      why = "register width mismatch at '" + r.name() + "'";
      return false;
    }
    return true;
  }

  bool fail(const std::string& msg) {
    why = msg;
    return false;
  }

  bool match(const Operand& op, Pat pat) {
    switch (pat) {
      case Pat::kR:
      case Pat::kRsp: {
        const auto* r = std::get_if<Register>(&op);
        if (r == nullptr || !r->is_gpr()) return fail("expected a general register");
        if (r->is_sp() && pat == Pat::kR) return fail("sp not allowed here");
        return join(*r);
      }
      case Pat::kRw: {
        const auto* r = std::get_if<Register>(&op);
        if (r == nullptr || !is_gpr_no_sp(*r) || r->width() != 32) {
          return fail("expected a 32-bit register");
        }
        return true;
      }
      case Pat::kRx: {
        const auto* r = std::get_if<Register>(&op);
        if (r == nullptr || !is_gpr_no_sp(*r) || r->width() != 64) {
          return fail("expected a 64-bit register");
        }
        return true;
      }
      case Pat::kRAny: {
        const auto* r = std::get_if<Register>(&op);
        if (r == nullptr || !is_gpr_no_sp(*r)) return fail("expected a general register");
        return true;
      }
      case Pat::kFpReg: {
        const auto* r = std::get_if<Register>(&op);
        if (r == nullptr || !r->is_fp()) return fail("expected an FP register");
        return true;
      }
      case Pat::kImm:
        if (!std::holds_alternative<Imm>(op)) return fail("expected an immediate");
        return true;
      case Pat::kArith:
        if (std::holds_alternative<Imm>(op)) return true;
        if (const auto* e = std::get_if<ExtendedReg>(&op)) {
          if (!is_gpr_no_sp(e->reg)) return fail("bad extended register");
          bool x_ext = e->op == ExtendOp::kUxtx || e->op == ExtendOp::kSxtx;
          if (e->reg.width() != (x_ext ? 64 : 32)) {
            return fail("extend '" + e->reg.name() + "' has the wrong width");
          }
          return true;
        }
        if (const auto* s = std::get_if<ShiftedReg>(&op)) {
          if (s->op == ShiftOp::kRor) return fail("ror not allowed in arithmetic");
          if (!is_gpr_no_sp(s->reg)) return fail("bad shifted register");
          return join(s->reg);
        }
        return match(op, Pat::kR);
      case Pat::kLogic:
        if (std::holds_alternative<Imm>(op)) return true;
        [[fallthrough]];
      case Pat::kShReg:
        if (const auto* s = std::get_if<ShiftedReg>(&op)) {
          if (!is_gpr_no_sp(s->reg)) return fail("bad shifted register");
          return join(s->reg);
        }
        return match(op, Pat::kR);
      case Pat::kMem:
        if (!std::holds_alternative<Mem>(op)) return fail("expected a memory operand");
        return true;
      case Pat::kLabel: {
        const auto* l = std::get_if<LabelRef>(&op);
        if (l == nullptr || l->modifier != LabelModifier::kNone) return fail("expected a label");
        return true;
      }
      case Pat::kLo12: {
        const auto* l = std::get_if<LabelRef>(&op);
        if (l == nullptr || l->modifier != LabelModifier::kLo12) {
          return fail("expected a :lo12: symbol");
        }
        return true;
      }
      case Pat::kCond:
        if (!std::holds_alternative<Cond>(op)) return fail("expected a condition code");
        return true;
    }
    return false;
  }
};

int access_size(const Instruction& inst) {
  const std::string& m = inst.mnemonic;
  if (m == "ldrb" || m == "strb" || m == "ldurb" || m == "sturb" || m == "ldrsb" ||
      m == "ldursb") {
    return 1;
  }
  if (m == "ldrh" || m == "strh" || m == "ldurh" || m == "sturh" || m == "ldrsh" ||
      m == "ldursh") {
    return 2;
  }
  if (m == "ldrsw" || m == "ldursw" || m == "ldpsw") return 4;
  if (const auto* r = std::get_if<Register>(&inst.operands.front())) {
    return std::max(1, r->width() / 8);
  }
  return 8;
}

bool is_unscaled(std::string_view m) { return m.rfind("ldur", 0) == 0 || m.rfind("stur", 0) == 0; }
bool is_pair(std::string_view m) { return m == "ldp" || m == "stp" || m == "ldpsw"; }

int log2_exact(int v) {
  int k = 0;
  while ((1 << k) < v) ++k;
  return k;
}

std::optional<std::string> check_mem(const Instruction& inst, const Mem& mem) {
  const std::string& m = inst.mnemonic;
  if (!(mem.base.kind == RegKind::kGpr64 || mem.base.is_sp())) {
    return "memory base '" + mem.base.name() + "' must be a 64-bit register or sp";
  }
  int size = access_size(inst);
  if (mem.index) {
    if (mem.mode != AddrMode::kOffset || is_pair(m) || is_unscaled(m)) {
      return "register offset not allowed here";
    }
    const MemIndex& idx = *mem.index;
    bool want_w = idx.op == IndexOp::kUxtw || idx.op == IndexOp::kSxtw;
    if (!is_gpr_no_sp(idx.reg) || idx.reg.width() != (want_w ? 32 : 64)) {
      return "index register '" + idx.reg.name() + "' has the wrong width";
    }
    if (idx.amount && *idx.amount != 0 && *idx.amount != log2_exact(size)) {
      return "index shift must be 0 or " + std::to_string(log2_exact(size));
    }
    return std::nullopt;
  }
  if (mem.lo12) {
    if (mem.mode != AddrMode::kOffset || is_pair(m)) return ":lo12: offset not allowed here";
    return std::nullopt;
  }
  int64_t d = mem.disp;
  if (is_pair(m)) {
    if (d % size != 0 || d < -64 * size || d > 63 * size) {
      return "pair offset " + std::to_string(d) + " out of range";
    }
    return std::nullopt;
  }
  if (mem.mode != AddrMode::kOffset || is_unscaled(m)) {
    if (d < -256 || d > 255) return "offset " + std::to_string(d) + " out of range";
    return std::nullopt;
  }
  if (d < -256 || d > 4095 * static_cast<int64_t>(size) || (d > 255 && d % size != 0)) {
    return "offset " + std::to_string(d) + " out of range";
  }
  return std::nullopt;
}

std::optional<std::string> check_ranges(const Instruction& inst) {
  const std::string& m = inst.mnemonic;
  const auto& ops = inst.operands;
  int width = 64;
  if (!ops.empty()) {
    if (const auto* r = std::get_if<Register>(&ops.front())) width = r->width();
  }
  auto imm_at = [&](size_t i) -> const Imm* {
    return i < ops.size() ? std::get_if<Imm>(&ops[i]) : nullptr;
  };
  for (const auto& op : ops) {
    if (const auto* s = std::get_if<ShiftedReg>(&op)) {
      if (s->amount < 0 || s->amount >= width) {
        return "shift amount #" + std::to_string(s->amount) + " out of range";
      }
    }
    if (const auto* e = std::get_if<ExtendedReg>(&op)) {
      if (e->amount && (*e->amount < 0 || *e->amount > 4)) return "extend amount out of range";
    }
    if (const auto* mem = std::get_if<Mem>(&op)) {
      if (auto err = check_mem(inst, *mem)) return err;
    }
    if (const auto* imm = std::get_if<Imm>(&op)) {
      bool lsl_ok = imm->lsl == 0 ||
                    ((m == "add" || m == "sub" || m == "adds" || m == "subs" ||
                      m == "cmp" || m == "cmn") && imm->lsl == 12) ||
                    ((m == "movz" || m == "movn" || m == "movk") && imm->lsl % 16 == 0 &&
                     imm->lsl < width);
      if (!lsl_ok) return "immediate shift lsl #" + std::to_string(imm->lsl) + " not allowed";
    }
  }
  if (m == "lsl" || m == "lsr" || m == "asr" || m == "ror") {
    if (const Imm* imm = imm_at(2); imm && (imm->value < 0 || imm->value >= width)) {
      return "shift amount #" + std::to_string(imm->value) + " out of range";
    }
  }
  if (m == "add" || m == "sub" || m == "adds" || m == "subs" || m == "cmp" || m == "cmn") {
    const Imm* imm = imm_at(ops.size() - 1);
    if (imm && (imm->value > 0xFFFFFF || imm->value < -0xFFFFFF)) {
      return "arithmetic immediate out of range";
    }
  }
  if (m == "mov") {
    if (const Imm* imm = imm_at(1); imm && width == 32 &&
                                     (imm->value < INT32_MIN || imm->value > UINT32_MAX)) {
      return "immediate does not fit a 32-bit register";
    }
  }
  if (m == "movz" || m == "movn" || m == "movk") {
    if (const Imm* imm = imm_at(1); imm && (imm->value < 0 || imm->value > 0xFFFF)) {
      return "16-bit immediate out of range";
    }
  }
  if (m == "tbz" || m == "tbnz") {
    if (const Imm* imm = imm_at(1); imm && (imm->value < 0 || imm->value >= width)) {
      return "bit number out of range";
    }
  }
  if (m == "ubfx" || m == "sbfx" || m == "ubfiz" || m == "sbfiz" || m == "bfi" || m == "bfxil") {
    const Imm* lsb = imm_at(2);
    const Imm* w = imm_at(3);
    if (lsb && w && (lsb->value < 0 || lsb->value >= width || w->value < 1 ||
                     w->value > width - lsb->value)) {
      return "bitfield out of range";
    }
  }
  if (m == "extr") {
    if (const Imm* imm = imm_at(3); imm && (imm->value < 0 || imm->value >= width)) {
      return "extract position out of range";
    }
  }
  if (m == "ccmp" || m == "ccmn") {
    if (const Imm* nzcv = imm_at(2); nzcv && (nzcv->value < 0 || nzcv->value > 15)) {
      return "nzcv immediate out of range";
    }
    if (const Imm* imm = imm_at(1); imm && (imm->value < 0 || imm->value > 31)) {
      return "ccmp immediate out of range";
    }
  }
  return std::nullopt;
}

std::string describe(const Instruction& inst) { return "'" + inst.mnemonic + "'"; }

}  // namespace

std::string_view diag_code_name(DiagCode code) {
  switch (code) {
    case DiagCode::kUnknownMnemonic: return "UnknownMnemonic";
    case DiagCode::kBadOperandArity: return "BadOperandArity";
    case DiagCode::kBadOperandKind: return "BadOperandKind";
    case DiagCode::kMalformedImmediate: return "MalformedImmediate";
    case DiagCode::kMalformedRegister: return "MalformedRegister";
    case DiagCode::kUnknownLabelSyntax: return "UnknownLabelSyntax";
  }
  return "?";
}

bool is_known_mnemonic(std::string_view mnemonic) { return lookup(mnemonic) != nullptr; }

bool is_fp_mnemonic(std::string_view mnemonic) {
  const MnemonicSpec* spec = lookup(mnemonic);
  return spec != nullptr && spec->fp_arity_only;
}

std::vector<Diagnostic> validate_instruction(const Instruction& inst) {
  std::vector<Diagnostic> out;
  auto emit = [&](DiagCode code, std::string msg) {
    out.push_back({inst.line, code, std::move(msg)});
  };
  const MnemonicSpec* spec = lookup(inst.mnemonic);
  if (spec == nullptr) {
    emit(DiagCode::kUnknownMnemonic, "unknown mnemonic " + describe(inst));
    return out;
  }
  for (const auto& op : inst.operands) {
    if (const auto* bad = std::get_if<Malformed>(&op)) {
      switch (bad->kind) {
        case MalformedKind::kImmediate:
          emit(DiagCode::kMalformedImmediate, "malformed immediate '" + bad->text + "'");
          break;
        case MalformedKind::kRegister:
          emit(DiagCode::kMalformedRegister, "malformed register '" + bad->text + "'");
          break;
        case MalformedKind::kLabel:
          emit(DiagCode::kUnknownLabelSyntax, "unknown label syntax '" + bad->text + "'");
          break;
      }
    }
  }
  if (!out.empty()) return out;

  if (spec->fp_arity_only) {
    if (std::find(spec->fp_arities.begin(), spec->fp_arities.end(), inst.operands.size()) ==
        spec->fp_arities.end()) {
      emit(DiagCode::kBadOperandArity, describe(inst) + " takes " +
                                           std::to_string(spec->fp_arities.front()) +
                                           " operands");
    }
    return out;
  }

  bool arity_seen = false;
  std::string first_reason;
  for (const Form& form : spec->forms) {
    if (form.size() != inst.operands.size()) continue;
    arity_seen = true;
    Matcher matcher{inst, std::nullopt, {}};
    bool ok = true;
    for (size_t i = 0; i < form.size() && ok; ++i) ok = matcher.match(inst.operands[i], form[i]);
    if (ok) {
      if (auto err = check_ranges(inst)) {
        emit(DiagCode::kMalformedImmediate, describe(inst) + ": " + *err);
      }
      return out;
    }
    if (first_reason.empty()) first_reason = matcher.why;
  }
  if (!arity_seen) {
    emit(DiagCode::kBadOperandArity, describe(inst) + " does not take " +
                                         std::to_string(inst.operands.size()) + " operands");
  } else {
    emit(DiagCode::kBadOperandKind, describe(inst) + ": " + first_reason);
  }
  return out;
}

ValidationReport validate_block(const BasicBlock& block) {
  ValidationReport report;
  for (const Instruction* inst : block.instructions()) {
    auto diags = validate_instruction(*inst);
    report.diagnostics.insert(report.diagnostics.end(), diags.begin(), diags.end());
  }
  return report;
}

std::string diagnostics_to_jsonl(const ValidationReport& report) {
  std::string out;
  for (const auto& d : report.diagnostics) {
    nlohmann::json j = {{"line", d.line},
                        {"code", std::string(diag_code_name(d.code))},
                        {"message", d.message}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace peepbench
