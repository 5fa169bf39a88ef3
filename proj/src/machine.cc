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

#include "peepbench/machine.h"

#include <bit>
#include <sstream>

#include "peepbench/hashing.h"

namespace peepbench {
namespace {

constexpr uint64_t mask(int width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1);
}

constexpr int64_t sign_extend(uint64_t v, int bits) {
  if (bits >= 64) return static_cast<int64_t>(v);
  uint64_t m = 1ull << (bits - 1);
  v &= mask(bits);
  return static_cast<int64_t>((v ^ m) - m);
}

uint64_t shift_value(uint64_t v, ShiftOp op, int amount, int width) {
  v &= mask(width);
  amount %= width;
  if (amount == 0) return v;
  switch (op) {
    case ShiftOp::kLsl: return (v << amount) & mask(width);
    case ShiftOp::kLsr: return v >> amount;
    case ShiftOp::kAsr:
      return static_cast<uint64_t>(sign_extend(v, width) >> amount) & mask(width);
    case ShiftOp::kRor: return ((v >> amount) | (v << (width - amount))) & mask(width);
  }
  return v;
}

uint64_t extend_value(uint64_t v, ExtendOp op) {
  switch (op) {
    case ExtendOp::kUxtb: return v & 0xFF;
    case ExtendOp::kUxth: return v & 0xFFFF;
    case ExtendOp::kUxtw: return v & 0xFFFFFFFFull;
    case ExtendOp::kUxtx: return v;
    case ExtendOp::kSxtb: return static_cast<uint64_t>(sign_extend(v, 8));
    case ExtendOp::kSxth: return static_cast<uint64_t>(sign_extend(v, 16));
    case ExtendOp::kSxtw: return static_cast<uint64_t>(sign_extend(v, 32));
    case ExtendOp::kSxtx: return v;
  }
  return v;
}

struct TrapSignal {
  Trap trap;
};

[[noreturn]] void trap(TrapKind kind, std::string detail, int line) {
  throw TrapSignal{Trap{kind, std::move(detail), line}};
}

std::string hex(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

class Executor {
 public:
  Executor(MachineState state, const SymbolTable& symbols)
      : symbols_(symbols) {
    result_.final = std::move(state);
  }

  ExecutionResult run(const BasicBlock& block) {
    try {
      for (const Instruction* inst : block.instructions()) {
        current_ = inst;
        step(*inst);
        ++result_.executed;
        if (finished_) break;
      }
      if (!finished_) result_.terminator = {Outcome::kFellThrough, ""};
    } catch (const TrapSignal& sig) {
      result_.trap = sig.trap;
    }
    return std::move(result_);
  }

 private:
  MachineState& st() { return result_.final; }

  [[noreturn]] void unsupported() {
    trap(TrapKind::kUnsupportedInstruction, current_->mnemonic, current_->line);
  }

  const Operand& op(size_t i) const {
    if (i >= current_->operands.size()) {
      trap(TrapKind::kUnsupportedInstruction, current_->mnemonic, current_->line);
    }
    return current_->operands[i];
  }

  const Register& reg(size_t i) {
    const auto* r = std::get_if<Register>(&op(i));
    if (r == nullptr || r->is_fp()) unsupported();
    return *r;
  }

  const Imm& imm(size_t i) {
    const auto* v = std::get_if<Imm>(&op(i));
    if (v == nullptr) unsupported();
    return *v;
  }

  uint64_t symbol_address(const std::string& name) {
    auto addr = symbols_.resolve(name);
    if (!addr) trap(TrapKind::kUnresolvedSymbol, name, current_->line);
    return *addr;
  }

  // Value of a data-processing source operand at the given width.
  uint64_t value(const Operand& o, int width) {
    if (const auto* r = std::get_if<Register>(&o)) {
      if (r->is_fp()) unsupported();
      return st().read(*r) & mask(width);
    }
    if (const auto* i = std::get_if<Imm>(&o)) {
      return (static_cast<uint64_t>(i->value) << i->lsl) & mask(width);
    }
    if (const auto* s = std::get_if<ShiftedReg>(&o)) {
      return shift_value(st().read(s->reg), s->op, s->amount, width);
    }
    if (const auto* e = std::get_if<ExtendedReg>(&o)) {
      uint64_t v = extend_value(st().read(e->reg), e->op);
      return (v << e->amount.value_or(0)) & mask(width);
    }
    if (const auto* l = std::get_if<LabelRef>(&o); l && l->modifier == LabelModifier::kLo12) {
      return symbol_address(l->name) & 0xFFF;
    }
    unsupported();
  }

  void set_nz(uint64_t v, int width) {
    st().nzcv = Flags{((v >> (width - 1)) & 1) != 0, (v & mask(width)) == 0, false, false};
  }

  // add/sub family. `subtract` selects a - b, else a + b.
  void arith(const Register& dst, uint64_t a, uint64_t b, bool subtract, bool set_flags,
             int width) {
    AddResult r = subtract ? add_with_carry(a, ~b & mask(width), true, width)
                           : add_with_carry(a, b, false, width);
    if (set_flags) st().nzcv = r.flags;
    st().write(dst, r.value);
  }

  void arith_op(bool subtract, bool set_flags) {
    const Register& d = reg(0);
    int w = d.width();
    uint64_t a = st().read(reg(1)) & mask(w);
    const Operand& rhs = op(2);
    // Negative immediates are the assembler alias for the opposite operation.
    if (const auto* i = std::get_if<Imm>(&rhs); i && i->value < 0) {
      uint64_t b = (static_cast<uint64_t>(-i->value) << i->lsl) & mask(w);
      arith(d, a, b, !subtract, set_flags, w);
      return;
    }
    arith(d, a, value(rhs, w), subtract, set_flags, w);
  }

  void compare(bool negate) {
    const Register& n = reg(0);
    int w = n.width();
    uint64_t a = st().read(n) & mask(w);
    const Operand& rhs = op(1);
    Register sink = w == 32 ? Register::wzr() : Register::xzr();
    if (const auto* i = std::get_if<Imm>(&rhs); i && i->value < 0) {
      uint64_t b = (static_cast<uint64_t>(-i->value) << i->lsl) & mask(w);
      arith(sink, a, b, negate, true, w);
      return;
    }
    arith(sink, a, value(rhs, w), !negate, true, w);
  }

  void logical(const std::string& m) {
    const Register& d = reg(0);
    int w = d.width();
    uint64_t a = st().read(reg(1)) & mask(w);
    uint64_t b = value(op(2), w);
    uint64_t r = 0;
    std::string base = m;
    bool flags = false;
    if (base == "ands" || base == "bics") {
      flags = true;
      base.pop_back();
    }
    if (base == "and") r = a & b;
    else if (base == "orr") r = a | b;
    else if (base == "eor") r = a ^ b;
    else if (base == "bic") r = a & ~b;
    else if (base == "orn") r = a | ~b;
    else if (base == "eon") r = a ^ ~b;
    r &= mask(w);
    if (flags) set_nz(r, w);
    st().write(d, r);
  }

  void shift(ShiftOp kind) {
    const Register& d = reg(0);
    int w = d.width();
    uint64_t a = st().read(reg(1)) & mask(w);
    uint64_t amount = std::holds_alternative<Imm>(op(2))
                          ? static_cast<uint64_t>(imm(2).value)
                          : st().read(reg(2));
    st().write(d, shift_value(a, kind, static_cast<int>(amount % w), w));
  }

  uint64_t mem_address(const Mem& m, uint64_t* writeback) {
    uint64_t base = st().read(m.base);
    if (m.base.is_sp() && (base & 0xF) != 0) {
      trap(TrapKind::kMisaligned, hex(base), current_->line);
    }
    uint64_t offset = 0;
    if (m.index) {
      uint64_t iv = st().read(m.index->reg);
      switch (m.index->op) {
        case IndexOp::kNone:
        case IndexOp::kLsl:
          break;
        case IndexOp::kUxtw: iv &= 0xFFFFFFFFull; break;
        case IndexOp::kSxtw: iv = static_cast<uint64_t>(sign_extend(iv, 32)); break;
        case IndexOp::kSxtx: break;
      }
      offset = iv << m.index->amount.value_or(0);
    } else if (m.lo12) {
      offset = symbol_address(*m.lo12) & 0xFFF;
    } else {
      offset = static_cast<uint64_t>(m.disp);
    }
    switch (m.mode) {
      case AddrMode::kOffset:
        *writeback = base;
        return base + offset;
      case AddrMode::kPreIndex:
        *writeback = base + offset;
        return base + offset;
      case AddrMode::kPostIndex:
        *writeback = base + offset;
        return base;
    }
    return base;
  }

  const Mem& mem_operand(size_t i) {
    const auto* m = std::get_if<Mem>(&op(i));
    if (m == nullptr) {
      if (std::holds_alternative<LabelRef>(op(i))) {
        trap(TrapKind::kUnresolvedSymbol, std::get<LabelRef>(op(i)).name, current_->line);
      }
      unsupported();
    }
    return *m;
  }

  void commit_writeback(const Mem& m, uint64_t wb) {
    if (m.mode != AddrMode::kOffset) st().write(m.base, wb);
  }

  void load(int bytes, bool sign) {
    const Register& t = reg(0);
    const Mem& m = mem_operand(1);
    uint64_t wb = 0;
    uint64_t addr = mem_address(m, &wb);
    uint64_t v = st().load(addr, bytes);
    if (sign) v = static_cast<uint64_t>(sign_extend(v, bytes * 8)) & mask(t.width());
    st().write(t, v);
    commit_writeback(m, wb);
  }

  void store(int bytes) {
    const Register& t = reg(0);
    const Mem& m = mem_operand(1);
    uint64_t wb = 0;
    uint64_t addr = mem_address(m, &wb);
    uint64_t v = st().read(t) & mask(bytes * 8);
    st().store(addr, bytes, v);
    result_.stores.push_back({addr, bytes, v});
    commit_writeback(m, wb);
  }

  void pair(bool is_load, bool sign_word) {
    const Register& a = reg(0);
    const Register& b = reg(1);
    const Mem& m = mem_operand(2);
    int bytes = sign_word ? 4 : a.width() / 8;
    uint64_t wb = 0;
    uint64_t addr = mem_address(m, &wb);
    if (is_load) {
      uint64_t va = st().load(addr, bytes);
      uint64_t vb = st().load(addr + bytes, bytes);
      if (sign_word) {
        va = static_cast<uint64_t>(sign_extend(va, 32));
        vb = static_cast<uint64_t>(sign_extend(vb, 32));
      }
      st().write(a, va);
      st().write(b, vb);
    } else {
      uint64_t va = st().read(a) & mask(bytes * 8);
      uint64_t vb = st().read(b) & mask(bytes * 8);
      st().store(addr, bytes, va);
      st().store(addr + bytes, bytes, vb);
      result_.stores.push_back({addr, bytes, va});
      result_.stores.push_back({addr + bytes, bytes, vb});
    }
    commit_writeback(m, wb);
  }

  void finish(Outcome kind, std::string target) {
    result_.terminator = {kind, std::move(target)};
    finished_ = true;
  }

  std::string label_operand(size_t i) {
    const auto* l = std::get_if<LabelRef>(&op(i));
    if (l == nullptr) unsupported();
    return l->name;
  }

  CondCode cond_operand(size_t i) {
    const auto* c = std::get_if<Cond>(&op(i));
    if (c == nullptr) unsupported();
    return c->code;
  }

  void step(const Instruction& inst) {
    const std::string& m = inst.mnemonic;
    if (m == "nop") return;
    if (m == "mov") {
      const Register& d = reg(0);
      st().write(d, value(op(1), d.width()));
      return;
    }
    if (m == "movz" || m == "movn" || m == "movk") {
      const Register& d = reg(0);
      const Imm& i = imm(1);
      uint64_t chunk = (static_cast<uint64_t>(i.value) & 0xFFFF) << i.lsl;
      uint64_t v = chunk;
      if (m == "movn") v = ~chunk;
      if (m == "movk") v = (st().read(d) & ~(0xFFFFull << i.lsl)) | chunk;
      st().write(d, v & mask(d.width()));
      return;
    }
    if (m == "add") return arith_op(false, false);
    if (m == "adds") return arith_op(false, true);
    if (m == "sub") return arith_op(true, false);
    if (m == "subs") return arith_op(true, true);
    if (m == "cmp") return compare(false);
    if (m == "cmn") return compare(true);
    if (m == "tst") {
      const Register& n = reg(0);
      int w = n.width();
      set_nz((st().read(n) & value(op(1), w)) & mask(w), w);
      return;
    }
    if (m == "neg" || m == "negs") {
      const Register& d = reg(0);
      int w = d.width();
      arith(d, 0, value(op(1), w), true, m == "negs", w);
      return;
    }
    if (m == "mvn") {
      const Register& d = reg(0);
      st().write(d, ~value(op(1), d.width()) & mask(d.width()));
      return;
    }
    if (m == "and" || m == "orr" || m == "eor" || m == "bic" || m == "orn" || m == "eon" ||
        m == "ands" || m == "bics") {
      return logical(m);
    }
    if (m == "lsl") return shift(ShiftOp::kLsl);
    if (m == "lsr") return shift(ShiftOp::kLsr);
    if (m == "asr") return shift(ShiftOp::kAsr);
    if (m == "ror") return shift(ShiftOp::kRor);
    if (m == "mul" || m == "mneg" || m == "madd" || m == "msub") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t p = (value(op(1), w) * value(op(2), w)) & mask(w);
      uint64_t r = p;
      if (m == "mneg") r = (0 - p) & mask(w);
      if (m == "madd") r = (value(op(3), w) + p) & mask(w);
      if (m == "msub") r = (value(op(3), w) - p) & mask(w);
      st().write(d, r);
      return;
    }
    if (m == "udiv" || m == "sdiv") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t a = value(op(1), w);
      uint64_t b = value(op(2), w);
      uint64_t r = 0;
      if (b != 0) {
        if (m == "udiv") {
          r = a / b;
        } else {
          int64_t sa = sign_extend(a, w);
          int64_t sb = sign_extend(b, w);
          // INT_MIN / -1 wraps to INT_MIN.
          if (sb == -1) {
            r = (0 - a) & mask(w);
          } else {
            r = static_cast<uint64_t>(sa / sb) & mask(w);
          }
        }
      }
      st().write(d, r);
      return;
    }
    if (m == "smull" || m == "umull" || m == "smnegl" || m == "umnegl" || m == "smaddl" ||
        m == "umaddl" || m == "smsubl" || m == "umsubl") {
      bool sign = m[0] == 's';
      uint64_t a = st().read(reg(1)) & mask(32);
      uint64_t b = st().read(reg(2)) & mask(32);
      uint64_t p = sign ? static_cast<uint64_t>(sign_extend(a, 32) * sign_extend(b, 32))
                        : a * b;
      if (m.find("neg") != std::string::npos) p = 0 - p;
      if (m.find("addl") != std::string::npos) p = st().read(reg(3)) + p;
      if (m.find("subl") != std::string::npos) p = st().read(reg(3)) - p;
      st().write(reg(0), p);
      return;
    }
    if (m == "smulh" || m == "umulh") {
      uint64_t a = st().read(reg(1));
      uint64_t b = st().read(reg(2));
      uint64_t hi;
      if (m == "smulh") {
        __int128 p = static_cast<__int128>(static_cast<int64_t>(a)) * static_cast<int64_t>(b);
        hi = static_cast<uint64_t>(p >> 64);
      } else {
        unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<uint64_t>(p >> 64);
      }
      st().write(reg(0), hi);
      return;
    }
    if (m == "cset" || m == "csetm") {
      const Register& d = reg(0);
      bool holds = condition_holds(cond_operand(1), st().nzcv);
      st().write(d, holds ? (m == "cset" ? 1 : mask(d.width())) : 0);
      return;
    }
    if (m == "csel" || m == "csinc" || m == "csinv" || m == "csneg") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t a = value(op(1), w);
      uint64_t b = value(op(2), w);
      if (!condition_holds(cond_operand(3), st().nzcv)) {
        if (m == "csinc") b = b + 1;
        if (m == "csinv") b = ~b;
        if (m == "csneg") b = 0 - b;
        a = b;
      }
      st().write(d, a & mask(w));
      return;
    }
    if (m == "cinc" || m == "cinv" || m == "cneg") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t a = value(op(1), w);
      if (condition_holds(cond_operand(2), st().nzcv)) {
        if (m == "cinc") a = a + 1;
        if (m == "cinv") a = ~a;
        if (m == "cneg") a = 0 - a;
      }
      st().write(d, a & mask(w));
      return;
    }
    if (m == "ccmp" || m == "ccmn") {
      const Register& n = reg(0);
      int w = n.width();
      if (condition_holds(cond_operand(3), st().nzcv)) {
        uint64_t a = st().read(n) & mask(w);
        uint64_t b = value(op(1), w);
        AddResult r = m == "ccmp" ? add_with_carry(a, ~b & mask(w), true, w)
                                  : add_with_carry(a, b, false, w);
        st().nzcv = r.flags;
      } else {
        uint64_t f = static_cast<uint64_t>(imm(2).value);
        st().nzcv = Flags{(f & 8) != 0, (f & 4) != 0, (f & 2) != 0, (f & 1) != 0};
      }
      return;
    }
    if (m == "sxtw" || m == "sxtb" || m == "sxth" || m == "uxtb" || m == "uxth") {
      const Register& d = reg(0);
      uint64_t v = st().read(reg(1));
      ExtendOp e = m == "sxtw"   ? ExtendOp::kSxtw
                   : m == "sxtb" ? ExtendOp::kSxtb
                   : m == "sxth" ? ExtendOp::kSxth
                   : m == "uxtb" ? ExtendOp::kUxtb
                                 : ExtendOp::kUxth;
      st().write(d, extend_value(v, e) & mask(d.width()));
      return;
    }
    if (m == "ubfx" || m == "sbfx" || m == "ubfiz" || m == "sbfiz" || m == "bfi" ||
        m == "bfxil") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t src = st().read(reg(1)) & mask(w);
      int lsb = static_cast<int>(imm(2).value);
      int width = static_cast<int>(imm(3).value);
      if (lsb < 0 || width < 1 || lsb + width > w) unsupported();
      uint64_t field_mask = mask(width);
      uint64_t r = 0;
      if (m == "ubfx") r = (src >> lsb) & field_mask;
      if (m == "sbfx") r = static_cast<uint64_t>(sign_extend(src >> lsb, width));
      if (m == "ubfiz") r = (src & field_mask) << lsb;
      if (m == "sbfiz") r = static_cast<uint64_t>(sign_extend(src, width)) << lsb;
      if (m == "bfi") {
        uint64_t cur = st().read(d);
        r = (cur & ~(field_mask << lsb)) | ((src & field_mask) << lsb);
      }
      if (m == "bfxil") {
        uint64_t cur = st().read(d);
        r = (cur & ~field_mask) | ((src >> lsb) & field_mask);
      }
      st().write(d, r & mask(w));
      return;
    }
    if (m == "extr") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t hi = st().read(reg(1)) & mask(w);
      uint64_t lo = st().read(reg(2)) & mask(w);
      int lsb = static_cast<int>(imm(3).value);
      uint64_t r = lsb == 0 ? lo : ((lo >> lsb) | (hi << (w - lsb)));
      st().write(d, r & mask(w));
      return;
    }
    if (m == "clz" || m == "cls" || m == "rbit" || m == "rev") {
      const Register& d = reg(0);
      int w = d.width();
      uint64_t v = st().read(reg(1)) & mask(w);
      uint64_t r = 0;
      if (m == "clz") {
        r = static_cast<uint64_t>(std::countl_zero(v) - (64 - w));
      } else if (m == "cls") {
        uint64_t x = (v ^ (v << 1)) & mask(w);
        r = static_cast<uint64_t>((x == 0 ? w : std::countl_zero(x) - (64 - w)) - 1);
        if (x == 0) r = static_cast<uint64_t>(w - 1);
      } else if (m == "rbit") {
        for (int i = 0; i < w; ++i) {
          if ((v >> i) & 1) r |= 1ull << (w - 1 - i);
        }
      } else {
        for (int i = 0; i < w / 8; ++i) r |= ((v >> (8 * i)) & 0xFF) << (w - 8 - 8 * i);
      }
      st().write(d, r);
      return;
    }
    if (m == "ldr" || m == "ldur") {
      if (std::holds_alternative<LabelRef>(op(1))) {
        trap(TrapKind::kUnresolvedSymbol, std::get<LabelRef>(op(1)).name, inst.line);
      }
      return load(reg(0).width() / 8, false);
    }
    if (m == "ldrb" || m == "ldurb") return load(1, false);
    if (m == "ldrh" || m == "ldurh") return load(2, false);
    if (m == "ldrsb" || m == "ldursb") return load(1, true);
    if (m == "ldrsh" || m == "ldursh") return load(2, true);
    if (m == "ldrsw" || m == "ldursw") return load(4, true);
    if (m == "str" || m == "stur") return store(reg(0).width() / 8);
    if (m == "strb" || m == "sturb") return store(1);
    if (m == "strh" || m == "sturh") return store(2);
    if (m == "ldp") return pair(true, false);
    if (m == "ldpsw") return pair(true, true);
    if (m == "stp") return pair(false, false);
    if (m == "adrp" || m == "adr") {
      uint64_t addr = symbol_address(label_operand(1));
      st().write(reg(0), m == "adrp" ? (addr & ~0xFFFull) : addr);
      return;
    }
    if (m == "ret") return finish(Outcome::kReturned, "");
    if (m == "b") return finish(Outcome::kBranchTaken, label_operand(0));
    if (m == "br") return finish(Outcome::kBranchTaken, reg(0).name());
    if (m == "bl") return finish(Outcome::kCalledExternal, label_operand(0));
    if (m == "blr") return finish(Outcome::kCalledExternal, reg(0).name());
    if (m.rfind("b.", 0) == 0) {
      auto cc = parse_cond(std::string_view(m).substr(2));
      if (!cc) unsupported();
      std::string target = label_operand(0);
      if (condition_holds(*cc, st().nzcv)) return finish(Outcome::kBranchTaken, target);
      return finish(Outcome::kBranchNotTaken, target);
    }
    if (m == "cbz" || m == "cbnz") {
      bool zero = st().read(reg(0)) == 0;
      std::string target = label_operand(1);
      bool taken = (m == "cbz") == zero;
      return finish(taken ? Outcome::kBranchTaken : Outcome::kBranchNotTaken, target);
    }
    if (m == "tbz" || m == "tbnz") {
      int bit = static_cast<int>(imm(1).value);
      bool set = (st().read(reg(0)) >> bit) & 1;
      std::string target = label_operand(2);
      bool taken = (m == "tbnz") == set;
      return finish(taken ? Outcome::kBranchTaken : Outcome::kBranchNotTaken, target);
    }
    unsupported();
  }

  const SymbolTable& symbols_;
  ExecutionResult result_;
  const Instruction* current_ = nullptr;
  bool finished_ = false;
};

}  // namespace

uint8_t MachineState::load_byte(uint64_t addr) const {
  auto it = mem.find(addr);
  if (it != mem.end()) return it->second;
  return static_cast<uint8_t>(mix_seed(seed ^ 0xA5A5A5A5ull, addr));
}

uint64_t MachineState::load(uint64_t addr, int bytes) const {
  uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(load_byte(addr + i)) << (8 * i);
  return v;
}

void MachineState::store(uint64_t addr, int bytes, uint64_t value) {
  for (int i = 0; i < bytes; ++i) mem[addr + i] = static_cast<uint8_t>(value >> (8 * i));
}

uint64_t MachineState::read(const Register& r) const {
  switch (r.kind) {
    case RegKind::kGpr32: return x[r.index] & 0xFFFFFFFFull;
    case RegKind::kGpr64: return x[r.index];
    case RegKind::kSp: return sp;
    case RegKind::kWzr:
    case RegKind::kXzr:
      return 0;
    default:
      return 0;
  }
}

void MachineState::write(const Register& r, uint64_t value) {
  switch (r.kind) {
    case RegKind::kGpr32: x[r.index] = value & 0xFFFFFFFFull; break;
    case RegKind::kGpr64: x[r.index] = value; break;
    case RegKind::kSp: sp = value; break;
    default: break;
  }
}

MachineState init_state(uint64_t seed) {
  MachineState s;
  s.seed = seed;
  for (int i = 0; i < 31; ++i) {
    uint64_t r = mix_seed(seed, static_cast<uint64_t>(i));
    uint64_t v = mix_seed(r, 0x1234);
    // Mix in small, zero and negative values so that flag- and
    // branch-dependent paths get exercised.
    switch (r & 7) {
      case 0: s.x[i] = 0; break;
      case 1: s.x[i] = v & 0xF; break;
      case 2: s.x[i] = static_cast<uint64_t>(-static_cast<int64_t>((v & 0xF) + 1)); break;
      case 3: s.x[i] = v & 0xFFFFFFFFull; break;
      case 4: s.x[i] = (v & 0xFFFFFFFF00000000ull) | 0xFFFFFFFFull; break;
      default: s.x[i] = v; break;
    }
  }
  s.sp = MachineState::kInitialSp;
  return s;
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kReturned: return "Returned";
    case Outcome::kBranchTaken: return "BranchTaken";
    case Outcome::kBranchNotTaken: return "BranchNotTaken";
    case Outcome::kCalledExternal: return "CalledExternal";
    case Outcome::kFellThrough: return "FellThrough";
  }
  return "?";
}

SymbolTable SymbolTable::synthetic() { return SymbolTable(); }

SymbolTable SymbolTable::closed(std::map<std::string, uint64_t> entries) {
  SymbolTable t;
  t.open_ = false;
  t.entries_ = std::move(entries);
  return t;
}

std::optional<uint64_t> SymbolTable::resolve(const std::string& name) const {
  auto it = entries_.find(name);
  if (it != entries_.end()) return it->second;
  if (!open_ || name.empty()) return std::nullopt;
  // 0x1000_0000 + page index in [0, 2^20).
  return 0x10000000ull + (fnv1a64(name) % (1ull << 20)) * 0x1000ull;
}

ExecutionResult run_block(MachineState state, const BasicBlock& block,
                          const SymbolTable& symbols) {
  return Executor(std::move(state), symbols).run(block);
}

AddResult add_with_carry(uint64_t a, uint64_t b, bool carry_in, int width) {
  a &= mask(width);
  b &= mask(width);
  unsigned __int128 usum = static_cast<unsigned __int128>(a) + b + (carry_in ? 1 : 0);
  __int128 ssum = static_cast<__int128>(sign_extend(a, width)) + sign_extend(b, width) +
                  (carry_in ? 1 : 0);
  uint64_t result = static_cast<uint64_t>(usum) & mask(width);
  Flags f;
  f.n = ((result >> (width - 1)) & 1) != 0;
  f.z = result == 0;
  f.c = static_cast<unsigned __int128>(result) != usum;
  f.v = static_cast<__int128>(sign_extend(result, width)) != ssum;
  return {result, f};
}

bool condition_holds(CondCode cond, const Flags& f) {
  bool r = false;
  switch (static_cast<CondCode>(static_cast<uint8_t>(cond) & ~1u)) {
    case CondCode::kEq: r = f.z; break;
    case CondCode::kHs: r = f.c; break;
    case CondCode::kMi: r = f.n; break;
    case CondCode::kVs: r = f.v; break;
    case CondCode::kHi: r = f.c && !f.z; break;
    case CondCode::kGe: r = f.n == f.v; break;
    case CondCode::kGt: r = !f.z && f.n == f.v; break;
    case CondCode::kAl: return true;
    default: break;
  }
  // Odd encodings are the negations, except nv which behaves as al.
  return (static_cast<uint8_t>(cond) & 1u) ? !r : r;
}

}  // namespace peepbench
