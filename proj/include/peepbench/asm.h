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

// Data model, parser and canonical printer for straight-line AArch64 basic
// blocks in LLVM textual syntax.
//
// The parser is deliberately permissive: anything that lexes becomes an
// Instruction, including mnemonics the validator later rejects ("movsl") and
// malformed tokens ("#r", "x45"), so that model output can be scored rather
// than discarded. Structural checks live in validate.h.

#ifndef PEEPBENCH_ASM_H_
#define PEEPBENCH_ASM_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace peepbench {

enum class RegKind : uint8_t {
  kGpr32,  // w0..w30
  kGpr64,  // x0..x30
  kSp,
  kWzr,
  kXzr,
  // Scalar FP/SIMD views; parsed and validated, never executed.
  kFpB,
  kFpH,
  kFpS,
  kFpD,
  kFpQ,
};

struct Register {
  RegKind kind = RegKind::kGpr64;
  uint8_t index = 0;  // meaningful for GPR and FP kinds only

  static Register w(int i) { return {RegKind::kGpr32, static_cast<uint8_t>(i)}; }
  static Register x(int i) { return {RegKind::kGpr64, static_cast<uint8_t>(i)}; }
  static Register sp() { return {RegKind::kSp, 0}; }
  static Register wzr() { return {RegKind::kWzr, 0}; }
  static Register xzr() { return {RegKind::kXzr, 0}; }

  // Accepts canonical names plus the fp/lr aliases. Returns nullopt for
  // anything that is not a register name, including out-of-range indices.
  static std::optional<Register> parse(std::string_view text);

  std::string name() const;

  bool is_gpr() const {
    return kind == RegKind::kGpr32 || kind == RegKind::kGpr64 ||
           kind == RegKind::kSp || kind == RegKind::kWzr ||
           kind == RegKind::kXzr;
  }
  bool is_fp() const { return !is_gpr(); }
  bool is_zero() const { return kind == RegKind::kWzr || kind == RegKind::kXzr; }
  bool is_sp() const { return kind == RegKind::kSp; }
  // 32 for w/wzr, 64 for x/xzr/sp; FP widths for FP kinds.
  int width() const;
  bool is_32() const { return width() == 32 && is_gpr(); }

  // Architectural slot shared by the W and X views: 0..30, kZeroSlot or
  // kSpSlot. FP registers return kNoSlot.
  static constexpr int kZeroSlot = 31;
  static constexpr int kSpSlot = 32;
  static constexpr int kNoSlot = -1;
  int slot() const;

  // Same slot, requested width (32 or 64). sp is returned unchanged.
  Register with_width(int bits) const;

  friend bool operator==(const Register&, const Register&) = default;
};

struct Imm {
  int64_t value = 0;
  bool hex = false;  // source spelled it in hex; printing preserves it
  int lsl = 0;       // optional ", lsl #n" suffix (add/sub/movz forms)
  friend bool operator==(const Imm&, const Imm&) = default;
};

// Floating-point literal (fmov d0, #1.0); kept as text.
struct FpImm {
  std::string text;
  friend bool operator==(const FpImm&, const FpImm&) = default;
};

enum class ShiftOp : uint8_t { kLsl, kLsr, kAsr, kRor };

struct ShiftedReg {
  Register reg;
  ShiftOp op = ShiftOp::kLsl;
  int amount = 0;
  friend bool operator==(const ShiftedReg&, const ShiftedReg&) = default;
};

enum class ExtendOp : uint8_t {
  kUxtb, kUxth, kUxtw, kUxtx, kSxtb, kSxth, kSxtw, kSxtx,
};

struct ExtendedReg {
  Register reg;
  ExtendOp op = ExtendOp::kUxtw;
  std::optional<int> amount;
  friend bool operator==(const ExtendedReg&, const ExtendedReg&) = default;
};

// Register offset inside a memory operand: [base, index{, op #amount}].
enum class IndexOp : uint8_t { kNone, kLsl, kUxtw, kSxtw, kSxtx };

struct MemIndex {
  Register reg;
  IndexOp op = IndexOp::kNone;
  std::optional<int> amount;
  friend bool operator==(const MemIndex&, const MemIndex&) = default;
};

enum class AddrMode : uint8_t { kOffset, kPreIndex, kPostIndex };

struct Mem {
  Register base = Register::sp();
  std::optional<MemIndex> index;
  int64_t disp = 0;
  bool disp_hex = false;
  std::optional<std::string> lo12;  // [x0, :lo12:sym]
  AddrMode mode = AddrMode::kOffset;
  friend bool operator==(const Mem&, const Mem&) = default;
};

enum class LabelModifier : uint8_t { kNone, kLo12 };

struct LabelRef {
  std::string name;
  LabelModifier modifier = LabelModifier::kNone;
  friend bool operator==(const LabelRef&, const LabelRef&) = default;
};

enum class CondCode : uint8_t {
  kEq, kNe, kHs, kLo, kMi, kPl, kVs, kVc, kHi, kLs, kGe, kLt, kGt, kLe, kAl, kNv,
};

std::optional<CondCode> parse_cond(std::string_view text);
std::string_view cond_name(CondCode c);
CondCode invert_cond(CondCode c);

struct Cond {
  CondCode code = CondCode::kEq;
  friend bool operator==(const Cond&, const Cond&) = default;
};

enum class MalformedKind : uint8_t { kImmediate, kRegister, kLabel };

// A token that lexes but cannot be a well-formed operand: "#r", "x45",
// ":foo:sym". Kept verbatim so validation and error taxonomy can point at it.
struct Malformed {
  std::string text;
  MalformedKind kind = MalformedKind::kImmediate;
  friend bool operator==(const Malformed&, const Malformed&) = default;
};

using Operand = std::variant<Register, Imm, FpImm, ShiftedReg, ExtendedReg,
                             Mem, LabelRef, Cond, Malformed>;

struct Instruction {
  std::string mnemonic;  // lowercase
  std::vector<Operand> operands;
  std::string raw;  // source line including any comment
  int line = 0;

  // Structural equality: mnemonic and operands. raw/line are provenance.
  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.mnemonic == b.mnemonic && a.operands == b.operands;
  }
};

struct Directive {
  std::string text;  // trimmed, without comment, whitespace collapsed
  friend bool operator==(const Directive&, const Directive&) = default;
};

struct Label {
  std::string name;
  friend bool operator==(const Label&, const Label&) = default;
};

using BlockItem = std::variant<Instruction, Directive, Label>;

enum class TerminatorKind : uint8_t { kNone, kRet, kBranch, kCondBranch, kCall };

struct Terminator {
  TerminatorKind kind = TerminatorKind::kNone;
  std::string mnemonic;
  std::string target;
  friend bool operator==(const Terminator&, const Terminator&) = default;
};

// ret, b, b.<cond>, cbz, cbnz, tbz, tbnz, bl, blr, br.
bool is_terminator_mnemonic(std::string_view mnemonic);

enum class ParseErrorKind : uint8_t {
  kEmptyInput,
  kUnlexableToken,
  kTerminatorNotLast,
};

std::string_view parse_error_kind_name(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& message);
  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  ParseErrorKind kind_;
  int line_;
};

class BasicBlock {
 public:
  BasicBlock() = default;
  // Computes the terminator; throws ParseError(kTerminatorNotLast) when a
  // terminator-class instruction is followed by another instruction.
  explicit BasicBlock(std::vector<BlockItem> items);

  const std::vector<BlockItem>& items() const { return items_; }
  const Terminator& terminator() const { return terminator_; }

  std::vector<const Instruction*> instructions() const;
  int instruction_count() const;

  friend bool operator==(const BasicBlock& a, const BasicBlock& b) {
    return a.items_ == b.items_;
  }

 private:
  std::vector<BlockItem> items_;
  Terminator terminator_;
};

// Splits on real newlines and on the two-character escape "\n".
std::vector<std::string> split_block_lines(std::string_view text);

// Parses one line. Returns nullopt for blank or comment-only lines.
std::optional<BlockItem> parse_line(std::string_view line, int line_number);

BasicBlock parse_block(std::string_view text);

// Parses a single instruction line; throws ParseError if it is not one.
Instruction parse_instruction(std::string_view text);

std::optional<BasicBlock> try_parse_block(std::string_view text);

std::string print_operand(const Operand& op);
std::string print_instruction(const Instruction& inst);
std::string print_item(const BlockItem& item);
// Canonical text: one item per line joined by '\n', no trailing newline.
std::string print_block(const BasicBlock& block);

// Convenience constructor for rewrites and tests.
Instruction make_instruction(std::string mnemonic, std::vector<Operand> operands);

}  // namespace peepbench

#endif  // PEEPBENCH_ASM_H_
