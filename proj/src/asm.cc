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

#include "peepbench/asm.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>

namespace peepbench {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '$' || c == '@';
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s.front())) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

// Parses "[-+]?(0x[0-9a-f]+|[0-9]+)". Hex literals may use the full unsigned
// 64-bit range and are reinterpreted as two's complement.
std::optional<Imm> parse_int_literal(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  Imm imm;
  uint64_t magnitude = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    std::string_view digits = s.substr(2);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(),
                                     magnitude, 16);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      return std::nullopt;
    }
    imm.hex = true;
  } else {
    if (!all_digits(s)) return std::nullopt;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), magnitude, 10);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    if (!negative && magnitude > static_cast<uint64_t>(INT64_MAX)) {
      return std::nullopt;
    }
    if (negative && magnitude > static_cast<uint64_t>(INT64_MAX) + 1) {
      return std::nullopt;
    }
  }
  imm.value = negative ? static_cast<int64_t>(0 - magnitude)
                       : static_cast<int64_t>(magnitude);
  return imm;
}

bool looks_like_fp_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) {
    return false;
  }
  bool dot = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) continue;
    if (c == '.' && !dot) {
      dot = true;
      continue;
    }
    if ((c == 'e' || c == 'E') && i + 1 < s.size()) {
      std::string_view rest = s.substr(i + 1);
      if (rest.front() == '-' || rest.front() == '+') rest.remove_prefix(1);
      return dot && all_digits(rest);
    }
    return false;
  }
  return dot;
}

// Register-shaped tokens outside the architectural range (w31, x45, s40).
bool looks_like_bad_register(std::string_view s) {
  if (s.size() < 2) return false;
  char p = s.front();
  if (p != 'w' && p != 'x' && p != 's' && p != 'd' && p != 'q' && p != 'h' &&
      p != 'b') {
    return false;
  }
  return all_digits(s.substr(1));
}

struct ShiftName {
  std::string_view name;
  bool is_shift;
  ShiftOp shift;
  ExtendOp extend;
};

constexpr std::array<ShiftName, 12> kShiftNames = {{
    {"lsl", true, ShiftOp::kLsl, ExtendOp::kUxtx},
    {"lsr", true, ShiftOp::kLsr, ExtendOp::kUxtx},
    {"asr", true, ShiftOp::kAsr, ExtendOp::kUxtx},
    {"ror", true, ShiftOp::kRor, ExtendOp::kUxtx},
    {"uxtb", false, ShiftOp::kLsl, ExtendOp::kUxtb},
    {"uxth", false, ShiftOp::kLsl, ExtendOp::kUxth},
    {"uxtw", false, ShiftOp::kLsl, ExtendOp::kUxtw},
    {"uxtx", false, ShiftOp::kLsl, ExtendOp::kUxtx},
    {"sxtb", false, ShiftOp::kLsl, ExtendOp::kSxtb},
    {"sxth", false, ShiftOp::kLsl, ExtendOp::kSxth},
    {"sxtw", false, ShiftOp::kLsl, ExtendOp::kSxtw},
    {"sxtx", false, ShiftOp::kLsl, ExtendOp::kSxtx},
}};

std::string_view shift_name(ShiftOp op) {
  switch (op) {
    case ShiftOp::kLsl: return "lsl";
    case ShiftOp::kLsr: return "lsr";
    case ShiftOp::kAsr: return "asr";
    case ShiftOp::kRor: return "ror";
  }
  return "lsl";
}

std::string_view extend_name(ExtendOp op) {
  for (const auto& s : kShiftNames) {
    if (!s.is_shift && s.extend == op) return s.name;
  }
  return "uxtw";
}

std::string_view index_op_name(IndexOp op) {
  switch (op) {
    case IndexOp::kNone: return "";
    case IndexOp::kLsl: return "lsl";
    case IndexOp::kUxtw: return "uxtw";
    case IndexOp::kSxtw: return "sxtw";
    case IndexOp::kSxtx: return "sxtx";
  }
  return "";
}

// "lsl #2", "sxtw", "sxtw #2". Returns the name entry and optional amount.
struct Modifier {
  const ShiftName* name = nullptr;
  std::optional<int> amount;
};

std::optional<Modifier> parse_modifier(std::string_view token) {
  token = trim(token);
  size_t sp = token.find_first_of(" \t");
  std::string head = lower(token.substr(0, sp));
  const ShiftName* found = nullptr;
  for (const auto& s : kShiftNames) {
    if (s.name == head) found = &s;
  }
  if (found == nullptr) return std::nullopt;
  Modifier m;
  m.name = found;
  if (sp == std::string_view::npos) return m;
  std::string_view rest = trim(token.substr(sp));
  if (!rest.empty() && rest.front() == '#') rest.remove_prefix(1);
  if (!all_digits(rest) || rest.size() > 3) return std::nullopt;
  m.amount = std::stoi(std::string(rest));
  return m;
}

bool takes_condition(std::string_view mnemonic) {
  static constexpr std::array<std::string_view, 12> kCondMnemonics = {
      "cset", "csetm", "csel", "csinc", "csinv", "csneg",
      "cinc", "cinv", "cneg", "ccmp", "ccmn", "fcsel"};
  return std::find(kCondMnemonics.begin(), kCondMnemonics.end(), mnemonic) !=
         kCondMnemonics.end();
}

[[noreturn]] void unlexable(int line, std::string_view token) {
  throw ParseError(ParseErrorKind::kUnlexableToken, line,
                   "unlexable token '" + std::string(token) + "'");
}

// Splits on commas that are not inside brackets.
std::vector<std::string_view> split_operands(std::string_view text, int line) {
  std::vector<std::string_view> parts;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '[') ++depth;
    if (c == ']') {
      if (--depth < 0) unlexable(line, text);
    }
    if (c == ',' && depth == 0) {
      parts.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) unlexable(line, text);
  parts.push_back(trim(text.substr(start)));
  return parts;
}

std::optional<Operand> parse_label_like(std::string_view tok) {
  if (tok.size() > 1 && tok.front() == ':') {
    size_t close = tok.find(':', 1);
    if (close == std::string_view::npos) return std::nullopt;
    std::string mod = lower(tok.substr(1, close - 1));
    std::string_view name = tok.substr(close + 1);
    if (!is_identifier(name)) return std::nullopt;
    if (mod == "lo12") return LabelRef{std::string(name), LabelModifier::kLo12};
    return Malformed{std::string(tok), MalformedKind::kLabel};
  }
  if (is_identifier(tok)) return LabelRef{std::string(tok), LabelModifier::kNone};
  return std::nullopt;
}

Operand parse_immediate_token(std::string_view body) {
  // body excludes the leading '#'.
  if (auto imm = parse_int_literal(body)) return *imm;
  if (looks_like_fp_literal(body)) return FpImm{std::string(body)};
  if (!body.empty() && body.front() == ':') {
    if (auto lab = parse_label_like(body)) return *lab;
  }
  return Malformed{"#" + std::string(body), MalformedKind::kImmediate};
}

Mem parse_mem(std::string_view tok, int line) {
  // tok starts with '['.
  size_t close = tok.find(']');
  if (close == std::string_view::npos) unlexable(line, tok);
  std::string_view inner = tok.substr(1, close - 1);
  std::string_view after = trim(tok.substr(close + 1));
  Mem mem;
  if (after == "!") {
    mem.mode = AddrMode::kPreIndex;
  } else if (!after.empty()) {
    unlexable(line, tok);
  }
  std::vector<std::string_view> parts = split_operands(inner, line);
  if (parts.empty() || parts.size() > 3) unlexable(line, tok);
  auto base = Register::parse(lower(parts[0]));
  if (!base) unlexable(line, parts[0]);
  mem.base = *base;
  if (parts.size() >= 2) {
    std::string_view second = parts[1];
    if (second.empty()) unlexable(line, tok);
    if (second.front() == '#') {
      auto imm = parse_int_literal(second.substr(1));
      if (imm) {
        mem.disp = imm->value;
        mem.disp_hex = imm->hex;
      } else if (second.size() > 1 && second[1] == ':') {
        auto lab = parse_label_like(second.substr(1));
        if (!lab || !std::holds_alternative<LabelRef>(*lab)) unlexable(line, second);
        mem.lo12 = std::get<LabelRef>(*lab).name;
      } else {
        unlexable(line, second);
      }
      if (parts.size() == 3) unlexable(line, tok);
    } else if (second.front() == ':') {
      auto lab = parse_label_like(second);
      if (!lab || !std::holds_alternative<LabelRef>(*lab) ||
          std::get<LabelRef>(*lab).modifier != LabelModifier::kLo12) {
        unlexable(line, second);
      }
      mem.lo12 = std::get<LabelRef>(*lab).name;
      if (parts.size() == 3) unlexable(line, tok);
    } else {
      auto idx = Register::parse(lower(second));
      if (!idx) unlexable(line, second);
      MemIndex index{*idx, IndexOp::kNone, std::nullopt};
      if (parts.size() == 3) {
        auto mod = parse_modifier(parts[2]);
        if (!mod) unlexable(line, parts[2]);
        std::string_view n = mod->name->name;
        if (n == "lsl") {
          index.op = IndexOp::kLsl;
        } else if (n == "uxtw") {
          index.op = IndexOp::kUxtw;
        } else if (n == "sxtw") {
          index.op = IndexOp::kSxtw;
        } else if (n == "sxtx") {
          index.op = IndexOp::kSxtx;
        } else {
          unlexable(line, parts[2]);
        }
        if (index.op == IndexOp::kLsl && !mod->amount) unlexable(line, parts[2]);
        index.amount = mod->amount;
      }
      mem.index = index;
    }
  }
  return mem;
}

Operand parse_operand(std::string_view tok, std::string_view mnemonic, int line) {
  if (tok.empty()) unlexable(line, "<empty operand>");
  if (tok.front() == '[') return parse_mem(tok, line);
  if (tok.front() == '#') return parse_immediate_token(tok.substr(1));
  std::string low = lower(tok);
  if (auto reg = Register::parse(low)) return *reg;
  if (takes_condition(mnemonic)) {
    if (auto cc = parse_cond(low)) return Cond{*cc};
  }
  if (auto imm = parse_int_literal(tok)) return *imm;
  if (looks_like_bad_register(low)) {
    return Malformed{std::string(tok), MalformedKind::kRegister};
  }
  if (auto lab = parse_label_like(tok)) return *lab;
  unlexable(line, tok);
}

bool is_load_store(std::string_view m) {
  return m.size() >= 2 && ((m[0] == 'l' && m[1] == 'd') || (m[0] == 's' && m[1] == 't'));
}

std::string strip_comment(std::string_view line) {
  size_t pos = line.find("//");
  return std::string(trim(pos == std::string_view::npos ? line : line.substr(0, pos)));
}

std::string format_hex(uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

std::string format_int(int64_t value, bool hex) {
  if (!hex) return std::to_string(value);
  if (value < 0) return "-" + format_hex(0 - static_cast<uint64_t>(value));
  return format_hex(static_cast<uint64_t>(value));
}

Terminator terminator_for(const Instruction& inst) {
  const std::string& m = inst.mnemonic;
  auto label_target = [&](size_t i) -> std::string {
    if (i < inst.operands.size()) {
      if (const auto* l = std::get_if<LabelRef>(&inst.operands[i])) return l->name;
    }
    return "";
  };
  if (m == "ret") return {TerminatorKind::kRet, m, ""};
  if (m == "b" || m == "br") return {TerminatorKind::kBranch, m, label_target(0)};
  if (m == "bl" || m == "blr") return {TerminatorKind::kCall, m, label_target(0)};
  if (m.rfind("b.", 0) == 0) return {TerminatorKind::kCondBranch, m, label_target(0)};
  if (m == "cbz" || m == "cbnz") return {TerminatorKind::kCondBranch, m, label_target(1)};
  if (m == "tbz" || m == "tbnz") return {TerminatorKind::kCondBranch, m, label_target(2)};
  return {};
}

}  // namespace

std::optional<Register> Register::parse(std::string_view text) {
  if (text == "sp") return sp();
  if (text == "wzr") return wzr();
  if (text == "xzr") return xzr();
  if (text == "fp") return x(29);
  if (text == "lr") return x(30);
  if (text.size() < 2 || !all_digits(text.substr(1)) || text.size() > 3) {
    return std::nullopt;
  }
  int idx = std::stoi(std::string(text.substr(1)));
  switch (text.front()) {
    case 'w':
      if (idx <= 30) return w(idx);
      return std::nullopt;
    case 'x':
      if (idx <= 30) return x(idx);
      return std::nullopt;
    case 'b':
    case 'h':
    case 's':
    case 'd':
    case 'q': {
      if (idx > 31) return std::nullopt;
      RegKind k = text.front() == 'b'   ? RegKind::kFpB
                  : text.front() == 'h' ? RegKind::kFpH
                  : text.front() == 's' ? RegKind::kFpS
                  : text.front() == 'd' ? RegKind::kFpD
                                        : RegKind::kFpQ;
      return Register{k, static_cast<uint8_t>(idx)};
    }
    default:
      return std::nullopt;
  }
}

std::string Register::name() const {
  switch (kind) {
    case RegKind::kGpr32: return "w" + std::to_string(index);
    case RegKind::kGpr64: return "x" + std::to_string(index);
    case RegKind::kSp: return "sp";
    case RegKind::kWzr: return "wzr";
    case RegKind::kXzr: return "xzr";
    case RegKind::kFpB: return "b" + std::to_string(index);
    case RegKind::kFpH: return "h" + std::to_string(index);
    case RegKind::kFpS: return "s" + std::to_string(index);
    case RegKind::kFpD: return "d" + std::to_string(index);
    case RegKind::kFpQ: return "q" + std::to_string(index);
  }
  return "?";
}

int Register::width() const {
  switch (kind) {
    case RegKind::kGpr32:
    case RegKind::kWzr:
    case RegKind::kFpS:
      return 32;
    case RegKind::kGpr64:
    case RegKind::kXzr:
    case RegKind::kSp:
    case RegKind::kFpD:
      return 64;
    case RegKind::kFpB: return 8;
    case RegKind::kFpH: return 16;
    case RegKind::kFpQ: return 128;
  }
  return 64;
}

int Register::slot() const {
  switch (kind) {
    case RegKind::kGpr32:
    case RegKind::kGpr64:
      return index;
    case RegKind::kWzr:
    case RegKind::kXzr:
      return kZeroSlot;
    case RegKind::kSp:
      return kSpSlot;
    default:
      return kNoSlot;
  }
}

Register Register::with_width(int bits) const {
  switch (kind) {
    case RegKind::kGpr32:
    case RegKind::kGpr64:
      return bits == 32 ? w(index) : x(index);
    case RegKind::kWzr:
    case RegKind::kXzr:
      return bits == 32 ? wzr() : xzr();
    default:
      return *this;
  }
}

namespace {
constexpr std::array<std::pair<std::string_view, CondCode>, 18> kCondNames = {{
    {"eq", CondCode::kEq}, {"ne", CondCode::kNe}, {"hs", CondCode::kHs},
    {"cs", CondCode::kHs}, {"lo", CondCode::kLo}, {"cc", CondCode::kLo},
    {"mi", CondCode::kMi}, {"pl", CondCode::kPl}, {"vs", CondCode::kVs},
    {"vc", CondCode::kVc}, {"hi", CondCode::kHi}, {"ls", CondCode::kLs},
    {"ge", CondCode::kGe}, {"lt", CondCode::kLt}, {"gt", CondCode::kGt},
    {"le", CondCode::kLe}, {"al", CondCode::kAl}, {"nv", CondCode::kNv},
}};
}  // namespace

std::optional<CondCode> parse_cond(std::string_view text) {
  for (const auto& [name, code] : kCondNames) {
    if (name == text) return code;
  }
  return std::nullopt;
}

std::string_view cond_name(CondCode c) {
  for (const auto& [name, code] : kCondNames) {
    if (code == c) return name;  // first spelling is canonical
  }
  return "al";
}

CondCode invert_cond(CondCode c) {
  return static_cast<CondCode>(static_cast<uint8_t>(c) ^ 1u);
}

bool is_terminator_mnemonic(std::string_view m) {
  return m == "ret" || m == "b" || m == "br" || m == "bl" || m == "blr" ||
         m == "cbz" || m == "cbnz" || m == "tbz" || m == "tbnz" ||
         m.rfind("b.", 0) == 0;
}

std::string_view parse_error_kind_name(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kEmptyInput: return "EmptyInput";
    case ParseErrorKind::kUnlexableToken: return "UnlexableToken";
    case ParseErrorKind::kTerminatorNotLast: return "TerminatorNotLast";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      kind_(kind),
      line_(line) {}

BasicBlock::BasicBlock(std::vector<BlockItem> items) : items_(std::move(items)) {
  const Instruction* seen_terminator = nullptr;
  for (const auto& item : items_) {
    const auto* inst = std::get_if<Instruction>(&item);
    if (inst == nullptr) continue;
    if (seen_terminator != nullptr) {
      throw ParseError(ParseErrorKind::kTerminatorNotLast, seen_terminator->line,
                       "'" + seen_terminator->mnemonic +
                           "' must be the last instruction of a basic block");
    }
    if (is_terminator_mnemonic(inst->mnemonic)) {
      seen_terminator = inst;
      terminator_ = terminator_for(*inst);
    }
  }
}

std::vector<const Instruction*> BasicBlock::instructions() const {
  std::vector<const Instruction*> out;
  for (const auto& item : items_) {
    if (const auto* inst = std::get_if<Instruction>(&item)) out.push_back(inst);
  }
  return out;
}

int BasicBlock::instruction_count() const {
  return static_cast<int>(std::count_if(items_.begin(), items_.end(), [](const auto& it) {
    return std::holds_alternative<Instruction>(it);
  }));
}

std::vector<std::string> split_block_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      lines.push_back(std::move(current));
      current.clear();
    } else if (c == '\\' && i + 1 < text.size() && text[i + 1] == 'n') {
      lines.push_back(std::move(current));
      current.clear();
      ++i;
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  lines.push_back(std::move(current));
  return lines;
}

namespace {

// Collapses whitespace runs outside string literals to one space, so
// ".cfi_def_cfa_offset\t16" and ".cfi_def_cfa_offset 16" print alike.
std::string canonical_directive(std::string_view text) {
  std::string out;
  bool in_string = false;
  bool pending_space = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (!in_string && (c == ' ' || c == '\t')) {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
    if (c == '"' && (i == 0 || text[i - 1] != '\\')) in_string = !in_string;
  }
  return out;
}

}  // namespace

std::optional<BlockItem> parse_line(std::string_view raw_line, int line_number) {
  std::string body = strip_comment(raw_line);
  if (body.empty()) return std::nullopt;
  std::string_view text = body;

  if (text.back() == ':' && is_identifier(text.substr(0, text.size() - 1))) {
    return Label{std::string(text.substr(0, text.size() - 1))};
  }
  if (text.front() == '.') {
    // A leading-dot token that is not a label is an assembler directive.
    return Directive{canonical_directive(text)};
  }

  size_t sp = text.find_first_of(" \t");
  std::string_view head = text.substr(0, sp);
  std::string mnemonic = lower(head);
  if (mnemonic.empty() || !std::isalpha(static_cast<unsigned char>(mnemonic.front())) ||
      !std::all_of(mnemonic.begin(), mnemonic.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_';
      })) {
    unlexable(line_number, head);
  }

  Instruction inst;
  inst.mnemonic = mnemonic;
  inst.raw = std::string(trim(raw_line));
  inst.line = line_number;
  if (sp == std::string_view::npos) return inst;

  std::string_view rest = trim(text.substr(sp));
  if (rest.empty()) return inst;
  for (std::string_view tok : split_operands(rest, line_number)) {
    if (auto mod = parse_modifier(tok); mod && !inst.operands.empty()) {
      Operand& prev = inst.operands.back();
      if (auto* reg = std::get_if<Register>(&prev); reg && reg->is_gpr()) {
        if (mod->name->is_shift) {
          if (!mod->amount) unlexable(line_number, tok);
          prev = ShiftedReg{*reg, mod->name->shift, *mod->amount};
        } else {
          prev = ExtendedReg{*reg, mod->name->extend, mod->amount};
        }
        continue;
      }
      if (auto* imm = std::get_if<Imm>(&prev);
          imm && mod->name->name == "lsl" && mod->amount && imm->lsl == 0) {
        imm->lsl = *mod->amount;
        continue;
      }
      unlexable(line_number, tok);
    }
    inst.operands.push_back(parse_operand(tok, mnemonic, line_number));
  }

  // "[sp], #16" is a post-indexed memory operand.
  size_t n = inst.operands.size();
  if (n >= 2 && is_load_store(mnemonic)) {
    auto* mem = std::get_if<Mem>(&inst.operands[n - 2]);
    auto* imm = std::get_if<Imm>(&inst.operands[n - 1]);
    if (mem && imm && mem->mode == AddrMode::kOffset && !mem->index &&
        mem->disp == 0 && !mem->lo12 && imm->lsl == 0) {
      mem->mode = AddrMode::kPostIndex;
      mem->disp = imm->value;
      mem->disp_hex = imm->hex;
      inst.operands.pop_back();
    }
  }
  return inst;
}

BasicBlock parse_block(std::string_view text) {
  std::vector<BlockItem> items;
  int line_number = 0;
  for (const std::string& line : split_block_lines(text)) {
    ++line_number;
    if (auto item = parse_line(line, line_number)) items.push_back(std::move(*item));
  }
  if (items.empty()) {
    throw ParseError(ParseErrorKind::kEmptyInput, 1, "no instructions, labels or directives");
  }
  return BasicBlock(std::move(items));
}

std::optional<BasicBlock> try_parse_block(std::string_view text) {
  try {
    return parse_block(text);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

Instruction parse_instruction(std::string_view text) {
  auto item = parse_line(text, 1);
  if (!item || !std::holds_alternative<Instruction>(*item)) {
    throw ParseError(ParseErrorKind::kUnlexableToken, 1,
                     "not an instruction: '" + std::string(text) + "'");
  }
  return std::get<Instruction>(std::move(*item));
}

std::string print_operand(const Operand& op) {
  struct Printer {
    std::string operator()(const Register& r) const { return r.name(); }
    std::string operator()(const Imm& i) const {
      std::string s = "#" + format_int(i.value, i.hex);
      if (i.lsl != 0) s += ", lsl #" + std::to_string(i.lsl);
      return s;
    }
    std::string operator()(const FpImm& f) const { return "#" + f.text; }
    std::string operator()(const ShiftedReg& s) const {
      return s.reg.name() + ", " + std::string(shift_name(s.op)) + " #" +
             std::to_string(s.amount);
    }
    std::string operator()(const ExtendedReg& e) const {
      std::string s = e.reg.name() + ", " + std::string(extend_name(e.op));
      if (e.amount) s += " #" + std::to_string(*e.amount);
      return s;
    }
    std::string operator()(const Mem& m) const {
      std::string s = "[" + m.base.name();
      if (m.index) {
        s += ", " + m.index->reg.name();
        if (m.index->op != IndexOp::kNone) {
          s += ", " + std::string(index_op_name(m.index->op));
          if (m.index->amount) s += " #" + std::to_string(*m.index->amount);
        }
      } else if (m.lo12) {
        s += ", :lo12:" + *m.lo12;
      } else if (m.mode != AddrMode::kPostIndex && m.disp != 0) {
        s += ", #" + format_int(m.disp, m.disp_hex);
      }
      s += "]";
      if (m.mode == AddrMode::kPreIndex) s += "!";
      if (m.mode == AddrMode::kPostIndex) s += ", #" + format_int(m.disp, m.disp_hex);
      return s;
    }
    std::string operator()(const LabelRef& l) const {
      return l.modifier == LabelModifier::kLo12 ? ":lo12:" + l.name : l.name;
    }
    std::string operator()(const Cond& c) const { return std::string(cond_name(c.code)); }
    std::string operator()(const Malformed& m) const { return m.text; }
  };
  return std::visit(Printer{}, op);
}

std::string print_instruction(const Instruction& inst) {
  std::string s = inst.mnemonic;
  for (size_t i = 0; i < inst.operands.size(); ++i) {
    s += i == 0 ? " " : ", ";
    s += print_operand(inst.operands[i]);
  }
  return s;
}

std::string print_item(const BlockItem& item) {
  if (const auto* inst = std::get_if<Instruction>(&item)) return print_instruction(*inst);
  if (const auto* dir = std::get_if<Directive>(&item)) return dir->text;
  return std::get<Label>(item).name + ":";
}

std::string print_block(const BasicBlock& block) {
  std::string out;
  for (const auto& item : block.items()) {
    if (!out.empty()) out += '\n';
    out += print_item(item);
  }
  return out;
}

Instruction make_instruction(std::string mnemonic, std::vector<Operand> operands) {
  Instruction inst;
  inst.mnemonic = std::move(mnemonic);
  inst.operands = std::move(operands);
  inst.raw = print_instruction(inst);
  return inst;
}

}  // namespace peepbench
