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

#include <gtest/gtest.h>

#include "fixtures.h"

namespace peepbench {
namespace {

TEST(RegisterTest, NamesRoundTrip) {
  for (int i = 0; i <= 30; ++i) {
    for (std::string name : {"w" + std::to_string(i), "x" + std::to_string(i)}) {
      auto r = Register::parse(name);
      ASSERT_TRUE(r) << name;
      EXPECT_EQ(r->name(), name);
    }
  }
  for (std::string name : {"sp", "wzr", "xzr"}) EXPECT_EQ(Register::parse(name)->name(), name);
  EXPECT_FALSE(Register::parse("x31"));
  EXPECT_FALSE(Register::parse("w45"));
}

TEST(RegisterTest, AliasesAndSlots) {
  EXPECT_EQ(Register::parse("fp")->name(), "x29");
  EXPECT_EQ(Register::parse("lr")->name(), "x30");
  EXPECT_EQ(Register::w(3).slot(), Register::x(3).slot());
  EXPECT_EQ(Register::wzr().slot(), Register::kZeroSlot);
  EXPECT_EQ(Register::sp().slot(), Register::kSpSlot);
  EXPECT_EQ(Register::w(5).with_width(64), Register::x(5));
  EXPECT_TRUE(Register::w(1).is_32());
  EXPECT_FALSE(Register::x(1).is_32());
}

TEST(ParseBlockTest, MovRetIsTwoInstructionsEndingInRet) {
  BasicBlock b = parse_block("mov w0, #5\nret");
  EXPECT_EQ(b.instruction_count(), 2);
  EXPECT_EQ(b.terminator().kind, TerminatorKind::kRet);
}

TEST(ParseBlockTest, ScaledRegisterIndexMemoryOperand) {
  Instruction inst = parse_instruction("str w8, [x9, x10, lsl #2]");
  ASSERT_EQ(inst.operands.size(), 2u);
  const auto& mem = std::get<Mem>(inst.operands[1]);
  EXPECT_EQ(mem.base, Register::x(9));
  ASSERT_TRUE(mem.index);
  EXPECT_EQ(mem.index->reg, Register::x(10));
  EXPECT_EQ(mem.index->op, IndexOp::kLsl);
  EXPECT_EQ(mem.index->amount, 2);
  EXPECT_EQ(mem.disp, 0);
  EXPECT_EQ(mem.mode, AddrMode::kOffset);
}

TEST(ParseBlockTest, EmptyInputIsAnError) {
  try {
    parse_block("");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kEmptyInput);
  }
  EXPECT_FALSE(try_parse_block("  \n\n"));
}

TEST(ParseBlockTest, TerminatorMustBeLast) {
  try {
    parse_block("ret\nmov w0, #1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::kTerminatorNotLast);
  }
}

TEST(ParseBlockTest, TerminatorKinds) {
  EXPECT_EQ(parse_block("b .LBB0_1").terminator().kind, TerminatorKind::kBranch);
  EXPECT_EQ(parse_block("cmp w0, #1\nb.ne .LBB0_2").terminator().kind,
            TerminatorKind::kCondBranch);
  EXPECT_EQ(parse_block("cbz x0, .LBB0_2").terminator().kind, TerminatorKind::kCondBranch);
  EXPECT_EQ(parse_block("bl printf").terminator().kind, TerminatorKind::kCall);
  EXPECT_EQ(parse_block("add x0, x1, x2").terminator().kind, TerminatorKind::kNone);
}

TEST(ParseBlockTest, EscapedNewlinesSplitLines) {
  BasicBlock b = parse_block(R"(mov w0, #3\n ret)");
  EXPECT_EQ(b.instruction_count(), 2);
}

TEST(ParseBlockTest, MalformedTokensAreRepresented) {
  Instruction imm = parse_instruction("mov w0, #r");
  ASSERT_TRUE(std::holds_alternative<Malformed>(imm.operands[1]));
  EXPECT_EQ(std::get<Malformed>(imm.operands[1]).kind, MalformedKind::kImmediate);
  Instruction reg = parse_instruction("mov x45, x0");
  ASSERT_TRUE(std::holds_alternative<Malformed>(reg.operands[0]));
  EXPECT_EQ(std::get<Malformed>(reg.operands[0]).kind, MalformedKind::kRegister);
}

TEST(ParseBlockTest, CommentsDirectivesAndLabels) {
  BasicBlock b = parse_block(".LBB0_1:\n  .cfi_def_cfa_offset 16\n  add x0, x0, #1 // bump\nret");
  ASSERT_EQ(b.items().size(), 4u);
  EXPECT_TRUE(std::holds_alternative<Label>(b.items()[0]));
  EXPECT_TRUE(std::holds_alternative<Directive>(b.items()[1]));
  EXPECT_EQ(print_block(b), ".LBB0_1:\n.cfi_def_cfa_offset 16\nadd x0, x0, #1\nret");
}

TEST(PrintBlockTest, CanonicalSpacing) {
  EXPECT_EQ(print_block(parse_block("mov   w0,#5")), "mov w0, #5");
  EXPECT_EQ(print_block(parse_block("  MOV W0 , #5 \n RET")), "mov w0, #5\nret");
}

TEST(PrintBlockTest, ModelOutputBlockPrintsVerbatim) {
  EXPECT_EQ(print_block(parse_block(fixtures::kBlockE)), fixtures::kBlockE);
}

TEST(PrintBlockTest, OperandForms) {
  const char* lines[] = {
      "add x0, x1, x2, lsl #3",
      "add x0, x1, w2, sxtw #2",
      "ldr x0, [sp, #-16]!",
      "ldr x0, [sp], #16",
      "ldr w0, [x8, :lo12:.L.str]",
      "adrp x0, .L.str",
      "add x0, x0, :lo12:.L.str",
      "csel w0, w1, w2, ne",
      "mov x0, #0xff",
      "movk x0, #0x1234, lsl #16",
      "fmov d0, #1.0",
      "stp x29, x30, [sp, #-16]!",
      "tbnz w0, #3, .LBB0_4",
  };
  for (const char* line : lines) EXPECT_EQ(print_block(parse_block(line)), line);
}

TEST(PrintBlockTest, RoundTripOnAllFixtures) {
  std::vector<std::string> texts = {std::string(fixtures::kBlockA), std::string(fixtures::kBlockB),
                                     std::string(fixtures::kBlockC), std::string(fixtures::kBlockD),
                                     std::string(fixtures::kBlockE)};
  for (const auto& g : fixtures::kGoldens) texts.emplace_back(g.input);
  for (const auto& e : fixtures::kErrorExamples) {
    texts.push_back(fixtures::unescape_lines(e.incorrect));
    texts.push_back(fixtures::unescape_lines(e.correct));
  }
  for (const std::string& t : texts) {
    BasicBlock b = parse_block(t);
    EXPECT_EQ(parse_block(print_block(b)), b) << t;
  }
}

TEST(MakeInstructionTest, SetsRawText) {
  Instruction i = make_instruction("lsl", {Register::w(0), Register::w(0), Imm{1}});
  EXPECT_EQ(i.raw, "lsl w0, w0, #1");
  EXPECT_EQ(print_instruction(i), "lsl w0, w0, #1");
}

}  // namespace
}  // namespace peepbench
