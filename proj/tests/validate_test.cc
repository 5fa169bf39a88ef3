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

#include <gtest/gtest.h>

#include "fixtures.h"
#include "peepbench/asm.h"

namespace peepbench {
namespace {

bool has_code(const ValidationReport& r, DiagCode code) {
  for (const Diagnostic& d : r.diagnostics) {
    if (d.code == code) return true;
  }
  return false;
}

TEST(ValidateTest, InventedOpcodeIsUnknownMnemonic) {
  ValidationReport r = validate_block(parse_block("movsl x8, x0, #2"));
  EXPECT_FALSE(r.valid());
  EXPECT_TRUE(has_code(r, DiagCode::kUnknownMnemonic));
}

TEST(ValidateTest, LetterImmediateIsMalformed) {
  ValidationReport r = validate_block(parse_block("mov w0, #r"));
  EXPECT_FALSE(r.valid());
  EXPECT_TRUE(has_code(r, DiagCode::kMalformedImmediate));
}

TEST(ValidateTest, SimpleBlockIsValid) {
  EXPECT_TRUE(validate_block(parse_block("mov w0, #5\nret")).valid());
}

TEST(ValidateTest, MixedWidthMoveIsRejected) {
  EXPECT_FALSE(validate_block(parse_block("mov w8, x0")).valid());
  EXPECT_FALSE(validate_block(parse_block(fixtures::kBlockC)).valid());
}

TEST(ValidateTest, PublishedBlocksValidity) {
  EXPECT_TRUE(validate_block(parse_block(fixtures::kBlockA)).valid());
  EXPECT_TRUE(validate_block(parse_block(fixtures::kBlockB)).valid());
  EXPECT_TRUE(validate_block(parse_block(fixtures::kBlockE)).valid());
  EXPECT_FALSE(validate_block(parse_block(fixtures::kBlockD)).valid());
  for (const auto& g : fixtures::kGoldens) {
    EXPECT_TRUE(validate_block(parse_block(g.input)).valid()) << g.category;
    EXPECT_TRUE(validate_block(parse_block(g.engine)).valid()) << g.category;
  }
}

TEST(ValidateTest, ErrorExamplesCorrectSidesValidate) {
  for (const auto& e : fixtures::kErrorExamples) {
    EXPECT_TRUE(validate_block(parse_block(fixtures::unescape_lines(e.correct))).valid()) << e.category;
  }
}

TEST(ValidateTest, ArityAndKindChecks) {
  EXPECT_TRUE(has_code(validate_block(parse_block("add x0, x1")), DiagCode::kBadOperandArity));
  EXPECT_TRUE(has_code(validate_block(parse_block("str w8, #5")), DiagCode::kBadOperandKind));
}

TEST(ValidateTest, ShiftAmountBoundForWRegisters) {
  EXPECT_TRUE(validate_block(parse_block("lsl w0, w1, #31")).valid());
  EXPECT_FALSE(validate_block(parse_block("add w0, w1, w2, lsl #32")).valid());
}

TEST(ValidateTest, DiagnosticsJsonl) {
  ValidationReport r = validate_block(parse_block("movsl x8, x0, #2\nret"));
  std::string jsonl = diagnostics_to_jsonl(r);
  EXPECT_NE(jsonl.find("\"UnknownMnemonic\""), std::string::npos);
  EXPECT_NE(jsonl.find("\"line\":1"), std::string::npos);
}

TEST(ValidateTest, MnemonicTables) {
  EXPECT_TRUE(is_known_mnemonic("ldursw"));
  EXPECT_TRUE(is_known_mnemonic("fmov"));
  EXPECT_TRUE(is_fp_mnemonic("fadd"));
  EXPECT_FALSE(is_fp_mnemonic("add"));
  EXPECT_FALSE(is_known_mnemonic("movr"));
}

}  // namespace
}  // namespace peepbench
