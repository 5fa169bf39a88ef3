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

// Syntactic validation against a curated base-ISA integer mnemonic table.
// This stands in for "does the assembler accept it": arity, operand kinds,
// register-width consistency and assembler-level immediate ranges. Encoding
// legality (logical bitmask immediates, movz chunking) is not checked.

#ifndef PEEPBENCH_VALIDATE_H_
#define PEEPBENCH_VALIDATE_H_

#include <string>
#include <string_view>
#include <vector>

#include "peepbench/asm.h"

namespace peepbench {

enum class DiagCode : uint8_t {
  kUnknownMnemonic,
  kBadOperandArity,
  kBadOperandKind,
  kMalformedImmediate,
  kMalformedRegister,
  kUnknownLabelSyntax,
};

std::string_view diag_code_name(DiagCode code);

struct Diagnostic {
  int line = 0;
  DiagCode code = DiagCode::kUnknownMnemonic;
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;
  bool valid() const { return diagnostics.empty(); }
};

bool is_known_mnemonic(std::string_view mnemonic);

// True for mnemonics that are validated by arity only and never executed.
bool is_fp_mnemonic(std::string_view mnemonic);

std::vector<Diagnostic> validate_instruction(const Instruction& inst);
ValidationReport validate_block(const BasicBlock& block);

// One JSON object per line: {"line":..,"code":"..","message":".."}.
std::string diagnostics_to_jsonl(const ValidationReport& report);

}  // namespace peepbench

#endif  // PEEPBENCH_VALIDATE_H_
