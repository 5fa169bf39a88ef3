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

// Exhaustive 8-bit NZCV oracle for adds/subs. Flags are derived from plain
// integer arithmetic (no carry chains, no masking tricks) and compared
// against the interpreter. The 8-bit operands are embedded in the top byte
// of W registers: with the low 24 bits zero, a 32-bit add/sub produces the
// same N, Z, C and V as the 8-bit operation.

#ifndef PEEPBENCH_TESTS_FLAG_ORACLE_H_
#define PEEPBENCH_TESTS_FLAG_ORACLE_H_

#include <cstdint>
#include <string>

#include "peepbench/asm.h"
#include "peepbench/machine.h"

namespace peepbench::flag_oracle {

inline Flags reference_adds8(int a, int b) {
  const int sa = a >= 128 ? a - 256 : a;
  const int sb = b >= 128 ? b - 256 : b;
  const int r = (a + b) % 256;
  return {r >= 128, r == 0, a + b > 255, sa + sb < -128 || sa + sb > 127};
}

inline Flags reference_subs8(int a, int b) {
  const int sa = a >= 128 ? a - 256 : a;
  const int sb = b >= 128 ? b - 256 : b;
  const int r = ((a - b) % 256 + 256) % 256;
  return {r >= 128, r == 0, a >= b, sa - sb < -128 || sa - sb > 127};
}

struct SweepResult {
  long checked = 0;
  long mismatches = 0;
  std::string first_mismatch;
};

// All 65,536 operand pairs for adds and subs (131,072 executions).
inline SweepResult sweep_adds_subs() {
  SweepResult out;
  const BasicBlock adds = parse_block("adds w0, w1, w2");
  const BasicBlock subs = parse_block("subs w0, w1, w2");
  MachineState s;
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      s.x[1] = static_cast<uint64_t>(a) << 24;
      s.x[2] = static_cast<uint64_t>(b) << 24;
      for (int op = 0; op < 2; ++op) {
        const Flags want = op == 0 ? reference_adds8(a, b) : reference_subs8(a, b);
        const Flags got = run_block(s, op == 0 ? adds : subs).final.nzcv;
        ++out.checked;
        if (!(got == want)) {
          if (out.mismatches++ == 0) {
            out.first_mismatch = std::string(op == 0 ? "adds" : "subs") + " a=" +
                                 std::to_string(a) + " b=" + std::to_string(b);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace peepbench::flag_oracle

#endif  // PEEPBENCH_TESTS_FLAG_ORACLE_H_
