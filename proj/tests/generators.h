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

// Input generators shared by the property suite and the acceptance binary.

#ifndef PEEPBENCH_TESTS_GENERATORS_H_
#define PEEPBENCH_TESTS_GENERATORS_H_

#include <cstdint>
#include <random>
#include <string>

namespace peepbench::generators {

// Random straight-line integer blocks ending in ret. Registers are drawn
// from a small set so operations interact.
inline std::string random_block(std::mt19937_64& rng) {
  static const char* kOps3[] = {"add", "sub", "and", "orr", "eor", "mul", "lsl", "lsr", "asr"};
  static const char* kImmOps[] = {"add", "sub", "lsl", "lsr", "asr", "and", "orr", "eor"};
  std::uniform_int_distribution<int> len(1, 10);
  std::uniform_int_distribution<int> kind(0, 4);
  static const int kRegs[] = {0, 1, 2, 8, 9, 10};
  std::uniform_int_distribution<int> reg(0, 5);
  std::uniform_int_distribution<int> wide(0, 1);
  auto r = [&](bool x) { return std::string(x ? "x" : "w") + std::to_string(kRegs[reg(rng)]); };
  std::string out;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    const bool x = wide(rng) == 1;
    switch (kind(rng)) {
      case 0:
        out += "mov " + r(x) + ", #" + std::to_string(rng() % 64) + "\n";
        break;
      case 1:
        out += "mov " + r(x) + ", " + r(x) + "\n";
        break;
      case 2:
        out += std::string(kOps3[rng() % 9]) + " " + r(x) + ", " + r(x) + ", " + r(x) + "\n";
        break;
      case 3: {
        const std::string op = kImmOps[rng() % 8];
        const bool logical = op == "and" || op == "orr" || op == "eor";
        const bool shift = op == "lsl" || op == "lsr" || op == "asr";
        const uint64_t imm = logical ? 0xff : shift ? rng() % (x ? 64 : 32) : rng() % 16;
        out += op + " " + r(x) + ", " + r(x) + ", #" + std::to_string(imm) + "\n";
        break;
      }
      default:
        out += "udiv " + r(x) + ", " + r(x) + ", " + r(x) + "\n";
        break;
    }
  }
  return out + "ret";
}

// Re-spaces a canonical block: tabs after mnemonics, no space after commas.
inline std::string respace(const std::string& text) {
  std::string out;
  bool first_space = true;
  for (char c : text) {
    if (c == '\n') first_space = true;
    if (c == ' ' && first_space) {
      out += '\t';
      first_space = false;
      continue;
    }
    if (c == ' ' && !out.empty() && out.back() == ',') continue;
    out += c;
  }
  return out;
}

}  // namespace peepbench::generators

#endif  // PEEPBENCH_TESTS_GENERATORS_H_
