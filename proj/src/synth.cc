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

// Templated generator of straight-line blocks in the style of -O0 output:
// constant chains, stack spill/reload frames, algebraic identities, strength
// reduction candidates, shift pairs and plain ALU chains.

#include <set>
#include <string>
#include <vector>

#include "peepbench/asm.h"
#include "peepbench/corpus.h"
#include "peepbench/hashing.h"
#include "peepbench/peephole.h"
#include "peepbench/validate.h"

namespace peepbench {
namespace {

using Lines = std::vector<std::string>;

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  int pick(int lo, int hi) { return lo + static_cast<int>(rng_.below(hi - lo + 1)); }
  bool coin(double p = 0.5) { return rng_.chance(p); }
  template <typename T>
  const T& one_of(const std::vector<T>& v) {
    return v[rng_.below(v.size())];
  }

  // Argument registers hold inputs; 8..15 are scratch.
  int arg() { return pick(0, 7); }
  int scratch() { return pick(8, 15); }

  static std::string w(int i) { return "w" + std::to_string(i); }
  static std::string x(int i) { return "x" + std::to_string(i); }
  static std::string r(bool wide, int i) { return wide ? x(i) : w(i); }

  // A dead ALU instruction over scratch registers; gives the dead-code rule
  // material without disturbing the template's dataflow.
  std::string filler(int avoid) {
    int d = scratch();
    while (d == avoid) d = scratch();
    static const std::vector<std::string> ops = {"add", "sub", "eor", "orr", "and"};
    return one_of(ops) + " " + w(d) + ", " + w(arg()) + ", " + w(arg());
  }

  Lines constant_chain() {
    const bool wide = coin(0.3);
    const int t = coin() ? 0 : scratch();
    Lines out = {"mov " + r(wide, t) + ", #" + std::to_string(pick(0, 200))};
    const int steps = pick(1, 3);
    for (int i = 0; i < steps; ++i) {
      switch (pick(0, 4)) {
        case 0: out.push_back("add " + r(wide, t) + ", " + r(wide, t) + ", #" + std::to_string(pick(1, 100))); break;
        case 1: out.push_back("sub " + r(wide, t) + ", " + r(wide, t) + ", #" + std::to_string(pick(1, 50))); break;
        case 2: out.push_back("eor " + r(wide, t) + ", " + r(wide, t) + ", #" + one_of<std::string>({"1", "3", "0xff", "0xf"})); break;
        case 3: out.push_back("lsl " + r(wide, t) + ", " + r(wide, t) + ", #" + std::to_string(pick(1, 4))); break;
        default: out.push_back("orr " + r(wide, t) + ", " + r(wide, t) + ", #" + one_of<std::string>({"1", "7", "0xf0"})); break;
      }
    }
    if (t != 0) out.push_back("mov " + r(wide, 0) + ", " + r(wide, t));
    out.push_back("ret");
    return out;
  }

  Lines stack_spill() {
    const int frame = coin() ? 16 : 32;
    const int slot = pick(0, frame / 4 - 1) * 4;
    const int src = arg();
    const int tmp = scratch();
    Lines out = {"sub sp, sp, #" + std::to_string(frame),
                 ".cfi_def_cfa_offset " + std::to_string(frame)};
    if (coin(0.3)) {
      const int slot8 = pick(0, frame / 8 - 1) * 8;
      out.push_back("str " + x(src) + ", [sp, #" + std::to_string(slot8) + "]");
      out.push_back("ldr " + x(tmp) + ", [sp, #" + std::to_string(slot8) + "]");
      out.push_back("add x0, " + x(tmp) + ", #" + std::to_string(pick(0, 64)));
    } else if (coin()) {
      out.push_back("mov " + w(tmp) + ", #" + std::to_string(pick(0, 1000)));
      out.push_back("str " + w(tmp) + ", [sp, #" + std::to_string(slot) + "]");
      out.push_back("ldr w0, [sp, #" + std::to_string(slot) + "]");
    } else {
      out.push_back("str " + w(src) + ", [sp, #" + std::to_string(slot) + "]");
      out.push_back("ldr " + w(tmp) + ", [sp, #" + std::to_string(slot) + "]");
      static const std::vector<std::string> ops = {"add", "sub", "eor"};
      out.push_back(one_of(ops) + " w0, " + w(tmp) + ", " + w(arg()));
    }
    out.push_back("add sp, sp, #" + std::to_string(frame));
    out.push_back("ret");
    return out;
  }

  Lines algebraic() {
    const int s = arg();
    const int d = coin() ? 0 : scratch();
    Lines out;
    switch (pick(0, 5)) {
      case 0: out.push_back("add " + w(d) + ", " + w(s) + ", #0"); break;
      case 1: out.push_back("orr " + w(d) + ", " + w(s) + ", wzr"); break;
      case 2:
        out.push_back("mov w9, #1");
        out.push_back("mul " + w(d) + ", " + w(s) + ", w9");
        break;
      case 3:
        out.push_back("mov w9, wzr");
        out.push_back("mul " + w(d) + ", " + w(s) + ", w9");
        break;
      case 4: out.push_back("lsr " + x(d) + ", " + x(s) + ", #0"); break;
      default: out.push_back("eor " + w(d) + ", " + w(s) + ", " + w(s)); break;
    }
    if (d != 0) out.push_back("mov w0, " + w(d));
    out.push_back("ret");
    return out;
  }

  Lines strength() {
    const int k = pick(1, 5);
    const int s = pick(1, 7);
    const std::string op = coin() ? "mul" : "udiv";
    return {"mov w9, #" + std::to_string(1 << k), op + " w0, " + w(s) + ", w9", "ret"};
  }

  Lines copy() {
    const int s = arg();
    int t = pick(1, 7);
    while (t == s) t = pick(1, 7);
    static const std::vector<std::string> ops = {"add", "sub"};
    return {"mov " + w(t) + ", " + w(s),
            one_of(ops) + " w0, " + w(t) + ", #" + std::to_string(pick(1, 255)), "ret"};
  }

  Lines shifts() {
    switch (pick(0, 3)) {
      case 0:
        return {"lsl x8, " + x(pick(1, 7)) + ", #32", "asr x9, x8, #32",
                "mov w8, #" + std::to_string(pick(0, 99)), "str w8, [x0, x9, lsl #2]", "ret"};
      case 1: {
        const int b = coin() ? 24 : 16;
        const std::string op = coin() ? "asr" : "lsr";
        return {"lsl w8, " + w(arg()) + ", #" + std::to_string(b),
                op + " w0, w8, #" + std::to_string(b), "ret"};
      }
      case 2: {
        const int t = pick(8, 12);
        return {"lsl " + x(t) + ", x1, #" + std::to_string(pick(1, 3)),
                "lsl x0, " + x(t) + ", #" + std::to_string(pick(1, 3)), "ret"};
      }
      default: {
        const int t = pick(8, 12);
        return {"lsl " + x(t) + ", x1, #1", "add x0, " + x(t) + ", " + x(t), "ret"};
      }
    }
  }

  Lines frame_index() {
    const int frame = 16;
    return {"sub sp, sp, #" + std::to_string(frame),
            ".cfi_def_cfa_offset " + std::to_string(frame),
            "mov w8, w1",
            "str w8, [sp, #12]",
            "str x0, [sp]",
            "ldr x9, [sp]",
            "ldrsw x10, [sp, #12]",
            "mov w8, #" + std::to_string(pick(0, 500)),
            "str w8, [x9, x10, lsl #2]",
            "add sp, sp, #" + std::to_string(frame),
            "ret"};
  }

  Lines plain() {
    Lines out;
    const int n = pick(1, 4);
    static const std::vector<std::string> ops = {"add", "sub", "eor", "orr", "and", "mul"};
    for (int i = 0; i < n; ++i) {
      const bool wide = coin();
      out.push_back(one_of(ops) + " " + r(wide, i == n - 1 ? 0 : pick(1, 7)) + ", " +
                    r(wide, arg()) + ", " + r(wide, arg()));
    }
    switch (pick(0, 3)) {
      case 0: out.push_back("ret"); break;
      case 1: out.push_back("cbz x0, .LBB0_2"); break;
      case 2:
        out.push_back("cmp w0, " + w(arg()));
        out.push_back("b." + one_of<std::string>({"lt", "ne", "ge", "eq"}) + " .LBB0_3");
        break;
      default:
        out.push_back("str x0, [" + x(pick(1, 7)) + ", #" + std::to_string(8 * pick(0, 8)) + "]");
        out.push_back("b .LBB0_1");
        break;
    }
    return out;
  }

  Lines block() {
    Lines body;
    switch (pick(0, 8)) {
      case 0: body = constant_chain(); break;
      case 1: body = stack_spill(); break;
      case 2: body = algebraic(); break;
      case 3: body = strength(); break;
      case 4: body = copy(); break;
      case 5: body = shifts(); break;
      case 6: body = frame_index(); break;
      default: body = plain(); break;
    }
    // Occasionally prefix dead work, but never inside a frame template.
    if (body.front().rfind("sub sp", 0) != 0 && coin(0.25)) body.insert(body.begin(), filler(0));
    return body;
  }

 private:
  SplitMix rng_;
};

std::string join(const Lines& lines) {
  std::string out;
  for (const std::string& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

}  // namespace

std::vector<SamplePair> synth_blocks(int count, uint64_t seed, int max_len) {
  std::vector<SamplePair> out;
  std::set<std::string> seen;
  const uint64_t max_attempts = static_cast<uint64_t>(count) * 50 + 100;
  for (uint64_t attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count;
       ++attempt) {
    const uint64_t block_seed = mix_seed(seed, attempt);
    Gen gen(block_seed);
    auto parsed = try_parse_block(join(gen.block()));
    if (!parsed || parsed->instruction_count() > max_len) continue;
    if (!validate_block(*parsed).valid()) continue;
    BasicBlock opt = optimize(*parsed).block;
    SampleSource src;
    src.kind = SampleSource::Kind::kSynthetic;
    src.generator_seed = block_seed;
    SamplePair p = make_pair(std::move(src), print_block(*parsed), print_block(opt));
    if (!seen.insert(p.id).second) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace peepbench
