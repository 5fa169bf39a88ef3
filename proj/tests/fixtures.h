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

// Shared block fixtures: the published optimization examples, model outputs
// and error examples, plus the per-mnemonic error counts.

#ifndef PEEPBENCH_TESTS_FIXTURES_H_
#define PEEPBENCH_TESTS_FIXTURES_H_

#include <array>
#include <string>
#include <string_view>

namespace peepbench::fixtures {

// One row per optimization category: non-optimized input, the published
// optimized text, and the text our engine emits.
struct GoldenRow {
  std::string_view category;
  std::string_view input;
  std::string_view published;
  std::string_view engine;
};

inline constexpr std::array<GoldenRow, 6> kGoldens = {{
    {"Constant Folding", "mov w0, #2\nadd w0, w0, #3\nret", "mov w0, #5\nret",
     "mov w0, #5\nret"},
    {"Strength Reduction", "mov w1, w0\nmul w0, w1, #2\nret", "lsl w0, w0, #1\nret",
     "lsl w0, w0, #1\nret"},
    {"Null Sequences", "lsl w8, w8, #1\nlsr w8, w8, #0\nret", "lsl w0, w0, #1\nret",
     "lsl w8, w8, #1\nret"},
    {"Combine Operations", "lsl x2, x1, #1\nadd x3, x2, x2", "add x3, x1, x1\nret",
     "lsl x2, x1, #1\nadd x3, x2, x2"},
    {"Algebraic Laws", "mov w9, wzr\nmul w8, w8, w9\nret", "mov w0, wzr\nret",
     "mov w8, wzr\nret"},
    {"Address Mode",
     "sub sp, sp, #16\n.cfi_def_cfa_offset 16\nmov w8, #1\nstr w8, [sp, #12]\n"
     "ldr w0, [sp, #12]\nadd sp, sp, #16\nret",
     "mov w0, #1\nret", "mov w0, #1\nret"},
}};

// Compiler reference and model outputs for one array-store function.
inline constexpr std::string_view kBlockA =  // unoptimized original
    "sub sp, sp, #16\n.cfi_def_cfa_offset 16\nmov w8, w1\nstr w8, [sp, #12]\n"
    "str x0, [sp]\nldr x9, [sp]\nldrsw x10, [sp, #12]\nmov w8, #5\n"
    "str w8, [x9, x10, lsl #2]\nadd sp, sp, #16\nret";
inline constexpr std::string_view kBlockB =  // compiler-optimized reference
    "lsl x8, x1, #32\nasr x9, x8, #32\nmov w8, #5\nstr w8, [x0, x9, lsl #2]\nret";
inline constexpr std::string_view kBlockC =  // model output with a width error
    "mov w8, w1\nmov w9, x0\nldrsw x10, [sp, #12]\nmov w8, #5\nstr w8, [x9, x10, lsl #2]\nret";
inline constexpr std::string_view kBlockD =  // model output with invented opcodes
    "movsl x8, x0, #2\nmovr x8, x0, #2\nstr w8, #5\nstr w8, [x0, x9, lsl #2]\nret";
inline constexpr std::string_view kBlockE =  // model output better than the reference
    "mov w8, #5\nstr w8, [x0, w1, sxtw #2]\nret";

// Incorrect / correct pairs, one per error category, spelled with the
// two-character "\n" escape exactly as published.
struct ErrorExample {
  std::string_view category;
  std::string_view incorrect;
  std::string_view correct;
};

inline constexpr std::array<ErrorExample, 4> kErrorExamples = {{
    {"Opcode", R"(mov w8, w0, #0xff\n lsr w8, w8, #4\n orr w0, w8, w9)",
     R"(and w8, w0, #0xff\n lsr w8, w8, #4\n orr w0, w8, w9)"},
    {"ImmediateValue", R"(mov w0, #r\n ret)", R"(mov w0, wzr\n ret)"},
    {"Label", R"(adrp x0, .Lstrstr\n add x0, x0, :lo12:.L.str)",
     R"(adrp x0, .L.str\n add x0, x0, :lo12:.L.str)"},
    {"Register", R"(mov w8, x0\n mov w0, #3\n str w0, [x8]\n ret)",
     R"(mov x8, x0\n mov w0, #3\n str w0, [x8]\n ret)"},
}};

// Per-mnemonic (errors, total, printed p, printed half-width).
// The error examples are printed with a literal backslash-n between
// instructions; this turns them into real block text.
inline std::string unescape_lines(std::string_view text) {
  std::string out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 'n') {
      out += '\n';
      ++i;
      while (i + 1 < text.size() && text[i + 1] == ' ') ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

struct CiRow {
  std::string_view mnemonic;
  long errors;
  long total;
  double p;
  double conf;
};

inline constexpr std::array<CiRow, 20> kCiRows = {{
    // Most error-prone.
    {"eor", 22, 51, 0.431373, 0.135929},
    {"ldurb", 73, 175, 0.417143, 0.073057},
    {"asr", 29, 81, 0.358025, 0.104407},
    {"adds", 22, 65, 0.338462, 0.115035},
    {"lsr", 24, 72, 0.333333, 0.108889},
    {"fmov", 58, 222, 0.261261, 0.057791},
    {"stur", 1381, 5718, 0.241518, 0.011094},
    {"tbnz", 140, 588, 0.238095, 0.034427},
    {"ldursw", 35, 151, 0.231788, 0.067306},
    {"orr", 16, 71, 0.225352, 0.097187},
    // Least error-prone.
    {"stp", 37, 7250, 0.005103, 0.001640},
    {"ldp", 37, 5164, 0.007165, 0.002300},
    {"ret", 73, 7028, 0.010387, 0.002370},
    {"fadd", 9, 682, 0.013196, 0.008565},
    {"bl", 218, 15087, 0.014450, 0.001904},
    {"cbz", 27, 1145, 0.023581, 0.008789},
    {"b", 499, 18584, 0.026851, 0.002324},
    {"mul", 37, 1040, 0.035577, 0.011258},
    {"sdiv", 46, 1192, 0.038591, 0.010935},
    {"fcmp", 7, 181, 0.038674, 0.028091},
}};

}  // namespace peepbench::fixtures

#endif  // PEEPBENCH_TESTS_FIXTURES_H_
