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

#include "peepbench/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "peepbench/asm.h"
#include "peepbench/equivalence.h"
#include "peepbench/peephole.h"
#include "peepbench/validate.h"

namespace peepbench {
namespace {

constexpr const char* kConstFoldO0 =
    "\t.text\n"
    "\t.globl\tf\n"
    "\t.p2align\t2\n"
    "\t.type\tf,@function\n"
    "f:\n"
    "\t.cfi_startproc\n"
    "\tmov\tw0, #2\n"
    "\tadd\tw0, w0, #3\n"
    "\tret\n"
    ".Lfunc_end0:\n"
    "\t.size\tf, .Lfunc_end0-f\n"
    "\t.cfi_endproc\n";

constexpr const char* kConstFoldOpt =
    "\t.text\n"
    "\t.globl\tf\n"
    "\t.p2align\t2\n"
    "\t.type\tf,@function\n"
    "f:\n"
    "\t.cfi_startproc\n"
    "\tmov\tw0, #5\n"
    "\tret\n"
    ".Lfunc_end0:\n"
    "\t.size\tf, .Lfunc_end0-f\n"
    "\t.cfi_endproc\n";

TEST(ExtractPairsTest, SingleFunctionSingleBlock) {
  std::vector<std::string> log;
  auto pairs = extract_pairs(kConstFoldO0, kConstFoldOpt, "fold", &log);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_TRUE(log.empty());
  auto norm = normalize(pairs);
  ASSERT_EQ(norm.size(), 1u);
  EXPECT_EQ(norm[0].nonopt, ".cfi_startproc\nmov w0, #2\nadd w0, w0, #3\nret");
  EXPECT_EQ(norm[0].opt, ".cfi_startproc\nmov w0, #5\nret");
  EXPECT_EQ(norm[0].source.function, "f");
  EXPECT_EQ(norm[0].source.block_ordinal, 0);
  EXPECT_EQ(norm[0].source.tag(), "fold");
  EXPECT_EQ(norm[0].histogram.at("mov"), 1);
  EXPECT_EQ(norm[0].histogram.at("add"), 1);
}

TEST(ExtractPairsTest, BlocksSplitAtLocalLabels) {
  const char* o0 =
      "g:\n"
      "\tcmp\tw0, #0\n"
      "\tb.eq\t.LBB1_2\n"
      "\tmov\tw0, #1\n"
      ".LBB1_2:\n"
      "\tadd\tw0, w0, #1\n"
      "\tret\n"
      ".Lfunc_end1:\n";
  const char* opt =
      "g:\n"
      "\tcmp\tw0, #0\n"
      "\tb.eq\t.LBB1_2\n"
      "\tmov\tw0, #1\n"
      ".LBB1_2:\n"
      "\tadd\tw0, w0, #1\n"
      "\tret\n"
      ".Lfunc_end1:\n";
  auto pairs = extract_pairs(o0, opt, "branchy");
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].nonopt, "cmp w0, #0\nb.eq .LBB1_2");
  EXPECT_EQ(pairs[1].nonopt, "mov w0, #1");
  EXPECT_EQ(pairs[2].nonopt, "add w0, w0, #1\nret");
  EXPECT_EQ(pairs[2].source.block_ordinal, 2);
}

TEST(ExtractPairsTest, FunctionOnlyInOptimizedListingIsLogged) {
  std::string opt = std::string(kConstFoldOpt) + "h:\n\tret\n.Lfunc_end9:\n";
  std::vector<std::string> log;
  auto pairs = extract_pairs(kConstFoldO0, opt, "fold", &log);
  EXPECT_EQ(pairs.size(), 1u);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_NE(log[0].find("h"), std::string::npos);
  EXPECT_NE(log[0].find("missing from non-optimized"), std::string::npos);
}

TEST(ExtractPairsTest, BlockCountMismatchSkipsFunction) {
  const char* o0 = "k:\n\tcbz\tw0, .LBB0_1\n\tmov\tw0, #1\n.LBB0_1:\n\tret\n.Lfunc_end0:\n";
  const char* opt = "k:\n\tret\n.Lfunc_end0:\n";
  std::vector<std::string> log;
  EXPECT_TRUE(extract_pairs(o0, opt, "cfg", &log).empty());
  ASSERT_EQ(log.size(), 1u);
  EXPECT_NE(log[0].find("CFG changed"), std::string::npos);
}

TEST(ExtractPairsTest, UnparseableLineReportsLocation) {
  try {
    extract_pairs("f:\n\tmov\tw0, [x1\n\tret\n", kConstFoldOpt, "bad.s");
    FAIL() << "expected UnparseableFileError";
  } catch (const UnparseableFileError& e) {
    EXPECT_EQ(e.file(), "bad.s");
    EXPECT_EQ(e.line(), 2);
  }
}

SamplePair pair(std::string nonopt, std::string opt) {
  return make_pair(SampleSource{}, std::move(nonopt), std::move(opt));
}

TEST(NormalizeTest, DropsOversizedBlocks) {
  std::string big;
  for (int i = 0; i < 16; ++i) big += "add x0, x0, #1\n";
  big += "ret";
  std::string fifteen;
  for (int i = 0; i < 14; ++i) fifteen += "add x0, x0, #1\n";
  fifteen += "ret";
  auto out = normalize({pair(big, "ret"), pair(fifteen, "ret")});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(parse_block(out[0].nonopt).instruction_count(), 15);
}

TEST(NormalizeTest, StripsDirectivesButKeepsCfi) {
  auto out = normalize({pair(".globl f\n.cfi_def_cfa_offset 16\nmov w0, #1\nret", "mov w0, #1\nret")});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].nonopt, ".cfi_def_cfa_offset 16\nmov w0, #1\nret");
  EXPECT_TRUE(kept_directive(".cfi_startproc"));
  EXPECT_FALSE(kept_directive(".globl f"));
}

TEST(NormalizeTest, DedupsByContent) {
  auto out = normalize({pair("mov w0, #1\nret", "mov w0, #1\nret"),
                        pair("mov  w0,#1\nret", "mov w0, #1\nret"),
                        pair(".p2align 2\nmov w0, #1\nret", "mov w0, #1\nret")});
  EXPECT_EQ(out.size(), 1u);
}

TEST(NormalizeTest, DropsEmptyAndUnparseable) {
  auto out = normalize({pair(".globl f", "ret"), pair("mov w0, [x1", "ret")});
  EXPECT_TRUE(out.empty());
}

TEST(NormalizeTest, Idempotent) {
  auto once = normalize(synth_blocks(100, 3));
  auto twice = normalize(once);
  ASSERT_EQ(once.size(), twice.size());
  for (size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].id, twice[i].id);
}

Dataset synthetic(int n, uint64_t seed) {
  Dataset d;
  d.pairs = synth_blocks(n, seed);
  d.manifest.created = "test";
  refresh_counts(d);
  return d;
}

std::set<std::string> ids(const Dataset& d) {
  std::set<std::string> out;
  for (const auto& p : d.pairs) out.insert(p.id);
  return out;
}

TEST(SampleTest, EdgeSizes) {
  Dataset d = synthetic(50, 1);
  EXPECT_TRUE(sample(d, 0, 9).pairs.empty());
  EXPECT_EQ(ids(sample(d, d.pairs.size(), 9)), ids(d));
  EXPECT_THROW(sample(d, d.pairs.size() + 1, 9), NotEnoughSamplesError);
}

TEST(SampleTest, SeededAndOrderIndependent) {
  Dataset d = synthetic(80, 2);
  Dataset a = sample(d, 20, 42);
  Dataset b = sample(d, 20, 42);
  EXPECT_EQ(ids(a), ids(b));
  Dataset shuffled = d;
  std::reverse(shuffled.pairs.begin(), shuffled.pairs.end());
  EXPECT_EQ(ids(sample(shuffled, 20, 42)), ids(a));
  EXPECT_NE(ids(sample(d, 20, 43)), ids(a));
  EXPECT_EQ(a.manifest.sample_n, 20);
  EXPECT_EQ(a.manifest.sample_seed, 42u);
  EXPECT_EQ(a.manifest.counts_per_source.at("synthetic"), 20);
}

TEST(SynthTest, DeterministicValidAndEquivalent) {
  auto a = synth_blocks(200, 11);
  auto b = synth_blocks(200, 11);
  ASSERT_EQ(a.size(), 200u);
  for (size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].id, b[i].id);
    const BasicBlock n = parse_block(a[i].nonopt);
    const BasicBlock o = parse_block(a[i].opt);
    EXPECT_LE(n.instruction_count(), kMaxBlockLines);
    EXPECT_TRUE(validate_block(n).valid()) << a[i].nonopt;
    EXPECT_TRUE(validate_block(o).valid()) << a[i].opt;
    EXPECT_EQ(print_block(optimize(n).block), a[i].opt);
    EXPECT_NE(io_equivalent(n, o, 50).verdict, Verdict::kDivergent) << a[i].nonopt;
  }
  EXPECT_NE(synth_blocks(10, 12)[0].id, a[0].id);
}

TEST(CorpusStatsTest, SortedByCountThenName) {
  Dataset d;
  d.pairs = {pair("mov w0, #1\nmov w1, #2\nret", "ret"), pair("add w0, w0, #1\nret", "ret")};
  auto stats = corpus_stats(d);
  ASSERT_EQ(stats.size(), 3u);
  EXPECT_EQ(stats[0], (std::pair<std::string, long>{"mov", 2}));
  EXPECT_EQ(stats[1], (std::pair<std::string, long>{"ret", 2}));
  EXPECT_EQ(stats[2], (std::pair<std::string, long>{"add", 1}));
}

TEST(PersistenceTest, JsonlRoundTrip) {
  Dataset d = synthetic(30, 5);
  SampleSource src;
  src.kind = SampleSource::Kind::kIngested;
  src.file = "fold";
  src.function = "f";
  src.block_ordinal = 3;
  d.pairs.push_back(make_pair(src, "mov w0, #2\nadd w0, w0, #3\nret", "mov w0, #5\nret"));
  refresh_counts(d);
  d.manifest.sample_n = 31;
  d.manifest.sample_seed = 8;
  const std::string path =
      (std::filesystem::temp_directory_path() / "peepbench_corpus_test.jsonl").string();
  write_dataset(path, d);
  Dataset back = read_dataset(path);
  ASSERT_EQ(back.pairs.size(), d.pairs.size());
  for (size_t i = 0; i < d.pairs.size(); ++i) {
    EXPECT_EQ(pair_to_json(back.pairs[i]), pair_to_json(d.pairs[i]));
  }
  EXPECT_EQ(manifest_to_json(back.manifest), manifest_to_json(d.manifest));
  EXPECT_EQ(back.manifest.counts_per_source.at("fold"), 1);
  EXPECT_EQ(back.pairs.back().source.function, "f");
  std::filesystem::remove(path);
  std::filesystem::remove(manifest_path(path));
}

TEST(PairIdTest, ContentHash) {
  EXPECT_EQ(pair_id("a", "b").size(), 16u);
  EXPECT_EQ(pair_id("a", "b"), pair_id("a", "b"));
  EXPECT_NE(pair_id("a", "b"), pair_id("ab", ""));
}

}  // namespace
}  // namespace peepbench
