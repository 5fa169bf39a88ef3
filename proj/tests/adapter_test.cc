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

#include "peepbench/adapter.h"

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>

#include "fixtures.h"

namespace peepbench {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("peepbench_adapter_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

size_t count(std::string_view hay, std::string_view needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

PromptSpec spec_with_shots(int k) {
  PromptSpec spec;
  for (int i = 0; i < k; ++i) {
    spec.shots.push_back({"mov w0, #" + std::to_string(i) + "\nadd w0, w0, #1\nret",
                          "mov w0, #" + std::to_string(i + 1) + "\nret"});
  }
  spec.target = "mov w0, #2\nadd w0, w0, #3\nret";
  return spec;
}

TEST(PromptTest, ShotCountsAndTarget) {
  for (int k : {0, 1, 3, 8}) {
    const std::string p = build_prompt(spec_with_shots(k));
    EXPECT_EQ(count(p, "Input:\n"), static_cast<size_t>(k + 1)) << k;
    EXPECT_EQ(count(p, "Output:\n"), static_cast<size_t>(k + 1)) << k;
    EXPECT_EQ(target_from_prompt(p), "mov w0, #2\nadd w0, w0, #3\nret");
    EXPECT_EQ(p.rfind(default_preamble(), 0), 0u);
  }
  EXPECT_THROW(build_prompt(spec_with_shots(9)), std::invalid_argument);
}

TEST(PromptTest, ByteIdentical) {
  EXPECT_EQ(build_prompt(spec_with_shots(3)), build_prompt(spec_with_shots(3)));
  EXPECT_NE(build_prompt(spec_with_shots(3)), build_prompt(spec_with_shots(2)));
}

TEST(AdapterKindTest, Names) {
  EXPECT_EQ(parse_adapter_kind("remote"), AdapterKind::kRemote);
  EXPECT_EQ(parse_adapter_kind("replay"), AdapterKind::kReplay);
  EXPECT_EQ(parse_adapter_kind("oracle"), AdapterKind::kOracle);
  EXPECT_EQ(adapter_kind_name(AdapterKind::kReplay), "replay");
  EXPECT_THROW(parse_adapter_kind("gpt"), std::invalid_argument);
}

TEST(OracleQueryTest, ReturnsEngineOutput) {
  AdapterConfig c;
  c.kind = AdapterKind::kOracle;
  AdapterResponse r = query(c, build_prompt(spec_with_shots(3)));
  ASSERT_TRUE(r.extracted);
  EXPECT_EQ(*r.extracted, "mov w0, #5\nret");
  EXPECT_EQ(r.latency_ms, 0);
  EXPECT_EQ(r.adapter, AdapterKind::kOracle);
}

TEST(ReplayQueryTest, PrimedCacheHit) {
  const fs::path dir = fresh_dir("replay");
  const std::string prompt = build_prompt(spec_with_shots(1));
  write_cache_entry(dir.string(), {prompt, "```asm\nmov w0, #5\nret\n```", 1234, "t"});
  AdapterConfig c;
  c.kind = AdapterKind::kReplay;
  c.cache_dir = dir.string();
  AdapterResponse r = query(c, prompt);
  ASSERT_TRUE(r.extracted);
  EXPECT_EQ(*r.extracted, "mov w0, #5\nret");
  EXPECT_EQ(r.latency_ms, 1234);
  EXPECT_TRUE(fs::exists(dir / (cache_key(prompt) + ".json")));
  auto entry = read_cache_entry(dir.string(), prompt);
  ASSERT_TRUE(entry);
  EXPECT_EQ(entry->prompt, prompt);
}

TEST(ReplayQueryTest, MissNamesTheHash) {
  const fs::path dir = fresh_dir("miss");
  AdapterConfig c;
  c.kind = AdapterKind::kReplay;
  c.cache_dir = dir.string();
  const std::string prompt = build_prompt(spec_with_shots(2));
  try {
    query(c, prompt);
    FAIL() << "expected CacheMissError";
  } catch (const CacheMissError& e) {
    EXPECT_EQ(e.hash(), cache_key(prompt));
    EXPECT_EQ(e.hash().size(), 64u);
  }
}

TEST(ReplayQueryTest, UnextractableReplyIsReportedNotThrown) {
  const fs::path dir = fresh_dir("prose");
  const std::string prompt = build_prompt(spec_with_shots(0));
  write_cache_entry(dir.string(), {prompt, "I cannot optimize this.", 5, "t"});
  AdapterConfig c;
  c.kind = AdapterKind::kReplay;
  c.cache_dir = dir.string();
  AdapterResponse r = query(c, prompt);
  EXPECT_FALSE(r.extracted);
  EXPECT_FALSE(r.extraction_error.empty());
}

TEST(RemoteQueryTest, UnreachableHostFailsAfterRetries) {
  AdapterConfig c;
  c.kind = AdapterKind::kRemote;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.max_retries = 2;
  c.backoff_ms = 1;
  c.timeout_s = 2;
  c.rate_per_sec = 1000;
  try {
    query(c, build_prompt(spec_with_shots(0)));
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_EQ(e.status(), 0);
  }
}

TEST(RateLimiterTest, BurstThenThrottle) {
  RateLimiter limiter(50.0, 2);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 4; ++i) limiter.acquire();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  EXPECT_GE(ms, 30);  // two tokens beyond the burst at 50/s
}

// Hand-written model replies in the styles seen from chat models: fenced,
// fenced with a language tag, prose around bare code, numbered commentary.
struct ReplyCase {
  const char* reply;
  const char* code;
};

const ReplyCase kReplies[] = {
    {"```\nmov w0, #5\nret\n```", "mov w0, #5\nret"},
    {"```asm\nmov w0, #5\nret\n```", "mov w0, #5\nret"},
    {"```armasm\nlsl w0, w0, #1\nret\n```\nThis replaces the multiply.", "lsl w0, w0, #1\nret"},
    {"Here is the optimized block:\n```assembly\n  mov w8, #5\n  str w8, [x0, w1, sxtw #2]\n"
     "  ret\n```",
     "mov w8, #5\nstr w8, [x0, w1, sxtw #2]\nret"},
    {"```\n\n\nmov w0, wzr\nret\n\n```", "mov w0, wzr\nret"},
    {"```\nmov w0, #1\nret", "mov w0, #1\nret"},
    {"mov w0, #5\nret", "mov w0, #5\nret"},
    {"Optimized:\nmov w0, #5\nret", "mov w0, #5\nret"},
    {"The constant can be folded.\n\nmov w0, #5\nret\n\nThe add is no longer needed.",
     "mov w0, #5\nret"},
    {"    lsl x3, x1, #2\n    ret\n", "lsl x3, x1, #2\nret"},
    {"Sure! The result is:\n\tsxtw x9, w1\n\tmov w8, #5\n\tstr w8, [x0, x9, lsl #2]\n\tret\n"
     "Hope this helps.",
     "sxtw x9, w1\nmov w8, #5\nstr w8, [x0, x9, lsl #2]\nret"},
    {"First try:\nmov w0, #1\n\nBetter version:\nmov w0, #1\nret", "mov w0, #1\nret"},
    {"movsl x8, x0, #2\nstr w8, [x0, x9, lsl #2]\nret",
     "movsl x8, x0, #2\nstr w8, [x0, x9, lsl #2]\nret"},
    {".LBB0_1:\nadd w0, w0, #1\nret", ".LBB0_1:\nadd w0, w0, #1\nret"},
    {"sub sp, sp, #16\n.cfi_def_cfa_offset 16\nadd sp, sp, #16\nret",
     "sub sp, sp, #16\n.cfi_def_cfa_offset 16\nadd sp, sp, #16\nret"},
    {"Result:\nadrp x0, .L.str\nadd x0, x0, :lo12:.L.str\nbl puts",
     "adrp x0, .L.str\nadd x0, x0, :lo12:.L.str\nbl puts"},
    {"Note: nothing to improve.\nret", "ret"},
    {"```\nmov w0, #5\n```\nor equivalently\n```\nmov w0, #5\nret\n```", "mov w0, #5"},
    {"mov w0, #5 \nret  ", "mov w0, #5\nret"},
    {"Answer:\r\nmov w0, #7\r\nret\r\n", "mov w0, #7\nret"},
};

TEST(ExtractCodeTest, HandWrittenReplies) {
  for (const ReplyCase& c : kReplies) EXPECT_EQ(extract_code(c.reply), c.code) << c.reply;
}

TEST(ExtractCodeTest, ProseOnlyFails) {
  EXPECT_THROW(extract_code("I cannot optimize this."), ExtractionFailure);
  EXPECT_THROW(extract_code(""), ExtractionFailure);
}

}  // namespace
}  // namespace peepbench
