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

#include "peepbench/equivalence.h"

#include <gtest/gtest.h>

#include "fixtures.h"
#include "json.hpp"
#include "peepbench/asm.h"

namespace peepbench {
namespace {

EquivalenceVerdict eq(std::string_view a, std::string_view b, int trials = kDefaultTrials) {
  return io_equivalent(parse_block(a), parse_block(b), trials);
}

TEST(OwnFrameTest, DetectsMatchingSubAdd) {
  EXPECT_EQ(own_frame_size(parse_block(fixtures::kBlockA)), 16);
  EXPECT_FALSE(own_frame_size(parse_block(fixtures::kBlockB)));
  EXPECT_FALSE(own_frame_size(parse_block("sub sp, sp, #16\nadd sp, sp, #32\nret")));
}

TEST(ObservableEffectsTest, OwnFrameStoresAreExcluded) {
  MachineState s = init_state(3);
  s.x[0] = 0x40000;
  s.x[1] = 2;
  const BasicBlock a = parse_block(fixtures::kBlockA);
  ExecutionResult r = run_block(s, a);
  ASSERT_EQ(r.stores.size(), 3u);  // [sp,#12], [sp], array element
  EffectSet e = observable_effects(r, a);
  ASSERT_EQ(e.stores.size(), 1u);
  EXPECT_EQ(e.stores[0].address, 0x40000u + 8);
  EXPECT_EQ(e.stores[0].value, 5u);
}

TEST(ObservableEffectsTest, PlainReturn) {
  const BasicBlock b = parse_block("mov w0, #1\nret");
  EffectSet e = observable_effects(run_block(init_state(1), b), b);
  EXPECT_EQ(e.x0, 1u);
  EXPECT_EQ(e.terminator.kind, Outcome::kReturned);
  EXPECT_TRUE(e.stores.empty());
}

TEST(ObservableEffectsTest, NoStoresNoFrame) {
  const BasicBlock b = parse_block("add x0, x1, x2\nret");
  EXPECT_TRUE(observable_effects(run_block(init_state(1), b), b).stores.empty());
}

TEST(IoEquivalentTest, CompilerAndModelOutputsAgree) {
  EXPECT_EQ(eq(fixtures::kBlockB, fixtures::kBlockE, 1000).verdict, Verdict::kEquivalent);
  EXPECT_EQ(eq(fixtures::kBlockA, fixtures::kBlockB, 1000).verdict, Verdict::kEquivalent);
  EXPECT_EQ(eq(fixtures::kBlockA, fixtures::kBlockE, 1000).verdict, Verdict::kEquivalent);
}

TEST(IoEquivalentTest, SelfEquivalence) {
  for (std::string_view t : {fixtures::kBlockA, fixtures::kBlockB, fixtures::kBlockE}) {
    EXPECT_EQ(eq(t, t).verdict, Verdict::kEquivalent);
  }
}

TEST(IoEquivalentTest, DifferentConstantsDivergeOnFirstTrial) {
  EquivalenceVerdict v = eq("mov w0, #5\nret", "mov w0, #6\nret");
  EXPECT_EQ(v.verdict, Verdict::kDivergent);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->trial, 0);
  EXPECT_EQ(v.witness->mismatched_effect, "x0");
}

TEST(IoEquivalentTest, ExternalCallIsUncheckable) {
  EquivalenceVerdict v = eq("mov w0, #1\nbl printf", "mov w0, #1\nbl printf");
  EXPECT_EQ(v.verdict, Verdict::kUncheckable);
  EXPECT_EQ(v.detail, "CalledExternal");
}

TEST(IoEquivalentTest, TrapIsUncheckable) {
  EXPECT_EQ(eq("fadd d0, d1, d2\nret", "ret").verdict, Verdict::kUncheckable);
}

TEST(IoEquivalentTest, StoreMismatchIsReported) {
  EquivalenceVerdict v = eq("str x1, [x0]\nret", "str x2, [x0]\nret");
  EXPECT_EQ(v.verdict, Verdict::kDivergent);
  EXPECT_EQ(v.witness->mismatched_effect, "stores");
}

TEST(IoEquivalentTest, TerminatorMismatchIsReported) {
  EquivalenceVerdict v = eq("cmp x0, #0\nb.eq .LBB0_1", "cmp x0, #0\nb.ne .LBB0_1");
  EXPECT_EQ(v.verdict, Verdict::kDivergent);
  EXPECT_EQ(v.witness->mismatched_effect, "terminator");
}

TEST(IoEquivalentTest, DeterministicUnderSeed) {
  auto a = io_equivalent(parse_block("add w0, w1, w2\nret"), parse_block("sub w0, w1, w2\nret"),
                         50, 99);
  auto b = io_equivalent(parse_block("add w0, w1, w2\nret"), parse_block("sub w0, w1, w2\nret"),
                         50, 99);
  ASSERT_TRUE(a.witness && b.witness);
  EXPECT_EQ(a.witness->trial, b.witness->trial);
  EXPECT_EQ(witness_to_json(*a.witness), witness_to_json(*b.witness));
}

TEST(WitnessTest, JsonShape) {
  EquivalenceVerdict v = eq("mov w0, #5\nret", "mov w0, #6\nret");
  auto j = nlohmann::json::parse(witness_to_json(*v.witness));
  EXPECT_EQ(j["trial"], 0);
  EXPECT_TRUE(j["registers"].contains("x30"));
  EXPECT_TRUE(j["registers"].contains("sp"));
  EXPECT_EQ(j["mismatched_effect"], "x0");
}

}  // namespace
}  // namespace peepbench
