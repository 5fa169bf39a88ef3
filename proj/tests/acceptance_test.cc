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

// End-to-end acceptance checks. Usage: acceptance [N]. With no argument all
// eight criteria run; each prints one "PASS"/"FAIL" line, with supporting
// detail lines indented below it. The exit status is nonzero when any
// selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "flag_oracle.h"
#include "generators.h"
#include "json.hpp"
#include "peepbench/asm.h"
#include "peepbench/corpus.h"
#include "peepbench/equivalence.h"
#include "peepbench/error_taxonomy.h"
#include "peepbench/harness.h"
#include "peepbench/machine.h"
#include "peepbench/metrics.h"
#include "peepbench/peephole.h"
#include "peepbench/validate.h"
#include "replay_fixture.h"

namespace peepbench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct CriterionResult {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string one_line(std::string_view text) {
  std::string s(text);
  for (char& c : s) {
    if (c == '\n') c = ';';
  }
  return s;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("peepbench_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CriterionResult criterion_ci() {
  CriterionResult o;
  const auto start = Clock::now();
  for (const auto& row : fixtures::kCiRows) {
    const Interval ci = confidence_interval(row.errors, row.total);
    const double dp = std::fabs(ci.p - row.p);
    const double dc = std::fabs(ci.halfwidth - row.conf);
    o.check(dp <= 1e-6 && dc <= 1e-6,
            std::string(row.mnemonic) + " (" + std::to_string(row.errors) + "," +
                std::to_string(row.total) + ") -> " + fmt("%.6f", ci.p) + " +/- " +
                fmt("%.6f", ci.halfwidth) + "  |dp|=" + fmt("%.1e", dp) +
                " |dconf|=" + fmt("%.1e", dc));
  }
  const double t = seconds_since(start);
  o.check(t < 1.0, "runtime " + fmt("%.3f", t) + " s < 1 s");
  return o;
}

bool v_equivalent(const BasicBlock& a, const BasicBlock& b) {
  return io_equivalent(a, b, 1000).verdict == Verdict::kEquivalent;
}

CriterionResult criterion_goldens() {
  CriterionResult o;
  const auto start = Clock::now();
  for (const auto& g : fixtures::kGoldens) {
    const BasicBlock input = parse_block(g.input);
    const std::string got = print_block(optimize(input).block);
    if (g.category == "Combine Operations") {
      // Asserted value-equivalent instead of textually equal. As printed the
      // window has no ret, so every register is live-out and nothing may be
      // removed; with a ret appended, x2 is dead and the pair combines.
      const BasicBlock with_ret = parse_block(std::string(g.input) + "\nret");
      const BasicBlock combined = optimize(with_ret).block;
      const BasicBlock published = parse_block(g.published);
      o.check(got == print_block(input),
              std::string(g.category) + ": open window kept as '" + one_line(got) + "'");
      // x3 is the row's result but not an observable effect of a ret block,
      // so compare it directly over sampled input states.
      int engine_mismatch = 0, published_mismatch = 0;
      for (uint64_t seed = 0; seed < 1000; ++seed) {
        const uint64_t want = run_block(init_state(seed), with_ret).final.x[3];
        engine_mismatch += run_block(init_state(seed), combined).final.x[3] != want;
        published_mismatch += run_block(init_state(seed), published).final.x[3] != want;
      }
      o.check(engine_mismatch == 0 && v_equivalent(with_ret, combined),
              std::string(g.category) + ": with ret -> '" + one_line(print_block(combined)) +
                  "', x3 equal on 1000/1000 sampled states");
      o.note("published '" + one_line(g.published) + "' computes a different x3 on " +
             std::to_string(published_mismatch) + "/1000 states");
      continue;
    }
    const std::string want = print_block(parse_block(g.published));
    if (got == want) {
      o.check(true, std::string(g.category) + ": '" + one_line(got) + "'");
      continue;
    }
    const EquivalenceVerdict v = io_equivalent(input, parse_block(g.published), 1000);
    std::string why = "engine '" + one_line(got) + "' != published '" + one_line(want) + "'";
    why += "; published vs input: " + std::string(verdict_name(v.verdict));
    if (v.witness) {
      why += " at trial " + std::to_string(v.witness->trial) + " on " +
             v.witness->mismatched_effect;
    }
    o.check(false, std::string(g.category) + ": " + why);
  }
  const double t = seconds_since(start);
  o.check(t < 1.0, "runtime " + fmt("%.3f", t) + " s < 1 s");
  return o;
}

CriterionResult criterion_equivalence() {
  CriterionResult o;
  const auto start = Clock::now();
  const BasicBlock a = parse_block(fixtures::kBlockA);
  const BasicBlock b = parse_block(fixtures::kBlockB);
  const BasicBlock d = parse_block(fixtures::kBlockD);
  const BasicBlock e = parse_block(fixtures::kBlockE);
  auto show = [&](const char* name, const BasicBlock& x, const BasicBlock& y) {
    const EquivalenceVerdict v = io_equivalent(x, y, 1000);
    o.check(v.verdict == Verdict::kEquivalent,
            std::string(name) + ": " + std::string(verdict_name(v.verdict)) + " (1000 trials)");
  };
  show("(b) vs (e)", b, e);
  show("(a) vs (b)", a, b);
  show("(a) vs (e)", a, e);
  const ValidationReport r = validate_block(d);
  bool movsl = false;
  for (const Diagnostic& diag : r.diagnostics) {
    movsl |= diag.code == DiagCode::kUnknownMnemonic && diag.line == 1;
  }
  o.check(!r.valid() && movsl, "(d) invalid: UnknownMnemonic 'movsl' on line 1");
  const SampleMetrics m = evaluate_sample(fixtures::kBlockB, fixtures::kBlockD, 1000);
  o.check(m.syntactic == 0 && m.io != IoOutcome::kPass,
          "(d) scored syntactic=0, io=" + std::string(io_outcome_name(m.io)));
  const double t = seconds_since(start);
  o.check(t < 5.0, "runtime " + fmt("%.3f", t) + " s < 5 s");
  return o;
}

CriterionResult criterion_taxonomy() {
  CriterionResult o;
  const ErrorCategory want[] = {ErrorCategory::kOpcode, ErrorCategory::kImmediateValue,
                                ErrorCategory::kLabel, ErrorCategory::kRegister};
  for (size_t i = 0; i < fixtures::kErrorExamples.size(); ++i) {
    const auto& ex = fixtures::kErrorExamples[i];
    const auto records =
        classify_errors(parse_block(fixtures::unescape_lines(ex.incorrect)),
                        parse_block(fixtures::unescape_lines(ex.correct)));
    std::string got;
    for (const ErrorRecord& r : records) {
      got += (got.empty() ? "" : ",") + std::string(error_category_name(r.category)) + "('" +
             r.token + "')";
    }
    o.check(records.size() == 1 && records[0].category == want[i],
            std::string(ex.category) + " row -> {" + got + "}");
  }
  return o;
}

CriterionResult criterion_properties() {
  CriterionResult o;
  const auto start = Clock::now();
  std::vector<std::string> blocks;
  for (const SamplePair& p : synth_blocks(500, 2026)) {
    blocks.push_back(p.nonopt);
    blocks.push_back(p.opt);
  }
  std::mt19937_64 rng(17);
  while (blocks.size() < 1500) blocks.push_back(generators::random_block(rng));

  long emr_bleu = 0, roundtrip = 0, idem = 0, grows = 0, divergent = 0, equivalent = 0;
  for (const std::string& t : blocks) {
    const BasicBlock b = parse_block(t);
    const std::string printed = print_block(b);
    roundtrip += parse_block(printed) == b &&
                 print_block(parse_block(generators::respace(printed))) == printed;
    const std::string variant = generators::respace(t);
    emr_bleu += emr(variant, t) == 1 && bleu(variant, t) == 1.0;
    const BasicBlock once = optimize(b).block;
    idem += print_block(optimize(once).block) == print_block(once);
    grows += once.instruction_count() > b.instruction_count();
    if (validate_block(b).valid()) {
      const Verdict v = io_equivalent(b, once, 50).verdict;
      divergent += v == Verdict::kDivergent;
      equivalent += v == Verdict::kEquivalent;
    }
  }
  const long n = static_cast<long>(blocks.size());
  o.check(n >= 1000, std::to_string(n) + " generated blocks");
  o.check(emr_bleu == n, "EMR=1 => BLEU=1 on " + std::to_string(emr_bleu) + "/" +
                             std::to_string(n) + " re-spaced variants");
  o.check(roundtrip == n, "parse/print round-trip " + std::to_string(roundtrip) + "/" +
                              std::to_string(n));
  o.check(idem == n, "optimize idempotent " + std::to_string(idem) + "/" + std::to_string(n));
  o.check(grows == 0, "optimize never grows a block (" + std::to_string(grows) + " grew)");
  o.check(divergent == 0 && equivalent >= 1000,
          "semantic preservation (trials=50): " + std::to_string(equivalent) +
              " equivalent, " + std::to_string(divergent) + " divergent");

  std::vector<SamplePair> pairs = synth_blocks(1000, 5);
  const std::vector<SamplePair> norm1 = normalize(pairs);
  const std::vector<SamplePair> norm2 = normalize(norm1);
  bool same = norm1.size() == norm2.size();
  for (size_t i = 0; same && i < norm1.size(); ++i) same = norm1[i].id == norm2[i].id;
  o.check(same, "normalize idempotent on " + std::to_string(norm1.size()) + " pairs");
  o.note("runtime " + fmt("%.2f", seconds_since(start)) + " s");
  return o;
}

CriterionResult criterion_oracle_closure() {
  CriterionResult o;
  const fs::path dir = scratch("closure");
  const auto start = Clock::now();
  std::ostringstream log, table;
  ExtractOptions x;
  x.synthetic = 500;
  x.out = (dir / "data.jsonl").string();
  x.jobs = 1;
  o.check(cmd_extract(x, log) == kExitOk, "extract --synthetic 500");
  RunConfig c;
  c.dataset = x.out;
  c.adapter.kind = AdapterKind::kOracle;
  c.jobs = 1;
  c.out = (dir / "cands.jsonl").string();
  o.check(cmd_optimize(c, log) == kExitOk, "optimize --adapter oracle");
  c.candidates = c.out;
  c.out = (dir / "eval").string();
  o.check(cmd_evaluate(c, table, log) == kExitOk, "evaluate");
  const double t = seconds_since(start);
  const json s = json::parse(slurp(dir / "eval" / "summary.json"))["overall"];
  o.check(s["n"].get<int>() == 500, "n = " + std::to_string(s["n"].get<int>()));
  for (const char* k : {"bleu", "emr", "syntactic", "io"}) {
    o.check(s[k].get<double>() == 1.0, std::string(k) + " = " + fmt("%.6f", s[k].get<double>()));
  }
  o.check(t < 60.0, "runtime " + fmt("%.2f", t) + " s < 60 s single-threaded");
  fs::remove_all(dir);
  return o;
}

CriterionResult criterion_flags() {
  CriterionResult o;
  const auto start = Clock::now();
  const flag_oracle::SweepResult r = flag_oracle::sweep_adds_subs();
  const double t = seconds_since(start);
  o.check(r.checked == 2 * 65536 && r.mismatches == 0,
          "adds/subs NZCV over all 65,536 8-bit operand pairs: " + std::to_string(r.checked) +
              " checks, " + std::to_string(r.mismatches) + " mismatches" +
              (r.first_mismatch.empty() ? "" : " (first: " + r.first_mismatch + ")"));
  o.check(t < 10.0, "runtime " + fmt("%.2f", t) + " s < 10 s");
  return o;
}

CriterionResult criterion_reproducibility() {
  CriterionResult o;
  o.note("NOT REPRODUCIBLE at desk scale: the published fine-tuned model numbers");
  o.note("(BLEU 0.92 / EMR 0.5 after fine-tuning; EMR 0.27-0.39 across test sets;");
  o.note("the model comparison table) need the trained 7B model and paid endpoints.");
  o.note("Criteria 1-7 and this shots-sweep smoke test stand in for them.");
  const fs::path dir = scratch("sweep");
  std::ostringstream log, out1, out2;
  ExtractOptions x;
  x.synthetic = 80;
  x.out = (dir / "data.jsonl").string();
  o.check(cmd_extract(x, log) == kExitOk, "extract --synthetic 80");
  RunConfig c;
  c.dataset = x.out;
  c.adapter.kind = AdapterKind::kReplay;
  c.adapter.cache_dir = (dir / "cache").string();
  fs::create_directories(c.adapter.cache_dir);
  c.k_min = 0;
  c.k_max = 5;
  c.sweep_samples = 20;
  c.out = (dir / "sweep.csv").string();
  const int primed = replay_fixture::prime_sweep_cache(read_dataset(x.out), c, c.adapter.cache_dir);
  o.note("primed replay cache with " + std::to_string(primed) +
         " scripted replies (20 samples x k=0..5)");
  o.check(cmd_shots_sweep(c, out1, log) == kExitOk, "shots-sweep from replay cache, no misses");
  const std::string first = slurp(c.out);
  o.check(cmd_shots_sweep(c, out2, log) == kExitOk && slurp(c.out) == first,
          "second run byte-identical");
  std::istringstream rows(first);
  std::string line;
  std::getline(rows, line);
  double last = -1.0;
  bool monotone = true;
  int count = 0;
  while (std::getline(rows, line)) {
    o.note(line);
    const double e = std::stod(line.substr(line.find(',') + 1));
    monotone &= e >= last;
    last = e;
    ++count;
  }
  o.check(count == 6 && monotone, "EMR curve over k=0..5 is non-decreasing");
  fs::remove_all(dir);
  return o;
}

const std::vector<std::pair<std::string, std::function<CriterionResult()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<CriterionResult()>>> c = {
      {"confidence-interval fidelity", criterion_ci},
      {"optimization goldens", criterion_goldens},
      {"equivalence fixture", criterion_equivalence},
      {"error-taxonomy goldens", criterion_taxonomy},
      {"metric laws (property suite)", criterion_properties},
      {"oracle closure end-to-end", criterion_oracle_closure},
      {"flag semantics", criterion_flags},
      {"reproducibility statement + shots-sweep smoke", criterion_reproducibility},
  };
  return c;
}

}  // namespace
}  // namespace peepbench

int main(int argc, char** argv) {
  using peepbench::criteria;
  int first = 1;
  int last = static_cast<int>(criteria().size());
  if (argc > 1) {
    first = last = std::atoi(argv[1]);
    if (first < 1 || first > static_cast<int>(criteria().size())) {
      std::cerr << "usage: acceptance [1-" << criteria().size() << "]\n";
      return 2;
    }
  }
  bool all = true;
  for (int i = first; i <= last; ++i) {
    const auto& [name, fn] = criteria()[static_cast<size_t>(i - 1)];
    peepbench::CriterionResult o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << ": " << name << "\n";
    for (const std::string& n : o.notes) std::cout << "    " << n << "\n";
    all &= o.pass;
  }
  return all ? 0 : 1;
}
