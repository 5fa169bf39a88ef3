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

#include "peepbench/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "peepbench/asm.h"
#include "peepbench/validate.h"

namespace peepbench {
namespace {

bool is_separator(char c) { return c == ',' || c == '[' || c == ']' || c == '#' || c == ':'; }

std::string trim_trailing_per_line(std::string_view text) {
  std::string out;
  for (const std::string& line : split_block_lines(text)) {
    size_t end = line.find_last_not_of(" \t\r");
    if (!out.empty()) out += '\n';
    out += end == std::string::npos ? "" : line.substr(0, end + 1);
  }
  // Trailing empty lines carry no content.
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

// Canonical forms of both sides, parse+print only when both parse.
std::pair<std::string, std::string> comparable(std::string_view a, std::string_view b) {
  auto pa = try_parse_block(a);
  auto pb = try_parse_block(b);
  if (pa && pb) return {print_block(*pa), print_block(*pb)};
  return {trim_trailing_per_line(a), trim_trailing_per_line(b)};
}

using NGramCounts = std::map<std::vector<std::string>, int>;

NGramCounts ngrams(const std::vector<std::string>& toks, size_t n) {
  NGramCounts out;
  for (size_t i = 0; i + n <= toks.size(); ++i) {
    ++out[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)];
  }
  return out;
}

double bleu_tokens_score(const std::vector<std::string>& cand,
                         const std::vector<std::string>& ref) {
  const size_t c = cand.size();
  const size_t r = ref.size();
  if (c == 0) return 0.0;
  const size_t max_n = std::min<size_t>(4, c);
  double log_sum = 0.0;
  for (size_t n = 1; n <= max_n; ++n) {
    NGramCounts cn = ngrams(cand, n);
    NGramCounts rn = ngrams(ref, n);
    int matches = 0;
    for (const auto& [g, count] : cn) {
      auto it = rn.find(g);
      if (it != rn.end()) matches += std::min(count, it->second);
    }
    const double total = static_cast<double>(c - n + 1);
    double p;
    if (matches > 0) {
      p = matches / total;
    } else if (n == 1) {
      return 0.0;
    } else {
      p = 1.0 / (total + 1.0);
    }
    log_sum += std::log(p) / static_cast<double>(max_n);
  }
  const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
  return bp * std::exp(log_sum);
}

}  // namespace

std::vector<std::string> bleu_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else if (is_separator(ch)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur += ch;
    }
  }
  flush();
  return out;
}

std::string canonical_text(std::string_view text) {
  if (auto b = try_parse_block(text)) return print_block(*b);
  return trim_trailing_per_line(text);
}

double bleu(std::string_view candidate, std::string_view reference) {
  auto [c, r] = comparable(candidate, reference);
  return bleu_tokens_score(bleu_tokens(c), bleu_tokens(r));
}

int emr(std::string_view candidate, std::string_view reference) {
  auto [c, r] = comparable(candidate, reference);
  return !c.empty() && c == r ? 1 : 0;
}

std::string_view io_outcome_name(IoOutcome o) {
  switch (o) {
    case IoOutcome::kFail: return "fail";
    case IoOutcome::kPass: return "pass";
    case IoOutcome::kUncheckable: return "uncheckable";
  }
  return "?";
}

SampleMetrics evaluate_sample(std::string_view reference, std::string_view candidate, int trials,
                              uint64_t seed) {
  SampleMetrics m;
  m.bleu = bleu(candidate, reference);
  m.emr = emr(candidate, reference);
  auto cand = try_parse_block(candidate);
  if (!cand) {
    m.io_detail = "candidate does not parse";
    return m;
  }
  ValidationReport report = validate_block(*cand);
  m.syntactic = report.valid() ? 1 : 0;
  if (!report.valid()) {
    m.io_detail = "candidate fails validation";
    return m;
  }
  auto ref = try_parse_block(reference);
  if (!ref) {
    m.io = IoOutcome::kUncheckable;
    m.io_detail = "reference does not parse";
    return m;
  }
  EquivalenceVerdict v = io_equivalent(*cand, *ref, trials, seed);
  switch (v.verdict) {
    case Verdict::kEquivalent: m.io = IoOutcome::kPass; break;
    case Verdict::kDivergent: m.io = IoOutcome::kFail; break;
    case Verdict::kUncheckable: m.io = IoOutcome::kUncheckable; break;
  }
  m.io_detail = v.detail;
  return m;
}

MetricsSummary aggregate(const std::vector<SampleMetrics>& records) {
  if (records.empty()) throw EmptyInputError();
  MetricsSummary s;
  s.n = static_cast<int>(records.size());
  double bleu_sum = 0.0;
  int emr_sum = 0;
  int syn_sum = 0;
  int io_pass = 0;
  for (const SampleMetrics& r : records) {
    bleu_sum += r.bleu;
    emr_sum += r.emr;
    syn_sum += r.syntactic;
    if (r.io == IoOutcome::kUncheckable) {
      ++s.io_uncheckable;
    } else {
      ++s.io_checkable;
      io_pass += r.io == IoOutcome::kPass;
    }
  }
  s.bleu = bleu_sum / s.n;
  s.emr = static_cast<double>(emr_sum) / s.n;
  s.syntactic = static_cast<double>(syn_sum) / s.n;
  s.io = s.io_checkable ? static_cast<double>(io_pass) / s.io_checkable : 0.0;
  return s;
}

}  // namespace peepbench
