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

#include "peepbench/error_taxonomy.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "peepbench/metrics.h"
#include "peepbench/validate.h"

namespace peepbench {
namespace {

std::set<std::string> token_set(const Instruction& inst) {
  std::vector<std::string> toks = bleu_tokens(print_instruction(inst));
  return {toks.begin(), toks.end()};
}

double substitution_cost(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t common = 0;
  for (const std::string& t : a) common += b.count(t);
  const size_t uni = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

// Category a lone candidate operand falls into when it has no structural
// counterpart in the reference.
ErrorCategory kind_category(const Operand& op) {
  if (const auto* m = std::get_if<Malformed>(&op)) {
    switch (m->kind) {
      case MalformedKind::kImmediate: return ErrorCategory::kImmediateValue;
      case MalformedKind::kRegister: return ErrorCategory::kRegister;
      case MalformedKind::kLabel: return ErrorCategory::kLabel;
    }
  }
  if (std::holds_alternative<Imm>(op) || std::holds_alternative<FpImm>(op)) {
    return ErrorCategory::kImmediateValue;
  }
  if (std::holds_alternative<LabelRef>(op)) return ErrorCategory::kLabel;
  if (std::holds_alternative<Cond>(op)) return ErrorCategory::kOpcode;
  return ErrorCategory::kRegister;  // Register, ShiftedReg, ExtendedReg, Mem
}

struct Finding {
  ErrorCategory category;
  std::string token;
};

void compare_operands(const Operand& c, const Operand& r, std::vector<Finding>& out) {
  if (c == r) return;
  if (c.index() != r.index() || std::holds_alternative<Malformed>(c)) {
    out.push_back({kind_category(c), print_operand(c)});
    return;
  }
  if (const auto* cr = std::get_if<Register>(&c)) {
    out.push_back({ErrorCategory::kRegister, cr->name()});
  } else if (const auto* cs = std::get_if<ShiftedReg>(&c)) {
    const auto& rs = std::get<ShiftedReg>(r);
    if (cs->reg != rs.reg) out.push_back({ErrorCategory::kRegister, cs->reg.name()});
    if (cs->op != rs.op || cs->amount != rs.amount) {
      out.push_back({ErrorCategory::kImmediateValue, print_operand(c)});
    }
  } else if (const auto* ce = std::get_if<ExtendedReg>(&c)) {
    const auto& re = std::get<ExtendedReg>(r);
    if (ce->reg != re.reg) out.push_back({ErrorCategory::kRegister, ce->reg.name()});
    if (ce->op != re.op || ce->amount != re.amount) {
      out.push_back({ErrorCategory::kImmediateValue, print_operand(c)});
    }
  } else if (const auto* cm = std::get_if<Mem>(&c)) {
    const auto& rm = std::get<Mem>(r);
    if (cm->base != rm.base) out.push_back({ErrorCategory::kRegister, cm->base.name()});
    if (cm->index.has_value() != rm.index.has_value()) {
      out.push_back({ErrorCategory::kRegister, print_operand(c)});
    } else if (cm->index) {
      if (cm->index->reg != rm.index->reg) {
        out.push_back({ErrorCategory::kRegister, cm->index->reg.name()});
      }
      if (cm->index->op != rm.index->op || cm->index->amount != rm.index->amount) {
        out.push_back({ErrorCategory::kImmediateValue, print_operand(c)});
      }
    }
    if (cm->disp != rm.disp || cm->mode != rm.mode) {
      out.push_back({ErrorCategory::kImmediateValue, print_operand(c)});
    }
    if (cm->lo12 != rm.lo12) out.push_back({ErrorCategory::kLabel, cm->lo12.value_or("")});
  } else if (std::holds_alternative<Cond>(c)) {
    out.push_back({ErrorCategory::kOpcode, print_operand(c)});
  } else {
    out.push_back({kind_category(c), print_operand(c)});
  }
}

}  // namespace

std::string_view error_category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kOpcode: return "Opcode";
    case ErrorCategory::kRegister: return "Register";
    case ErrorCategory::kImmediateValue: return "ImmediateValue";
    case ErrorCategory::kLabel: return "Label";
  }
  return "?";
}

Alignment align_instructions(const BasicBlock& candidate, const BasicBlock& reference) {
  const std::vector<const Instruction*> c = candidate.instructions();
  const std::vector<const Instruction*> r = reference.instructions();
  const size_t n = c.size();
  const size_t m = r.size();
  std::vector<std::set<std::string>> ct(n), rt(m);
  for (size_t i = 0; i < n; ++i) ct[i] = token_set(*c[i]);
  for (size_t j = 0; j < m; ++j) rt[j] = token_set(*r[j]);

  std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, 0.0));
  for (size_t i = 1; i <= n; ++i) d[i][0] = d[i - 1][0] + kGapCost;
  for (size_t j = 1; j <= m; ++j) d[0][j] = d[0][j - 1] + kGapCost;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      d[i][j] = std::min({d[i - 1][j - 1] + substitution_cost(ct[i - 1], rt[j - 1]),
                          d[i - 1][j] + kGapCost, d[i][j - 1] + kGapCost});
    }
  }

  constexpr double kEps = 1e-12;
  Alignment out;
  out.cost = d[n][m];
  size_t i = n;
  size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        std::abs(d[i][j] - (d[i - 1][j - 1] + substitution_cost(ct[i - 1], rt[j - 1]))) < kEps) {
      out.pairs.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1)});
      --i;
      --j;
    } else if (i > 0 && std::abs(d[i][j] - (d[i - 1][j] + kGapCost)) < kEps) {
      out.pairs.push_back({static_cast<int>(i - 1), std::nullopt});
      --i;
    } else {
      out.pairs.push_back({std::nullopt, static_cast<int>(j - 1)});
      --j;
    }
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  return out;
}

std::vector<ErrorRecord> classify_errors(const BasicBlock& candidate,
                                         const BasicBlock& reference) {
  const std::vector<const Instruction*> c = candidate.instructions();
  const std::vector<const Instruction*> r = reference.instructions();
  std::vector<ErrorRecord> out;
  for (const AlignedPair& p : align_instructions(candidate, reference).pairs) {
    if (!p.candidate || !p.reference) continue;
    const Instruction& ci = *c[*p.candidate];
    const Instruction& ri = *r[*p.reference];
    if (ci == ri) continue;
    ErrorRecord base;
    base.candidate_line = print_instruction(ci);
    base.reference_line = print_instruction(ri);
    base.reference_mnemonic = ri.mnemonic;
    base.reference_index = *p.reference;

    if (ci.mnemonic != ri.mnemonic || !is_known_mnemonic(ci.mnemonic)) {
      ErrorRecord rec = base;
      rec.category = ErrorCategory::kOpcode;
      rec.token = ci.mnemonic;
      out.push_back(std::move(rec));
      continue;
    }
    std::vector<Finding> findings;
    const size_t common = std::min(ci.operands.size(), ri.operands.size());
    for (size_t k = 0; k < common; ++k) compare_operands(ci.operands[k], ri.operands[k], findings);
    for (size_t k = common; k < ci.operands.size(); ++k) {
      findings.push_back({kind_category(ci.operands[k]), print_operand(ci.operands[k])});
    }
    for (size_t k = common; k < ri.operands.size(); ++k) {
      findings.push_back({kind_category(ri.operands[k]), ""});
    }
    for (ErrorCategory cat : {ErrorCategory::kOpcode, ErrorCategory::kRegister,
                              ErrorCategory::kImmediateValue, ErrorCategory::kLabel}) {
      auto it = std::find_if(findings.begin(), findings.end(),
                             [&](const Finding& f) { return f.category == cat; });
      if (it == findings.end()) continue;
      ErrorRecord rec = base;
      rec.category = cat;
      rec.token = it->token;
      out.push_back(std::move(rec));
      if (cat == ErrorCategory::kOpcode) break;
    }
  }
  return out;
}

std::map<ErrorCategory, long> category_counts(const std::vector<ErrorRecord>& records) {
  std::map<ErrorCategory, long> out;
  for (ErrorCategory c : {ErrorCategory::kOpcode, ErrorCategory::kRegister,
                          ErrorCategory::kImmediateValue, ErrorCategory::kLabel}) {
    out[c] = 0;
  }
  for (const ErrorRecord& r : records) ++out[r.category];
  return out;
}

Interval confidence_interval(long errors, long total, double z) {
  if (total <= 0) throw DomainError("confidence_interval: total must be positive");
  if (errors < 0 || errors > total) {
    throw DomainError("confidence_interval: errors must lie in [0, total]");
  }
  Interval iv;
  iv.p = static_cast<double>(errors) / static_cast<double>(total);
  iv.halfwidth = z * std::sqrt(iv.p * (1.0 - iv.p) / static_cast<double>(total));
  return iv;
}

std::vector<MnemonicErrorStat> per_mnemonic_error_stats(
    const std::map<std::string, long>& error_counts,
    const std::map<std::string, long>& total_counts, long min_samples) {
  std::vector<MnemonicErrorStat> out;
  for (const auto& [mnemonic, total] : total_counts) {
    if (total <= min_samples) continue;
    auto it = error_counts.find(mnemonic);
    const long errors = std::min(it == error_counts.end() ? 0L : it->second, total);
    Interval iv = confidence_interval(errors, total);
    out.push_back({mnemonic, errors, total, iv.p, iv.halfwidth});
  }
  std::sort(out.begin(), out.end(), [](const MnemonicErrorStat& a, const MnemonicErrorStat& b) {
    if (a.error_prob != b.error_prob) return a.error_prob > b.error_prob;
    return a.mnemonic < b.mnemonic;
  });
  return out;
}

std::vector<MnemonicErrorStat> per_mnemonic_error_stats(
    const std::vector<ErrorRecord>& records, const std::map<std::string, long>& total_counts,
    long min_samples) {
  std::set<std::pair<std::string, int>> seen;
  std::map<std::string, long> errors;
  for (const ErrorRecord& r : records) {
    if (seen.insert({r.sample_id, r.reference_index}).second) ++errors[r.reference_mnemonic];
  }
  return per_mnemonic_error_stats(errors, total_counts, min_samples);
}

std::vector<MnemonicErrorStat> top_k(const std::vector<MnemonicErrorStat>& stats, size_t k) {
  std::vector<MnemonicErrorStat> out(stats.begin(),
                                     stats.begin() + static_cast<long>(std::min(k, stats.size())));
  return out;
}

std::vector<MnemonicErrorStat> bottom_k(const std::vector<MnemonicErrorStat>& stats, size_t k) {
  std::vector<MnemonicErrorStat> out = stats;
  std::sort(out.begin(), out.end(), [](const MnemonicErrorStat& a, const MnemonicErrorStat& b) {
    if (a.error_prob != b.error_prob) return a.error_prob < b.error_prob;
    return a.mnemonic < b.mnemonic;
  });
  out.resize(std::min(k, out.size()));
  return out;
}

std::string stats_to_csv(const std::vector<MnemonicErrorStat>& stats) {
  std::ostringstream os;
  os << "instr,error_count,total_count,error_prob,conf\n";
  char buf[64];
  for (const MnemonicErrorStat& s : stats) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", s.error_prob, s.conf);
    os << s.mnemonic << ',' << s.error_count << ',' << s.total_count << ',' << buf << '\n';
  }
  return os.str();
}

std::string stats_to_table(const std::vector<MnemonicErrorStat>& stats) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s %12s %12s %11s %10s\n", "Instr", "Error Count",
                "Total Count", "Error Prob", "Conf");
  os << buf;
  for (const MnemonicErrorStat& s : stats) {
    std::snprintf(buf, sizeof buf, "%-10s %12ld %12ld %11.6f %10.6f\n", s.mnemonic.c_str(),
                  s.error_count, s.total_count, s.error_prob, s.conf);
    os << buf;
  }
  return os.str();
}

}  // namespace peepbench
