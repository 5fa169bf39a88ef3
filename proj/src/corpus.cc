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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "peepbench/asm.h"
#include "peepbench/hashing.h"

namespace peepbench {
namespace {

using json = nlohmann::ordered_json;

struct FunctionBlocks {
  std::string name;
  std::vector<std::string> blocks;  // printed block texts
};

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

// Real newlines only: listings may contain "\n" escapes inside strings.
std::vector<std::string> split_file_lines(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

// Splits a whole-file listing into functions and their basic blocks. A
// function starts at a label that is not assembler-local (".L*"); block
// boundaries are local labels and terminators; ".Lfunc_end*" closes the
// function. Blocks without instructions are not counted.
std::vector<FunctionBlocks> split_functions(std::string_view text, std::string_view file_name) {
  std::vector<FunctionBlocks> funcs;
  std::vector<BlockItem> current;
  bool in_function = false;

  auto close_block = [&] {
    bool has_inst = std::any_of(current.begin(), current.end(), [](const BlockItem& it) {
      return std::holds_alternative<Instruction>(it);
    });
    if (in_function && has_inst) funcs.back().blocks.push_back(print_block(BasicBlock(current)));
    current.clear();
  };

  const std::vector<std::string> lines = split_file_lines(text);
  for (size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::optional<BlockItem> item;
    try {
      item = parse_line(lines[i], line_no);
    } catch (const ParseError& e) {
      throw UnparseableFileError(std::string(file_name), line_no, e.what());
    }
    if (!item) continue;
    if (const auto* label = std::get_if<Label>(&*item)) {
      close_block();
      if (starts_with(label->name, ".Lfunc_end")) {
        in_function = false;
      } else if (!starts_with(label->name, ".L")) {
        funcs.push_back({label->name, {}});
        in_function = true;
      }
      continue;
    }
    if (!in_function) continue;
    current.push_back(*item);
    if (const auto* inst = std::get_if<Instruction>(&*item)) {
      if (is_terminator_mnemonic(inst->mnemonic)) close_block();
    }
  }
  close_block();
  return funcs;
}

json source_to_json(const SampleSource& s) {
  json j;
  if (s.kind == SampleSource::Kind::kIngested) {
    j["kind"] = "ingested";
    j["file"] = s.file;
    j["function"] = s.function;
    j["block_ordinal"] = s.block_ordinal;
  } else {
    j["kind"] = "synthetic";
    j["seed"] = s.generator_seed;
  }
  return j;
}

SampleSource source_from_json(const json& j) {
  SampleSource s;
  if (j.at("kind").get<std::string>() == "ingested") {
    s.kind = SampleSource::Kind::kIngested;
    s.file = j.at("file").get<std::string>();
    s.function = j.at("function").get<std::string>();
    s.block_ordinal = j.at("block_ordinal").get<int>();
  } else {
    s.kind = SampleSource::Kind::kSynthetic;
    s.generator_seed = j.at("seed").get<uint64_t>();
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string SampleSource::tag() const {
  if (kind == Kind::kSynthetic) return "synthetic";
  return std::filesystem::path(file).stem().string();
}

std::string pair_id(std::string_view nonopt, std::string_view opt) {
  std::string buf;
  buf.reserve(nonopt.size() + opt.size() + 1);
  buf.append(nonopt);
  buf.push_back('\0');
  buf.append(opt);
  return sha256_hex(buf).substr(0, 16);
}

SamplePair make_pair(SampleSource source, std::string nonopt, std::string opt) {
  SamplePair p;
  p.id = pair_id(nonopt, opt);
  p.source = std::move(source);
  if (auto b = try_parse_block(nonopt)) {
    for (const Instruction* inst : b->instructions()) ++p.histogram[inst->mnemonic];
  }
  p.nonopt = std::move(nonopt);
  p.opt = std::move(opt);
  return p;
}

std::vector<SamplePair> extract_pairs(std::string_view nonopt_asm, std::string_view opt_asm,
                                      std::string_view file_name, std::vector<std::string>* log) {
  std::vector<FunctionBlocks> lhs = split_functions(nonopt_asm, file_name);
  std::vector<FunctionBlocks> rhs = split_functions(opt_asm, file_name);
  std::map<std::string, const FunctionBlocks*> by_name;
  for (const FunctionBlocks& f : rhs) by_name[f.name] = &f;

  auto note = [&](const std::string& msg) {
    if (log) log->push_back(std::string(file_name) + ": " + msg);
  };

  std::vector<SamplePair> out;
  std::set<std::string> matched;
  for (const FunctionBlocks& f : lhs) {
    auto it = by_name.find(f.name);
    if (it == by_name.end()) {
      note("skip " + f.name + ": missing from optimized listing");
      continue;
    }
    matched.insert(f.name);
    const FunctionBlocks& g = *it->second;
    if (f.blocks.size() != g.blocks.size()) {
      note("skip " + f.name + ": block count " + std::to_string(f.blocks.size()) + " vs " +
           std::to_string(g.blocks.size()) + " (CFG changed)");
      continue;
    }
    for (size_t k = 0; k < f.blocks.size(); ++k) {
      SampleSource src;
      src.kind = SampleSource::Kind::kIngested;
      src.file = std::string(file_name);
      src.function = f.name;
      src.block_ordinal = static_cast<int>(k);
      out.push_back(make_pair(std::move(src), f.blocks[k], g.blocks[k]));
    }
  }
  for (const FunctionBlocks& g : rhs) {
    if (!matched.count(g.name)) note("skip " + g.name + ": missing from non-optimized listing");
  }
  return out;
}

bool kept_directive(std::string_view text) { return starts_with(text, ".cfi_"); }

std::vector<SamplePair> normalize(std::vector<SamplePair> pairs, int max_lines) {
  auto strip = [](const BasicBlock& b) {
    std::vector<BlockItem> items;
    for (const BlockItem& it : b.items()) {
      const auto* d = std::get_if<Directive>(&it);
      if (!d || kept_directive(d->text)) items.push_back(it);
    }
    return BasicBlock(std::move(items));
  };
  std::vector<SamplePair> out;
  std::set<std::string> seen;
  for (SamplePair& p : pairs) {
    auto nonopt = try_parse_block(p.nonopt);
    auto opt = try_parse_block(p.opt);
    if (!nonopt || !opt) continue;
    BasicBlock n = strip(*nonopt);
    BasicBlock o = strip(*opt);
    if (n.instruction_count() == 0 || o.instruction_count() == 0) continue;
    if (n.instruction_count() > max_lines) continue;
    SamplePair q = make_pair(std::move(p.source), print_block(n), print_block(o));
    if (seen.insert(q.id).second) out.push_back(std::move(q));
  }
  return out;
}

Dataset sample(const Dataset& dataset, size_t n, uint64_t seed) {
  if (n > dataset.pairs.size()) {
    throw NotEnoughSamplesError("sample: requested " + std::to_string(n) + " of " +
                                std::to_string(dataset.pairs.size()) + " pairs");
  }
  std::vector<std::pair<uint64_t, const SamplePair*>> ranked;
  ranked.reserve(dataset.pairs.size());
  for (const SamplePair& p : dataset.pairs) ranked.push_back({mix_seed(seed, fnv1a64(p.id)), &p});
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->id < b.second->id;
  });
  Dataset out;
  out.manifest = dataset.manifest;
  out.manifest.sample_n = static_cast<long>(n);
  out.manifest.sample_seed = seed;
  for (size_t i = 0; i < n; ++i) out.pairs.push_back(*ranked[i].second);
  refresh_counts(out);
  return out;
}

std::vector<std::pair<std::string, long>> corpus_stats(const Dataset& dataset) {
  std::map<std::string, long> counts;
  for (const SamplePair& p : dataset.pairs) {
    for (const auto& [m, c] : p.histogram) counts[m] += c;
  }
  std::vector<std::pair<std::string, long>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

void refresh_counts(Dataset& dataset) {
  dataset.manifest.counts_per_source.clear();
  for (const SamplePair& p : dataset.pairs) ++dataset.manifest.counts_per_source[p.source.tag()];
}

std::string pair_to_json(const SamplePair& pair) {
  json j;
  j["id"] = pair.id;
  j["source"] = source_to_json(pair.source);
  j["nonopt"] = pair.nonopt;
  j["opt"] = pair.opt;
  j["histogram"] = pair.histogram;
  return j.dump();
}

SamplePair pair_from_json(std::string_view line) {
  json j = json::parse(line);
  SamplePair p;
  p.id = j.at("id").get<std::string>();
  p.source = source_from_json(j.at("source"));
  p.nonopt = j.at("nonopt").get<std::string>();
  p.opt = j.at("opt").get<std::string>();
  if (j.contains("histogram")) p.histogram = j["histogram"].get<std::map<std::string, long>>();
  return p;
}

std::string manifest_to_json(const Manifest& m) {
  json j;
  j["created"] = m.created;
  j["normalization_version"] = m.normalization_version;
  j["counts_per_source"] = m.counts_per_source;
  if (m.sample_n) j["sample_n"] = *m.sample_n;
  if (m.sample_seed) j["sample_seed"] = *m.sample_seed;
  return j.dump(2);
}

Manifest manifest_from_json(std::string_view text) {
  json j = json::parse(text);
  Manifest m;
  m.created = j.value("created", "");
  m.normalization_version = j.value("normalization_version", std::string(kNormalizationVersion));
  if (j.contains("counts_per_source")) {
    m.counts_per_source = j["counts_per_source"].get<std::map<std::string, long>>();
  }
  if (j.contains("sample_n")) m.sample_n = j["sample_n"].get<long>();
  if (j.contains("sample_seed")) m.sample_seed = j["sample_seed"].get<uint64_t>();
  return m;
}

std::string manifest_path(const std::string& dataset_path) {
  return dataset_path + ".manifest.json";
}

void write_dataset(const std::string& path, const Dataset& dataset) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CorpusError("cannot write " + path);
    for (const SamplePair& pair : dataset.pairs) out << pair_to_json(pair) << '\n';
  }
  std::ofstream man(manifest_path(path), std::ios::binary);
  if (!man) throw CorpusError("cannot write " + manifest_path(path));
  man << manifest_to_json(dataset.manifest) << '\n';
}

Dataset read_dataset(const std::string& path) {
  Dataset d;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      SamplePair p = pair_from_json(line);
      if (!ids.insert(p.id).second) continue;
      d.pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw CorpusError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (std::filesystem::exists(manifest_path(path))) {
    try {
      d.manifest = manifest_from_json(read_file(manifest_path(path)));
    } catch (const json::exception& e) {
      throw CorpusError(manifest_path(path) + ": " + e.what());
    }
  } else {
    refresh_counts(d);
  }
  return d;
}

}  // namespace peepbench
