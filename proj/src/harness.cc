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

#include "peepbench/harness.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "peepbench/asm.h"
#include "peepbench/hashing.h"

namespace peepbench {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string manifest_hash(const Dataset& d) { return sha256_hex(manifest_to_json(d.manifest)); }

json provenance(const RunConfig& config, const Dataset& dataset) {
  json j;
  j["tool_version"] = kToolVersion;
  j["run_config"] = json::parse(run_config_to_json(config));
  j["dataset_manifest_sha256"] = manifest_hash(dataset);
  j["bleu_config"] = kBleuConfig;
  j["normalization_version"] = dataset.manifest.normalization_version;
  return j;
}

json summary_to_json(const MetricsSummary& s) {
  json j;
  j["n"] = s.n;
  j["bleu"] = s.bleu;
  j["emr"] = s.emr;
  j["syntactic"] = s.syntactic;
  j["io"] = s.io;
  j["io_checkable"] = s.io_checkable;
  j["io_uncheckable"] = s.io_uncheckable;
  return j;
}

std::map<std::string, std::string> candidate_map(const std::vector<Candidate>& cands) {
  std::map<std::string, std::string> out;
  for (const Candidate& c : cands) out.emplace(c.id, c.candidate);
  return out;
}

const Dataset& shot_pool(const RunConfig& config, const Dataset& dataset, Dataset& storage) {
  if (config.shots_from.empty() || config.shots_from == config.dataset) return dataset;
  storage = read_dataset(config.shots_from);
  return storage;
}

void report_misses(const std::vector<std::string>& misses, std::ostream& log) {
  std::vector<std::string> sorted = misses;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  log << "CacheMiss: " << sorted.size() << " prompt(s) not in replay cache\n";
  for (const std::string& h : sorted) log << "  " << h << "\n";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["dataset"] = c.dataset;
  j["candidates"] = c.candidates;
  j["shots_from"] = c.shots_from;
  j["adapter"] = {{"kind", adapter_kind_name(c.adapter.kind)},
                  {"endpoint", c.adapter.endpoint},
                  {"model", c.adapter.model},
                  {"cache_dir", c.adapter.cache_dir}};
  j["prompt_version"] = kPromptVersion;
  j["shots"] = c.shots;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["jobs"] = c.jobs;
  j["min_samples"] = c.min_samples;
  j["top"] = c.top;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["sweep_samples"] = c.sweep_samples;
  return j.dump();
}

std::string candidate_to_json(const Candidate& c) {
  json j;
  j["id"] = c.id;
  j["candidate"] = c.candidate;
  j["latency_ms"] = c.latency_ms;
  j["shots"] = c.shots;
  if (!c.error.empty()) j["error"] = c.error;
  return j.dump();
}

std::vector<Candidate> read_candidates(const std::string& path, std::ostream& log) {
  std::istringstream in(read_text(path));
  std::vector<Candidate> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      Candidate c;
      c.id = j.at("id").get<std::string>();
      c.candidate = j.value("candidate", "");
      c.latency_ms = j.value("latency_ms", int64_t{0});
      c.shots = j.value("shots", 0);
      c.error = j.value("error", "");
      out.push_back(std::move(c));
    } catch (const json::exception& e) {
      log << path << ":" << line_no << ": skipping malformed candidate line\n";
    }
  }
  return out;
}

void write_candidates(const std::string& path, const std::vector<Candidate>& candidates) {
  std::string text;
  for (const Candidate& c : candidates) text += candidate_to_json(c) + "\n";
  write_text(path, text);
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(std::max(jobs, 1), std::max<size_t>(n, 1));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Shot> select_shots(const Dataset& pool, int k, uint64_t seed) {
  if (k < 0) throw std::invalid_argument("shots must be non-negative");
  Dataset picked = sample(pool, static_cast<size_t>(k), seed);
  std::vector<Shot> out;
  for (const SamplePair& p : picked.pairs) out.push_back({p.nonopt, p.opt});
  return out;
}

std::vector<Candidate> generate_candidates(const std::vector<SamplePair>& targets,
                                           const std::vector<Shot>& shots,
                                           const AdapterConfig& adapter, int jobs,
                                           std::vector<std::string>* misses) {
  std::vector<Candidate> out(targets.size());
  std::mutex miss_mu;
  parallel_for(targets.size(), jobs, [&](size_t i) {
    PromptSpec spec;
    spec.shots = shots;
    spec.target = targets[i].nonopt;
    const std::string prompt = build_prompt(spec);
    Candidate& c = out[i];
    c.id = targets[i].id;
    c.shots = static_cast<int>(shots.size());
    try {
      AdapterResponse r = query(adapter, prompt);
      c.latency_ms = r.latency_ms;
      if (r.extracted) {
        c.candidate = *r.extracted;
      } else {
        c.error = r.extraction_error;
      }
    } catch (const CacheMissError& e) {
      c.error = e.what();
      std::lock_guard<std::mutex> lock(miss_mu);
      if (misses) misses->push_back(e.hash());
    } catch (const AdapterError& e) {
      c.error = e.what();
    }
  });
  return out;
}

std::vector<SampleMetrics> score_candidates(const std::vector<SamplePair>& pairs,
                                            const std::map<std::string, std::string>& candidates,
                                            int trials, uint64_t seed, int jobs) {
  std::vector<SampleMetrics> out(pairs.size());
  parallel_for(pairs.size(), jobs, [&](size_t i) {
    auto it = candidates.find(pairs[i].id);
    const std::string cand = it == candidates.end() ? "" : it->second;
    out[i] = evaluate_sample(pairs[i].opt, cand, trials, mix_seed(seed, fnv1a64(pairs[i].id)));
  });
  return out;
}

std::string format_summary_table(const std::vector<std::pair<std::string, MetricsSummary>>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-20s %6s %9s %9s %10s %9s %12s\n", "source", "n", "BLEU",
                "EMR", "Syntactic", "IO", "IO-uncheck");
  os << buf;
  for (const auto& [tag, s] : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %6d %9.4f %9.4f %10.4f %9.4f %12d\n", tag.c_str(), s.n,
                  s.bleu, s.emr, s.syntactic, s.io, s.io_uncheckable);
    os << buf;
  }
  return os.str();
}

int cmd_extract(const ExtractOptions& options, std::ostream& log) {
  if (options.out.empty()) throw std::invalid_argument("extract: --out is required");
  if (options.max_lines < 1 || options.max_lines > kMaxBlockLines) {
    throw std::invalid_argument("extract: --max-lines must be in [1, 15]");
  }
  Dataset d;
  bool failures = false;
  if (options.synthetic) {
    d.pairs = normalize(synth_blocks(*options.synthetic, options.seed, options.max_lines),
                        options.max_lines);
    d.manifest.created = "synthetic(count=" + std::to_string(*options.synthetic) +
                         ",seed=" + std::to_string(options.seed) +
                         ",max_lines=" + std::to_string(options.max_lines) + ")";
  } else {
    if (options.input_dir.empty() || !fs::is_directory(options.input_dir)) {
      throw std::invalid_argument("extract: --input must be a directory");
    }
    std::vector<std::string> stems;
    for (const fs::directory_entry& e : fs::directory_iterator(options.input_dir)) {
      const std::string name = e.path().filename().string();
      const std::string suffix = ".O0.s";
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        stems.push_back(name.substr(0, name.size() - suffix.size()));
      }
    }
    std::sort(stems.begin(), stems.end());
    std::vector<std::vector<SamplePair>> per_file(stems.size());
    std::vector<std::vector<std::string>> logs(stems.size());
    std::vector<char> failed(stems.size(), 0);
    parallel_for(stems.size(), options.jobs, [&](size_t i) {
      const fs::path dir(options.input_dir);
      const fs::path opt_path = dir / (stems[i] + ".opt.s");
      if (!fs::exists(opt_path)) {
        logs[i].push_back(stems[i] + ": missing " + opt_path.filename().string());
        failed[i] = 1;
        return;
      }
      try {
        per_file[i] = extract_pairs(read_text((dir / (stems[i] + ".O0.s")).string()),
                                    read_text(opt_path.string()), stems[i] + ".s", &logs[i]);
      } catch (const UnparseableFileError& e) {
        logs[i].push_back(std::string("UnparseableFile: ") + e.what());
        failed[i] = 1;
      }
    });
    std::vector<SamplePair> all;
    for (size_t i = 0; i < stems.size(); ++i) {
      for (const std::string& l : logs[i]) log << l << "\n";
      failures |= failed[i] != 0;
      for (SamplePair& p : per_file[i]) all.push_back(std::move(p));
    }
    d.pairs = normalize(std::move(all), options.max_lines);
    d.manifest.created = "extract(files=" + std::to_string(stems.size()) +
                         ",max_lines=" + std::to_string(options.max_lines) + ")";
  }
  refresh_counts(d);
  if (options.sample_n) d = sample(d, static_cast<size_t>(*options.sample_n), options.seed);
  write_dataset(options.out, d);
  log << "wrote " << d.pairs.size() << " pairs to " << options.out << "\n";
  return failures ? kExitInput : kExitOk;
}

int cmd_optimize(const RunConfig& config, std::ostream& log) {
  if (config.out.empty()) throw std::invalid_argument("optimize: --out is required");
  const Dataset d = read_dataset(config.dataset);
  Dataset pool_storage;
  const std::vector<Shot> shots =
      select_shots(shot_pool(config, d, pool_storage), config.shots, config.seed);
  std::vector<std::string> misses;
  std::vector<Candidate> cands =
      generate_candidates(d.pairs, shots, config.adapter, config.jobs, &misses);
  write_candidates(config.out, cands);
  json run = provenance(config, d);
  run["cache_misses"] = misses.size();
  write_text(config.out + ".run.json", run.dump(2) + "\n");
  log << "wrote " << cands.size() << " candidates to " << config.out << "\n";
  if (!misses.empty()) {
    report_misses(misses, log);
    return kExitInput;
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& log) {
  if (config.out.empty()) throw std::invalid_argument("evaluate: --out is required");
  const Dataset d = read_dataset(config.dataset);
  if (d.pairs.empty()) throw std::invalid_argument("evaluate: dataset is empty");
  const std::vector<Candidate> cands = read_candidates(config.candidates, log);
  const std::map<std::string, std::string> by_id = candidate_map(cands);
  const std::vector<SampleMetrics> metrics =
      score_candidates(d.pairs, by_id, config.trials, config.seed, config.jobs);

  std::string samples;
  std::map<std::string, std::vector<SampleMetrics>> by_tag;
  int missing = 0;
  for (size_t i = 0; i < d.pairs.size(); ++i) {
    const SampleMetrics& m = metrics[i];
    missing += by_id.count(d.pairs[i].id) == 0;
    json j;
    j["id"] = d.pairs[i].id;
    j["source"] = d.pairs[i].source.tag();
    j["bleu"] = m.bleu;
    j["emr"] = m.emr;
    j["syntactic"] = m.syntactic;
    j["io"] = io_outcome_name(m.io);
    j["io_detail"] = m.io_detail;
    samples += j.dump() + "\n";
    by_tag[d.pairs[i].source.tag()].push_back(m);
  }
  if (missing) log << missing << " sample(s) had no candidate; scored as empty\n";

  std::vector<std::pair<std::string, MetricsSummary>> rows;
  json per_source;
  for (const auto& [tag, ms] : by_tag) {
    MetricsSummary s = aggregate(ms);
    rows.push_back({tag, s});
    per_source[tag] = summary_to_json(s);
  }
  const MetricsSummary overall = aggregate(metrics);
  rows.push_back({"overall", overall});

  json summary = provenance(config, d);
  summary["overall"] = summary_to_json(overall);
  summary["per_source"] = per_source;
  const std::string table = format_summary_table(rows);

  const fs::path dir(config.out);
  write_text(dir / "samples.jsonl", samples);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  write_text(dir / "summary.txt", table);
  out << table;
  return kExitOk;
}

int cmd_errors(const RunConfig& config, std::ostream& out, std::ostream& log) {
  if (config.out.empty()) throw std::invalid_argument("errors: --out is required");
  const Dataset d = read_dataset(config.dataset);
  const std::map<std::string, std::string> by_id =
      candidate_map(read_candidates(config.candidates, log));

  std::vector<ErrorRecord> records;
  std::map<std::string, long> totals;
  long unparseable = 0;
  long failing = 0;
  for (const SamplePair& p : d.pairs) {
    auto ref = try_parse_block(p.opt);
    if (!ref) continue;
    for (const Instruction* inst : ref->instructions()) ++totals[inst->mnemonic];
    auto it = by_id.find(p.id);
    const std::string cand = it == by_id.end() ? "" : it->second;
    if (emr(cand, p.opt)) continue;
    ++failing;
    auto parsed = try_parse_block(cand);
    if (!parsed) {
      ++unparseable;
      continue;
    }
    for (ErrorRecord& r : classify_errors(*parsed, *ref)) {
      r.sample_id = p.id;
      records.push_back(std::move(r));
    }
  }

  // A run without error records has nothing to rank: tables stay empty.
  const std::vector<MnemonicErrorStat> stats =
      records.empty() ? std::vector<MnemonicErrorStat>{}
                      : per_mnemonic_error_stats(records, totals, config.min_samples);
  const std::vector<MnemonicErrorStat> top = top_k(stats, static_cast<size_t>(config.top));
  const std::vector<MnemonicErrorStat> bottom = bottom_k(stats, static_cast<size_t>(config.top));
  const std::map<ErrorCategory, long> cats = category_counts(records);

  std::ostringstream text;
  text << "Error categories (" << records.size() << " records over " << failing
       << " non-matching samples; " << unparseable << " unparseable)\n";
  std::string cat_csv = "category,count\n";
  json cat_json;
  for (const auto& [c, n] : cats) {
    text << "  " << error_category_name(c) << ": " << n << "\n";
    cat_csv += std::string(error_category_name(c)) + "," + std::to_string(n) + "\n";
    cat_json[std::string(error_category_name(c))] = n;
  }
  text << "\nMost error-prone instructions (total > " << config.min_samples << ")\n"
       << stats_to_table(top) << "\nLeast error-prone instructions\n"
       << stats_to_table(bottom);

  std::string records_jsonl;
  for (const ErrorRecord& r : records) {
    json j;
    j["sample_id"] = r.sample_id;
    j["category"] = error_category_name(r.category);
    j["token"] = r.token;
    j["candidate_line"] = r.candidate_line;
    j["reference_line"] = r.reference_line;
    j["reference_mnemonic"] = r.reference_mnemonic;
    records_jsonl += j.dump() + "\n";
  }

  json report = provenance(config, d);
  report["categories"] = cat_json;
  report["failing_samples"] = failing;
  report["unparseable_candidates"] = unparseable;
  auto rows = [](const std::vector<MnemonicErrorStat>& v) {
    json a = json::array();
    for (const MnemonicErrorStat& s : v) {
      a.push_back({{"instr", s.mnemonic},
                   {"error_count", s.error_count},
                   {"total_count", s.total_count},
                   {"error_prob", s.error_prob},
                   {"conf", s.conf}});
    }
    return a;
  };
  report["top"] = rows(top);
  report["bottom"] = rows(bottom);

  const fs::path dir(config.out);
  write_text(dir / "categories.csv", cat_csv);
  write_text(dir / "mnemonic_stats.csv", stats_to_csv(stats));
  write_text(dir / "errors.jsonl", records_jsonl);
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "report.txt", text.str());
  out << text.str();
  return kExitOk;
}

int cmd_shots_sweep(const RunConfig& config, std::ostream& out, std::ostream& log) {
  if (config.out.empty()) throw std::invalid_argument("shots-sweep: --out is required");
  if (config.k_min < 0 || config.k_max < config.k_min ||
      config.k_max > static_cast<int>(kMaxShots)) {
    throw std::invalid_argument("shots-sweep: need 0 <= k-min <= k-max <= 8");
  }
  const Dataset d = read_dataset(config.dataset);
  const size_t n = std::min<size_t>(static_cast<size_t>(config.sweep_samples), d.pairs.size());
  const Dataset targets = sample(d, n, config.seed);

  // Shots come from pairs outside the evaluated sub-sample.
  Dataset pool_storage;
  Dataset pool = shot_pool(config, d, pool_storage);
  std::set<std::string> target_ids;
  for (const SamplePair& p : targets.pairs) target_ids.insert(p.id);
  pool.pairs.erase(std::remove_if(pool.pairs.begin(), pool.pairs.end(),
                                  [&](const SamplePair& p) { return target_ids.count(p.id); }),
                   pool.pairs.end());

  std::string csv = "k,emr,bleu,n\n";
  std::vector<std::string> misses;
  json rows = json::array();
  for (int k = config.k_min; k <= config.k_max; ++k) {
    const std::vector<Shot> shots = select_shots(pool, k, config.seed);
    const std::vector<Candidate> cands =
        generate_candidates(targets.pairs, shots, config.adapter, config.jobs, &misses);
    const MetricsSummary s = aggregate(score_candidates(targets.pairs, candidate_map(cands),
                                                        config.trials, config.seed, config.jobs));
    csv += std::to_string(k) + "," + format_double(s.emr) + "," + format_double(s.bleu) + "," +
           std::to_string(s.n) + "\n";
    rows.push_back({{"k", k}, {"emr", s.emr}, {"bleu", s.bleu}, {"n", s.n}});
  }
  json run = provenance(config, d);
  run["sweep"] = rows;
  write_text(config.out, csv);
  write_text(config.out + ".run.json", run.dump(2) + "\n");
  out << csv;
  if (!misses.empty()) {
    report_misses(misses, log);
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace peepbench
