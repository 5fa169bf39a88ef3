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

#include <cctype>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "peepbench/asm.h"
#include "peepbench/hashing.h"
#include "peepbench/peephole.h"
#include "peepbench/validate.h"

namespace peepbench {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::string_view kPreamble =
    "You are an expert AArch64 compiler back end. Optimize the following "
    "basic block the way a peephole optimizer would: fold constants, apply "
    "algebraic identities, reduce strength, remove null sequences, combine "
    "operations and simplify addressing. Preserve the block's observable "
    "behavior (x0, stores outside its own stack frame, and its terminator). "
    "Reply with the optimized AArch64 assembly only.\n\n";

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string join_lines(const std::vector<std::string>& lines, size_t begin, size_t end) {
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (i > begin) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<std::string> split_newlines(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) out.push_back(trim(line));
  return out;
}

bool plain_operand(const Operand& op) {
  return std::holds_alternative<Register>(op) || std::holds_alternative<Imm>(op) ||
         std::holds_alternative<ShiftedReg>(op) || std::holds_alternative<ExtendedReg>(op) ||
         std::holds_alternative<Mem>(op);
}

// A line a model would emit as code rather than prose.
bool looks_like_asm(const std::string& line) {
  if (line.empty()) return false;
  std::optional<BlockItem> item;
  try {
    item = parse_line(line, 1);
  } catch (const ParseError&) {
    return false;
  }
  if (!item) return false;
  if (const auto* label = std::get_if<Label>(&*item)) {
    const char c = label->name.front();
    return c == '.' || c == '_' || std::islower(static_cast<unsigned char>(c));
  }
  if (std::holds_alternative<Directive>(*item)) return true;
  const auto& inst = std::get<Instruction>(*item);
  if (!std::islower(static_cast<unsigned char>(line.front()))) return false;
  if (is_known_mnemonic(inst.mnemonic)) return true;
  // Unknown mnemonics still count when the operands look machine-like, so a
  // hallucinated opcode is kept for the validator to reject.
  if (inst.operands.empty()) return false;
  for (const Operand& op : inst.operands) {
    if (!plain_operand(op)) return false;
  }
  return true;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start)
      .count();
}

void fill_extraction(AdapterResponse& r) {
  try {
    r.extracted = extract_code(r.text);
  } catch (const ExtractionFailure& e) {
    r.extraction_error = e.what();
  }
}

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw RemoteError(0, "endpoint must be an http(s) URL");
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string remote_call(const AdapterConfig& cfg, const std::string& prompt) {
  static RateLimiter limiter(cfg.rate_per_sec, cfg.burst);
  static InFlightGate gate(cfg.max_in_flight);

  const Endpoint ep = split_endpoint(cfg.endpoint);
  json body;
  body["model"] = cfg.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = 0;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg.backoff_ms << (attempt - 1)));
    }
    limiter.acquire();
    gate.enter();
    httplib::Result res;
    try {
      httplib::Client client(ep.scheme_host_port);
      client.set_connection_timeout(cfg.timeout_s, 0);
      client.set_read_timeout(cfg.timeout_s, 0);
      res = client.Post(ep.path, headers, payload, "application/json");
    } catch (...) {
      gate.leave();
      throw;
    }
    gate.leave();
    if (!res) {
      last_status = 0;
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    last_status = res->status;
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw RemoteError(res->status, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw RemoteError(res->status, std::string("malformed reply: ") + e.what());
    }
  }
  throw RemoteError(last_status, last_error + " after " + std::to_string(cfg.max_retries) +
                                     " retries");
}

}  // namespace

std::string_view default_preamble() { return kPreamble; }

std::string build_prompt(const PromptSpec& spec) {
  if (spec.shots.size() > kMaxShots) {
    throw std::invalid_argument("build_prompt: at most " + std::to_string(kMaxShots) + " shots");
  }
  std::string out = spec.preamble;
  for (const Shot& s : spec.shots) {
    out += "Input:\n" + s.nonopt + "\nOutput:\n" + s.opt + "\n";
  }
  out += "Input:\n" + spec.target + "\nOutput:\n";
  return out;
}

std::string target_from_prompt(std::string_view prompt) {
  const std::string_view tail_marker = "\nOutput:\n";
  if (prompt.size() < tail_marker.size() ||
      prompt.substr(prompt.size() - tail_marker.size()) != tail_marker) {
    throw std::invalid_argument("target_from_prompt: not a harness prompt");
  }
  const std::string_view body = prompt.substr(0, prompt.size() - tail_marker.size());
  const size_t input = body.rfind("Input:\n");
  if (input == std::string_view::npos) {
    throw std::invalid_argument("target_from_prompt: no Input section");
  }
  return std::string(body.substr(input + 7));
}

std::string_view adapter_kind_name(AdapterKind k) {
  switch (k) {
    case AdapterKind::kRemote: return "remote";
    case AdapterKind::kReplay: return "replay";
    case AdapterKind::kOracle: return "oracle";
  }
  return "?";
}

AdapterKind parse_adapter_kind(std::string_view name) {
  if (name == "remote") return AdapterKind::kRemote;
  if (name == "replay") return AdapterKind::kReplay;
  if (name == "oracle") return AdapterKind::kOracle;
  throw std::invalid_argument("unknown adapter: " + std::string(name));
}

std::string extract_code(std::string_view response) {
  const size_t fence = response.find("```");
  if (fence != std::string_view::npos) {
    size_t start = response.find('\n', fence);
    if (start != std::string_view::npos) {
      ++start;
      size_t end = response.find("```", start);
      if (end == std::string_view::npos) end = response.size();
      std::vector<std::string> lines = split_newlines(response.substr(start, end - start));
      size_t b = 0;
      size_t e = lines.size();
      while (b < e && lines[b].empty()) ++b;
      while (e > b && lines[e - 1].empty()) --e;
      if (b < e) return join_lines(lines, b, e);
    }
  }
  const std::vector<std::string> lines = split_newlines(response);
  size_t best_begin = 0;
  size_t best_len = 0;
  for (size_t i = 0; i < lines.size();) {
    if (!looks_like_asm(lines[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < lines.size() && looks_like_asm(lines[j])) ++j;
    if (j - i > best_len) {
      best_begin = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len == 0) throw ExtractionFailure("no assembly found in response");
  return join_lines(lines, best_begin, best_begin + best_len);
}

std::string cache_key(std::string_view prompt) { return sha256_hex(prompt); }

std::optional<CacheEntry> read_cache_entry(const std::string& dir, std::string_view prompt) {
  const fs::path path = fs::path(dir) / (cache_key(prompt) + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  try {
    json j = json::parse(os.str());
    CacheEntry e;
    e.prompt = j.at("prompt").get<std::string>();
    e.text = j.at("text").get<std::string>();
    e.latency_ms = j.value("latency_ms", int64_t{0});
    e.timestamp = j.value("timestamp", "");
    return e;
  } catch (const json::exception& e) {
    throw AdapterError("corrupt cache entry " + path.string() + ": " + e.what());
  }
}

void write_cache_entry(const std::string& dir, const CacheEntry& entry) {
  fs::create_directories(dir);
  const std::string key = cache_key(entry.prompt);
  const fs::path final_path = fs::path(dir) / (key + ".json");
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const fs::path tmp = fs::path(dir) / (key + ".json.tmp." + tid.str());
  json j;
  j["prompt"] = entry.prompt;
  j["text"] = entry.text;
  j["latency_ms"] = entry.latency_ms;
  j["timestamp"] = entry.timestamp.empty() ? utc_timestamp() : entry.timestamp;
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw AdapterError("cannot write cache entry " + tmp.string());
    out << j.dump(2) << '\n';
  }
  fs::rename(tmp, final_path);
}

RateLimiter::RateLimiter(double rate_per_sec, int burst)
    : rate_(rate_per_sec > 0 ? rate_per_sec : 1.0),
      capacity_(burst > 0 ? burst : 1),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  for (;;) {
    std::chrono::duration<double> wait{0};
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      tokens_ = std::min(capacity_,
                         tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    }
    std::this_thread::sleep_for(wait);
  }
}

void InFlightGate::enter() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
}

void InFlightGate::leave() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    --active_;
  }
  cv_.notify_one();
}

AdapterResponse query(const AdapterConfig& config, const std::string& prompt) {
  AdapterResponse r;
  r.adapter = config.kind;
  const auto start = std::chrono::steady_clock::now();
  switch (config.kind) {
    case AdapterKind::kOracle: {
      const std::string target = target_from_prompt(prompt);
      try {
        r.text = print_block(optimize(parse_block(target)).block);
      } catch (const ParseError&) {
        r.text = target;  // unparseable input is echoed unchanged
      }
      // In-process and pure: reported as 0 so oracle runs stay
      // byte-reproducible.
      r.latency_ms = 0;
      break;
    }
    case AdapterKind::kReplay: {
      std::optional<CacheEntry> e = read_cache_entry(config.cache_dir, prompt);
      if (!e) throw CacheMissError(cache_key(prompt));
      r.text = e->text;
      r.latency_ms = e->latency_ms;
      break;
    }
    case AdapterKind::kRemote: {
      if (!config.cache_dir.empty()) {
        if (std::optional<CacheEntry> e = read_cache_entry(config.cache_dir, prompt)) {
          r.text = e->text;
          r.latency_ms = e->latency_ms;
          break;
        }
      }
      r.text = remote_call(config, prompt);
      r.latency_ms = elapsed_ms(start);
      if (!config.cache_dir.empty()) {
        write_cache_entry(config.cache_dir, {prompt, r.text, r.latency_ms, ""});
      }
      break;
    }
  }
  fill_extraction(r);
  return r;
}

}  // namespace peepbench
