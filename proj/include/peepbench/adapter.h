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

// Candidate optimizers behind one interface: a remote chat-completions
// endpoint, a replay cache keyed by prompt hash, or the reference peephole
// engine. Also builds k-shot prompts and extracts code from replies.

#ifndef PEEPBENCH_ADAPTER_H_
#define PEEPBENCH_ADAPTER_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace peepbench {

inline constexpr std::string_view kPromptVersion = "prompt-v1";
inline constexpr size_t kMaxShots = 8;

// The versioned instruction preamble shipped with the harness.
std::string_view default_preamble();

struct Shot {
  std::string nonopt;
  std::string opt;
};

struct PromptSpec {
  std::string preamble{default_preamble()};
  std::vector<Shot> shots;
  std::string target;
};

// Preamble, then "Input:\n<nonopt>\nOutput:\n<opt>\n" per shot, then
// "Input:\n<target>\nOutput:\n". Throws std::invalid_argument for more than
// kMaxShots shots.
std::string build_prompt(const PromptSpec& spec);

// Recovers the target block from a prompt built by build_prompt.
std::string target_from_prompt(std::string_view prompt);

enum class AdapterKind : uint8_t { kRemote, kReplay, kOracle };

std::string_view adapter_kind_name(AdapterKind k);
AdapterKind parse_adapter_kind(std::string_view name);  // throws invalid_argument

struct AdapterConfig {
  AdapterKind kind = AdapterKind::kOracle;
  std::string endpoint;  // e.g. https://api.example.com/v1/chat/completions
  std::string model = "gpt-4o";
  std::string cache_dir;  // replay source; remote responses are cached here
  std::string api_key_env = "PEEPBENCH_API_KEY";
  int max_retries = 3;
  int backoff_ms = 250;  // doubled per retry
  int timeout_s = 60;
  double rate_per_sec = 2.0;
  int burst = 4;
  int max_in_flight = 4;
};

struct AdapterResponse {
  std::string text;
  std::optional<std::string> extracted;
  std::string extraction_error;
  int64_t latency_ms = 0;
  AdapterKind adapter = AdapterKind::kOracle;
};

class AdapterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RemoteError : public AdapterError {
 public:
  RemoteError(int status, const std::string& msg) : AdapterError(msg), status_(status) {}
  int status() const { return status_; }  // 0 for transport failures

 private:
  int status_;
};

class CacheMissError : public AdapterError {
 public:
  explicit CacheMissError(std::string hash)
      : AdapterError("cache miss: " + hash), hash_(std::move(hash)) {}
  const std::string& hash() const { return hash_; }

 private:
  std::string hash_;
};

class ExtractionFailure : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

// First fenced code region if any, else the longest run of consecutive lines
// that look like assembly; prose is stripped. Throws ExtractionFailure.
std::string extract_code(std::string_view response);

// Cache layout: <dir>/<sha256(prompt)>.json with {prompt, text, latency_ms,
// timestamp}. Writes go through a temp file and rename.
std::string cache_key(std::string_view prompt);
struct CacheEntry {
  std::string prompt;
  std::string text;
  int64_t latency_ms = 0;
  std::string timestamp;
};
std::optional<CacheEntry> read_cache_entry(const std::string& dir, std::string_view prompt);
void write_cache_entry(const std::string& dir, const CacheEntry& entry);

// Token bucket shared by remote calls.
class RateLimiter {
 public:
  RateLimiter(double rate_per_sec, int burst);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// Bounds concurrent remote requests.
class InFlightGate {
 public:
  explicit InFlightGate(int limit) : limit_(limit > 0 ? limit : 1) {}
  void enter();
  void leave();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int limit_;
  int active_ = 0;
};

// One adapter call. Remote calls use process-wide limiter/gate instances
// sized by the first config seen. Extraction failures are reported in the
// response rather than thrown.
AdapterResponse query(const AdapterConfig& config, const std::string& prompt);

}  // namespace peepbench

#endif  // PEEPBENCH_ADAPTER_H_
