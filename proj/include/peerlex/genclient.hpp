#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "peerlex/corpus.hpp"
#include "peerlex/errors.hpp"

namespace peerlex::gen {

struct GenerationConfig {
  std::string endpoint_url = "http://127.0.0.1:8000/v1";
  std::string model_name;
  std::string api_key_env = "OPENAI_API_KEY";
  int max_retries = 5;
  double backoff_base_s = 1.0;
  std::filesystem::path cache_dir = "cache";
  bool include_title = false;
  int workers = 4;
  double request_timeout_s = 300.0;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};
// Connection refused, DNS failure, read timeout. Not retried.
class TransportError : public GenerationError {
 public:
  using GenerationError::GenerationError;
};
// 4xx other than 429.
class PermanentError : public GenerationError {
 public:
  PermanentError(int status, const std::string& what)
      : GenerationError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};
// 429 / 5xx after max_retries.
class RetriesExhaustedError : public GenerationError {
 public:
  using GenerationError::GenerationError;
};
// 2xx body without choices[0].message.content.
class CompletionProtocolError : public GenerationError {
 public:
  using GenerationError::GenerationError;
};

// Request body: {"messages":[{"content":...,"role":"user"}],"model":...}.
// No system message and no sampling parameters.
std::string build_prompt_text(const Post& post, bool include_title);
std::string build_payload(const Post& post, const GenerationConfig& config);

struct HttpReply {
  int status = 0;
  std::string body;
};

// POST transport. The default implementation uses cpp-httplib; tests may
// substitute their own.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws TransportError when no HTTP exchange happened.
  virtual HttpReply post(const std::string& url, const std::string& body,
                         const std::map<std::string, std::string>& headers) = 0;
};

std::unique_ptr<Transport> make_http_transport(double timeout_s);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
// Digest of (model_name, prompt), joined by a NUL byte.
std::string cache_key(const std::string& model_name, const std::string& prompt);

struct CacheEntry {
  std::string key;
  std::string model_name;
  std::string prompt;
  std::string response;
  std::int64_t created_utc = 0;
  std::string endpoint_url;
};

// One JSON file per key under the cache directory, written atomically.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<CacheEntry> get(const std::string& key) const;
  void put(const CacheEntry& entry) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct GenerationStats {
  std::atomic<std::size_t> network_calls{0};
  std::atomic<std::size_t> retries{0};
};

class Client {
 public:
  using Clock = std::function<std::int64_t()>;
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  Client(GenerationConfig config, std::unique_ptr<Transport> transport);

  void set_clock(Clock clock) { clock_ = std::move(clock); }
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

  // Cache hit: no network call. Miss: POST, backoff on 429/5xx, store.
  Response generate_response(const Post& post, bool* cache_hit = nullptr);

  const GenerationConfig& config() const noexcept { return config_; }
  const GenerationStats& stats() const noexcept { return stats_; }

 private:
  std::string complete(const std::string& payload);

  GenerationConfig config_;
  std::unique_ptr<Transport> transport_;
  ResponseCache cache_;
  Clock clock_;
  Sleeper sleeper_;
  GenerationStats stats_;
};

struct GenerationSummary {
  std::size_t posts = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::vector<std::string> failed_post_ids;
  std::vector<std::string> failure_messages;
  bool partial() const noexcept { return !failed_post_ids.empty(); }
};

// One response per post, written in post order to `responses_path` (the
// file is rewritten, so a re-run against a warm cache reproduces it).
GenerationSummary run_generation(const Corpus& corpus, Client& client,
                                 const std::filesystem::path& responses_path);

std::string response_to_json(const Response& response);
std::string summary_to_json(const GenerationSummary& summary,
                            const std::string& model);

}  // namespace peerlex::gen
