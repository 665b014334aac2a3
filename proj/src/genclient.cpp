#include "peerlex/genclient.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <httplib.h>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "io_util.hpp"

namespace peerlex::gen {

using nlohmann::json;

std::string build_prompt_text(const Post& post, bool include_title) {
  return query_text(post, include_title);
}

std::string build_payload(const Post& post, const GenerationConfig& config) {
  const json body = {
      {"model", config.model_name},
      {"messages", json::array({{{"role", "user"},
                                 {"content", build_prompt_text(post, config.include_title)}}})},
  };
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

// ---------------------------------------------------------------------------

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("endpoint '" + url + "' lacks a scheme");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(double timeout_s) : timeout_s_(timeout_s) {}

  HttpReply post(const std::string& url, const std::string& body,
                 const std::map<std::string, std::string>& headers) override {
    const auto [origin, path] = split_url(url);
    // One client per request: httplib clients are not safe for concurrent use.
    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(timeout_s_);
    const auto usecs = static_cast<time_t>((timeout_s_ - std::floor(timeout_s_)) * 1e6);
    client.set_connection_timeout(std::min<time_t>(secs, 30), usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto result = client.Post(path, h, body, "application/json");
    if (!result) throw TransportError("POST " + url + " failed: " + httplib::to_string(result.error()));
    return {result->status, result->body};
  }

 private:
  double timeout_s_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(double timeout_s) {
  return std::make_unique<HttpTransport>(timeout_s);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string cache_key(const std::string& model_name, const std::string& prompt) {
  std::string joined = model_name;
  joined.push_back('\0');
  joined += prompt;
  return sha256_hex(joined);
}

// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<CacheEntry> ResponseCache::get(const std::string& key) const {
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    const json j = json::parse(detail::read_file(path));
    CacheEntry e;
    e.key = j.at("key").get<std::string>();
    e.model_name = j.at("model_name").get<std::string>();
    e.prompt = j.at("prompt").get<std::string>();
    e.response = j.at("response").get<std::string>();
    e.created_utc = j.at("created_utc").get<std::int64_t>();
    e.endpoint_url = j.at("endpoint_url").get<std::string>();
    if (e.key != key || cache_key(e.model_name, e.prompt) != key) {
      std::cerr << "cache: ignoring " << path.string() << " (key does not match its content)\n";
      return std::nullopt;
    }
    return e;
  } catch (const std::exception& ex) {
    std::cerr << "cache: ignoring unreadable " << path.string() << ": " << ex.what() << "\n";
    return std::nullopt;
  }
}

void ResponseCache::put(const CacheEntry& entry) const {
  const json j = {{"key", entry.key},
                  {"model_name", entry.model_name},
                  {"prompt", entry.prompt},
                  {"response", entry.response},
                  {"created_utc", entry.created_utc},
                  {"endpoint_url", entry.endpoint_url}};
  detail::write_file_atomic(dir_ / (entry.key + ".json"),
                            j.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
}

// ---------------------------------------------------------------------------

Client::Client(GenerationConfig config, std::unique_ptr<Transport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(config_.cache_dir),
      clock_([] {
        return static_cast<std::int64_t>(std::chrono::duration_cast<std::chrono::seconds>(
                                             std::chrono::system_clock::now().time_since_epoch())
                                             .count());
      }),
      sleeper_([](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); }) {
  if (config_.model_name.empty()) throw InputError("generation needs a model name");
  if (config_.max_retries < 0) throw InputError("max_retries must be >= 0");
  if (!transport_) throw InputError("generation needs a transport");
}

std::string Client::complete(const std::string& payload) {
  std::string url = config_.endpoint_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  std::map<std::string, std::string> headers;
  if (!config_.api_key_env.empty())
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
      headers["Authorization"] = std::string("Bearer ") + key;

  for (int attempt = 0;; ++attempt) {
    stats_.network_calls.fetch_add(1);
    const HttpReply reply = transport_->post(url, payload, headers);
    if (reply.status >= 200 && reply.status < 300) {
      json body;
      try {
        body = json::parse(reply.body);
      } catch (const json::parse_error&) {
        throw CompletionProtocolError("completion body is not JSON");
      }
      const auto pointer = json::json_pointer("/choices/0/message/content");
      if (!body.contains(pointer) || !body[pointer].is_string())
        throw CompletionProtocolError("completion lacks choices[0].message.content");
      return body[pointer].get<std::string>();
    }
    const bool retryable = reply.status == 429 || reply.status >= 500;
    if (!retryable)
      throw PermanentError(reply.status, "endpoint answered HTTP " + std::to_string(reply.status) +
                                             ": " + reply.body.substr(0, 200));
    if (attempt >= config_.max_retries)
      throw RetriesExhaustedError("HTTP " + std::to_string(reply.status) + " after " +
                                  std::to_string(config_.max_retries) + " retries");
    stats_.retries.fetch_add(1);
    sleeper_(std::chrono::duration<double>(config_.backoff_base_s * std::ldexp(1.0, attempt)));
  }
}

Response Client::generate_response(const Post& post, bool* cache_hit) {
  const std::string prompt = build_prompt_text(post, config_.include_title);
  const std::string key = cache_key(config_.model_name, prompt);
  Response r;
  r.response_id = post.post_id + "::" + config_.model_name;
  r.post_id = post.post_id;
  r.source = Source::model(config_.model_name);

  if (auto entry = cache_.get(key)) {
    if (cache_hit) *cache_hit = true;
    r.body = std::move(entry->response);
    r.created_utc = entry->created_utc;
    return r;
  }
  if (cache_hit) *cache_hit = false;
  r.body = complete(build_payload(post, config_));
  r.created_utc = clock_();
  cache_.put({key, config_.model_name, prompt, r.body, r.created_utc, config_.endpoint_url});
  return r;
}

// ---------------------------------------------------------------------------

std::string response_to_json(const Response& response) {
  const json j = {{"response_id", response.response_id},
                  {"post_id", response.post_id},
                  {"source", response.source.name()},
                  {"body", response.body},
                  {"created_utc", response.created_utc}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

GenerationSummary run_generation(const Corpus& corpus, Client& client,
                                 const std::filesystem::path& responses_path) {
  const auto& posts = corpus.posts();
  std::vector<std::optional<Response>> responses(posts.size());
  std::vector<char> hits(posts.size(), 0);
  std::vector<std::string> errors(posts.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < posts.size();) {
      try {
        bool hit = false;
        responses[i] = client.generate_response(posts[i], &hit);
        hits[i] = hit;
      } catch (const GenerationError& e) {
        errors[i] = e.what();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, client.config().workers));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(n_threads, posts.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  GenerationSummary summary;
  summary.posts = posts.size();
  std::string out;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    if (!responses[i]) {
      summary.failed_post_ids.push_back(posts[i].post_id);
      summary.failure_messages.push_back(errors[i]);
      continue;
    }
    (hits[i] ? summary.cache_hits : summary.cache_misses)++;
    out += response_to_json(*responses[i]);
    out.push_back('\n');
  }
  detail::write_file_atomic(responses_path, out);
  return summary;
}

std::string summary_to_json(const GenerationSummary& summary, const std::string& model) {
  json failures = json::array();
  for (std::size_t i = 0; i < summary.failed_post_ids.size(); ++i)
    failures.push_back({{"post_id", summary.failed_post_ids[i]},
                        {"error", summary.failure_messages[i]}});
  const json j = {{"model", model},
                  {"posts", summary.posts},
                  {"cache_hits", summary.cache_hits},
                  {"cache_misses", summary.cache_misses},
                  {"failed", failures}};
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace peerlex::gen
