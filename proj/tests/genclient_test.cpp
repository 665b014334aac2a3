#include <gtest/gtest.h>

#include <json.hpp>

#include "peerlex/genclient.hpp"
#include "stub_endpoint.hpp"
#include "test_support.hpp"

using namespace peerlex;
using testing_support::TempDir;
using json = nlohmann::json;

namespace {

Corpus small_corpus(int n, const std::string& odd_marker = "") {
  Corpus c;
  for (int i = 0; i < n; ++i) {
    Post p;
    p.post_id = "q" + std::to_string(i);
    p.title = "title " + std::to_string(i);
    p.body = "I have been struggling lately, post number " + std::to_string(i) +
             (i == 1 && !odd_marker.empty() ? " " + odd_marker : "");
    c.add_post(p);
  }
  return c;
}

gen::GenerationConfig config_for(const StubEndpoint& stub, const TempDir& dir) {
  gen::GenerationConfig c;
  c.endpoint_url = stub.url();
  c.model_name = "stub-model";
  c.api_key_env = "PEERLEX_TEST_KEY";
  c.cache_dir = dir / "cache";
  c.max_retries = 2;
  c.backoff_base_s = 0.5;
  c.workers = 2;
  c.request_timeout_s = 10;
  return c;
}

std::unique_ptr<gen::Client> make_client(const gen::GenerationConfig& config,
                                         std::vector<double>* sleeps = nullptr) {
  auto client = std::make_unique<gen::Client>(config, gen::make_http_transport(config.request_timeout_s));
  client->set_clock([] { return std::int64_t{1700000000}; });
  client->set_sleeper([sleeps](std::chrono::duration<double> d) {
    if (sleeps) sleeps->push_back(d.count());
  });
  return client;
}

}  // namespace

TEST(Payload, CarriesOnlyModelAndOneUserMessage) {
  Post p;
  p.post_id = "x";
  p.title = "Title";
  p.body = "Body";
  gen::GenerationConfig c;
  c.model_name = "m";
  const auto j = json::parse(gen::build_payload(p, c));
  EXPECT_EQ(j.size(), 2u);
  EXPECT_EQ(j["model"], "m");
  ASSERT_EQ(j["messages"].size(), 1u);
  EXPECT_EQ(j["messages"][0]["role"], "user");
  EXPECT_EQ(j["messages"][0]["content"], "Body");
  for (const char* key : {"temperature", "top_p", "max_tokens", "seed", "n", "presence_penalty"})
    EXPECT_FALSE(j.contains(key)) << key;
  c.include_title = true;
  EXPECT_NE(gen::build_prompt_text(p, true).find("Title"), std::string::npos);
}

TEST(Hashing, Sha256AndCacheKey) {
  EXPECT_EQ(gen::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(gen::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(gen::cache_key("m", "p"), gen::sha256_hex(std::string("m\0p", 3)));
  EXPECT_NE(gen::cache_key("mp", ""), gen::cache_key("m", "p"));
}

TEST(Cache, RoundTripAndCorruptFileIsAMiss) {
  TempDir dir;
  gen::ResponseCache cache(dir / "c");
  gen::CacheEntry e{gen::cache_key("m", "hello"), "m", "hello", "reply", 42, "http://x"};
  cache.put(e);
  const auto back = cache.get(e.key);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->response, "reply");
  EXPECT_EQ(back->created_utc, 42);
  EXPECT_FALSE(cache.get(gen::cache_key("m", "other")));
  testing_support::write_file(dir / "c" / (e.key + ".json"), "{truncated");
  EXPECT_FALSE(cache.get(e.key));
}

TEST(Client, SecondRunIsServedFromCache) {
  TempDir dir;
  StubEndpoint stub;
  const auto corpus = small_corpus(6);
  const auto config = config_for(stub, dir);

  auto first = make_client(config);
  const auto s1 = gen::run_generation(corpus, *first, dir / "r1.jsonl");
  EXPECT_EQ(s1.cache_misses, 6u);
  EXPECT_EQ(first->stats().network_calls.load(), 6u);
  EXPECT_EQ(stub.calls(), 6);

  auto second = make_client(config);
  const auto s2 = gen::run_generation(corpus, *second, dir / "r2.jsonl");
  EXPECT_EQ(s2.cache_hits, 6u);
  EXPECT_EQ(second->stats().network_calls.load(), 0u);
  EXPECT_EQ(stub.calls(), 6);
  EXPECT_EQ(testing_support::read_file(dir / "r1.jsonl"), testing_support::read_file(dir / "r2.jsonl"));

  std::string posts;
  for (const auto& p : corpus.posts())
    posts += json{{"post_id", p.post_id}, {"community", "c"}, {"created_utc", 0}, {"title", p.title}, {"body", p.body}}
                 .dump() +
             "\n";
  testing_support::write_file(dir / "posts.jsonl", posts);
  const auto reloaded = load_corpus(dir / "posts.jsonl", dir / "r2.jsonl");
  EXPECT_EQ(reloaded.response_count(), 6u);
  EXPECT_EQ(reloaded.model_names(), std::vector<std::string>{"stub-model"});
}

TEST(Client, RetriesAfter429WithExponentialBackoff) {
  TempDir dir;
  StubEndpoint stub(2);
  auto config = config_for(stub, dir);
  std::vector<double> sleeps;
  auto client = make_client(config, &sleeps);
  const auto corpus = small_corpus(1);
  const auto r = client->generate_response(corpus.posts()[0]);
  EXPECT_EQ(stub.calls(), 3);
  EXPECT_EQ(client->stats().retries.load(), 2u);
  EXPECT_EQ(sleeps, (std::vector<double>{0.5, 1.0}));
  EXPECT_FALSE(r.body.empty());
  EXPECT_EQ(r.response_id, "q0::stub-model");
  EXPECT_EQ(r.created_utc, 1700000000);
}

TEST(Client, RetriesExhausted) {
  TempDir dir;
  StubEndpoint stub(10);
  auto config = config_for(stub, dir);
  auto client = make_client(config);
  EXPECT_THROW(client->generate_response(small_corpus(1).posts()[0]), gen::RetriesExhaustedError);
  EXPECT_EQ(stub.calls(), 3);
}

TEST(Client, PermanentFailureIsListedInSummary) {
  TempDir dir;
  StubEndpoint stub(0, "REJECT");
  const auto corpus = small_corpus(4, "REJECT");
  auto client = make_client(config_for(stub, dir));
  const auto summary = gen::run_generation(corpus, *client, dir / "r.jsonl");
  EXPECT_TRUE(summary.partial());
  EXPECT_EQ(summary.failed_post_ids, std::vector<std::string>{"q1"});
  EXPECT_EQ(summary.cache_misses, 3u);
  EXPECT_EQ(stub.calls(), 4);  // no retry on 400
  const auto j = json::parse(gen::summary_to_json(summary, "stub-model"));
  EXPECT_EQ(j["failed"][0]["post_id"], "q1");
}

TEST(Client, SerializedPayloadsHaveNoSamplingParameters) {
  TempDir dir;
  StubEndpoint stub;
  auto client = make_client(config_for(stub, dir));
  gen::run_generation(small_corpus(3), *client, dir / "r.jsonl");
  const auto bodies = stub.bodies();
  ASSERT_EQ(bodies.size(), 3u);
  for (const auto& b : bodies) {
    const auto j = json::parse(b);
    EXPECT_EQ(j.size(), 2u);
    EXPECT_TRUE(j.contains("model") && j.contains("messages"));
  }
}

TEST(Client, ApiKeyFromEnvironment) {
  TempDir dir;
  StubEndpoint stub;
  ::setenv("PEERLEX_TEST_KEY", "sekret", 1);
  auto client = make_client(config_for(stub, dir));
  client->generate_response(small_corpus(1).posts()[0]);
  ::unsetenv("PEERLEX_TEST_KEY");
  EXPECT_EQ(stub.auth_headers().at(0), "Bearer sekret");
}

TEST(Client, UnreachableEndpointIsATransportError) {
  TempDir dir;
  gen::GenerationConfig c;
  c.endpoint_url = "http://127.0.0.1:1/v1";
  c.model_name = "m";
  c.cache_dir = dir / "cache";
  c.request_timeout_s = 2;
  auto client = make_client(c);
  EXPECT_THROW(client->generate_response(small_corpus(1).posts()[0]), gen::TransportError);
}
