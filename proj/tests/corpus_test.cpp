#include <gtest/gtest.h>

#include "peerlex/corpus.hpp"
#include "peerlex/metrics.hpp"
#include "test_support.hpp"

using namespace peerlex;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

Post post(const std::string& id, const std::string& body = "some body") {
  Post p;
  p.post_id = id;
  p.community = "c";
  p.body = body;
  return p;
}

Response response(const std::string& id, const std::string& post_id, Source source,
                  const std::string& body = "reply") {
  Response r;
  r.response_id = id;
  r.post_id = post_id;
  r.source = std::move(source);
  r.body = body;
  return r;
}

MeasureRow row(const Response& r, double value) {
  MeasureRow m;
  m.response_id = r.response_id;
  m.post_id = r.post_id;
  m.source = r.source.name();
  m.values["x"] = value;
  return m;
}

// 50 posts, 4 human replies each, one stub reply each.
struct Synthetic {
  Corpus corpus;
  std::vector<MeasureRow> rows;

  explicit Synthetic(std::size_t skip_model_every = 0) {
    for (int p = 0; p < 50; ++p) {
      const std::string id = "p" + std::to_string(p);
      corpus.add_post(post(id));
      for (int h = 0; h < 4; ++h) {
        auto r = response(id + "::h" + std::to_string(h), id, Source::human());
        corpus.add_response(r);
        rows.push_back(row(r, p + h));  // mean p + 1.5
      }
      if (skip_model_every && p % skip_model_every == 0) continue;
      auto m = response(id + "::stub", id, Source::model("stub"));
      corpus.add_response(m);
      rows.push_back(row(m, 2.0 * p));
    }
  }
};

}  // namespace

TEST(Source, ParsingAndValidation) {
  EXPECT_TRUE(Source::parse("human").is_human());
  EXPECT_EQ(Source::parse("gpt-x").name(), "gpt-x");
  EXPECT_THROW(Source::model("human"), InputError);
  EXPECT_THROW(Source::parse(""), InputError);
}

TEST(Corpus, BuilderInvariants) {
  Corpus c;
  c.add_post(post("a"));
  EXPECT_THROW(c.add_post(post("a")), InputError);
  EXPECT_THROW(c.add_post(post("b", "   ")), InputError);
  c.add_response(response("r1", "a", Source::human()));
  EXPECT_THROW(c.add_response(response("r1", "a", Source::human())), InputError);
  EXPECT_THROW(c.add_response(response("r2", "zzz", Source::human())), InputError);
  c.add_response(response("r3", "a", Source::model("m")));
  EXPECT_THROW(c.add_response(response("r4", "a", Source::model("m"))), InputError);
  EXPECT_EQ(c.response_count(), 2u);
  EXPECT_EQ(c.model_names(), std::vector<std::string>{"m"});
}

TEST(Corpus, LoadsJsonlAndRejectsBlankPosts) {
  TempDir dir;
  write_file(dir / "posts.jsonl",
             R"({"post_id":"a","community":"c","created_utc":1,"title":"t","body":"hello"})"
             "\n\n"
             R"({"post_id":"b","community":"c","created_utc":2,"title":"t","body":"  "})"
             "\n");
  write_file(dir / "responses.jsonl",
             R"({"response_id":"a1","post_id":"a","source":"human","body":"hi","created_utc":3})"
             "\n"
             R"({"response_id":"b1","post_id":"b","source":"human","body":"hi","created_utc":3})"
             "\n");
  write_file(dir / "model.jsonl",
             R"({"response_id":"a2","post_id":"a","source":"m","body":"hey","created_utc":4})"
             "\n");
  const auto c = load_corpus(dir / "posts.jsonl", std::vector<std::filesystem::path>{
                                                      dir / "responses.jsonl", dir / "model.jsonl"});
  EXPECT_EQ(c.posts().size(), 1u);
  EXPECT_EQ(c.report().posts_rejected, 1u);
  EXPECT_EQ(c.report().responses_loaded, 2u);
  EXPECT_EQ(c.report().responses_rejected, 1u);
  EXPECT_EQ(c.responses_for(0).size(), 2u);
}

TEST(Corpus, ParseErrorsCarryLineNumbers) {
  TempDir dir;
  write_file(dir / "posts.jsonl", R"({"post_id":"a","community":"c","created_utc":1,"title":"","body":"x"})"
                                  "\n{not json}\n");
  write_file(dir / "r.jsonl", "");
  try {
    load_corpus(dir / "posts.jsonl", dir / "r.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write_file(dir / "posts.jsonl", R"({"post_id":"a","community":"c","created_utc":1,"title":"","body":"x"})"
                                  "\n");
  write_file(dir / "r.jsonl", R"({"response_id":"r","post_id":"nope","source":"human","body":"x","created_utc":1})"
                              "\n");
  EXPECT_THROW(load_corpus(dir / "posts.jsonl", dir / "r.jsonl"), ParseError);
  write_file(dir / "r.jsonl", R"({"response_id":"r","post_id":"a","source":"human","created_utc":1})"
                              "\n");
  EXPECT_THROW(load_corpus(dir / "posts.jsonl", dir / "r.jsonl"), ParseError);
}

TEST(QueryText, TitleIsOptional) {
  auto p = post("a", "body text");
  p.title = "Title";
  EXPECT_EQ(query_text(p, false), "body text");
  EXPECT_NE(query_text(p, true).find("Title"), std::string::npos);
}

TEST(Pairing, OneObservationPerQualifyingPost) {
  Synthetic s;
  EXPECT_EQ(s.corpus.response_count(), 250u);
  const auto pairing = pair_by_post(s.corpus, s.rows, "x", "stub");
  ASSERT_EQ(pairing.observations.size(), 50u);
  EXPECT_EQ(pairing.excluded_posts, 0u);
  for (int p = 0; p < 50; ++p) {
    EXPECT_EQ(pairing.observations[p].post_id, "p" + std::to_string(p));
    EXPECT_EQ(pairing.observations[p].oc_mean, p + 1.5);
    EXPECT_EQ(pairing.observations[p].ai_value, 2.0 * p);
  }
}

TEST(Pairing, PostsWithoutModelResponseAreExcluded) {
  Synthetic s(5);
  const auto pairing = pair_by_post(s.corpus, s.rows, "x", "stub");
  EXPECT_EQ(pairing.observations.size(), 40u);
  EXPECT_EQ(pairing.excluded_posts, 10u);
  EXPECT_EQ(pair_by_post(s.corpus, s.rows, "x", "other-model").excluded_posts, 50u);
}

TEST(Pairing, MeanValuedDuplicateChangesNothing) {
  Synthetic s;
  const auto before = pair_by_post(s.corpus, s.rows, "x", "stub");
  auto rows = s.rows;
  for (int p = 0; p < 50; ++p) {
    MeasureRow dup;
    dup.response_id = "p" + std::to_string(p) + "::dup";
    dup.post_id = "p" + std::to_string(p);
    dup.source = "human";
    dup.values["x"] = p + 1.5;
    rows.push_back(dup);
  }
  const auto after = pair_by_post(s.corpus, rows, "x", "stub");
  ASSERT_EQ(after.observations.size(), before.observations.size());
  for (std::size_t i = 0; i < after.observations.size(); ++i) {
    EXPECT_EQ(after.observations[i].oc_mean, before.observations[i].oc_mean);
    EXPECT_EQ(after.observations[i].ai_value, before.observations[i].ai_value);
  }
}

TEST(Pairing, ReplyOrderDoesNotMatter) {
  Synthetic s;
  auto rows = s.rows;
  for (auto& r : rows) r.values["x"] = 0.1 * r.values["x"] + 0.7;
  auto reversed = std::vector<MeasureRow>(rows.rbegin(), rows.rend());
  const auto a = pair_by_post(s.corpus, rows, "x", "stub");
  const auto b = pair_by_post(s.corpus, reversed, "x", "stub");
  for (std::size_t i = 0; i < a.observations.size(); ++i)
    EXPECT_EQ(a.observations[i].oc_mean, b.observations[i].oc_mean);
}

TEST(Pairing, MissingValuesExcludeOnlyTheirSide) {
  Synthetic s;
  auto rows = s.rows;
  // Drop every human value of p3 and the model value of p4.
  std::erase_if(rows, [](const MeasureRow& r) {
    return (r.post_id == "p3" && r.source == "human") || (r.post_id == "p4" && r.source == "stub");
  });
  const auto pairing = pair_by_post(s.corpus, rows, "x", "stub");
  EXPECT_EQ(pairing.observations.size(), 48u);
  EXPECT_EQ(pairing.excluded_posts, 2u);
  EXPECT_THROW(pair_by_post(s.corpus, rows, "unknown_metric", "stub"), InputError);
}
