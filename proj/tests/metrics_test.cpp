#include <gtest/gtest.h>

#include <random>

#include "hand_counted.hpp"
#include "oracles.hpp"
#include "peerlex/metrics.hpp"
#include "test_support.hpp"

using namespace peerlex;

TEST(SingleTextMeasures, MatchHandCounts) {
  for (const auto& h : hand_counted_texts()) {
    SCOPED_TRACE(h.text);
    const auto s = text::text_stats(h.text);
    const auto v = verbosity(s);
    EXPECT_EQ(v.words_per_response, h.words);
    EXPECT_EQ(v.words_per_sentence, static_cast<double>(h.words) / h.sentences_n);
    EXPECT_EQ(repeatability(s.tokens), static_cast<double>(h.words - h.distinct) / h.words);
    EXPECT_EQ(complexity(s), hand_complexity(h));
    EXPECT_NEAR(readability_cli(s), oracle::coleman_liau_by_hand(h.letters, h.words, h.sentences_n), 1e-9);
  }
}

TEST(SingleTextMeasures, RejectUnusableInput) {
  const auto empty = text::text_stats("...");
  EXPECT_THROW(verbosity(empty), InputError);
  EXPECT_THROW(readability_cli(empty), InputError);
  EXPECT_THROW(complexity(empty), InputError);
  EXPECT_THROW(repeatability({}), InputError);
}

TEST(ColemanLiau, KnownValue) {
  // 400 letters and 5 sentences per 100 words.
  EXPECT_NEAR(coleman_liau(400, 5), 0.0588 * 400 - 0.296 * 5 - 15.8, 1e-12);
}

TEST(Similarity, SymmetricAndScaleInvariant) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    auto scaled = a;
    for (auto& x : scaled) x *= 7.5;
    EXPECT_NEAR(semantic_similarity(a, b), semantic_similarity(b, a), 1e-15);
    EXPECT_NEAR(style_accommodation(scaled, b), style_accommodation(a, b), 1e-14);
  }
  EXPECT_NEAR(style_accommodation(std::vector<double>{0.1, 0.1}, std::vector<double>{0.2, 0.2}), 1.0, 1e-15);
  EXPECT_THROW(style_accommodation(std::vector<double>{0, 0}, std::vector<double>{1, 0}), InputError);
}

TEST(Diversity, IdenticalAndPermutedGroups) {
  const std::vector<std::vector<double>> same(4, {1.0, 2.0, 3.0});
  for (double d : diversity(same)) EXPECT_NEAR(d, 0.0, 1e-15);

  std::vector<std::vector<double>> group{{1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.2, 0.9}};
  const auto base = diversity(group);
  std::vector<std::vector<double>> reversed(group.rbegin(), group.rend());
  const auto rev = diversity(reversed);
  for (std::size_t i = 0; i < group.size(); ++i) EXPECT_EQ(base[i], rev[group.size() - 1 - i]);

  EXPECT_THROW(diversity({}), InputError);
  EXPECT_THROW(diversity({{1, 0}, {-1, 0}}), InputError);
}

namespace {

struct Resources {
  Lexicon lexicon = Lexicon::load(testing_support::fixture("lexicon.dic"));
  EmbeddingTable embeddings =
      EmbeddingTable::load(testing_support::fixture("embeddings.txt"), EmbeddingFormat::text);
  MeasureResources get() {
    MeasureResources r;
    r.lexicon = &lexicon;
    r.embeddings = &embeddings;
    return r;
  }
};

Post make_post(std::string body) {
  Post p;
  p.post_id = "p1";
  p.title = "title";
  p.body = std::move(body);
  return p;
}

Response make_response(std::string body, Source source = Source::human()) {
  Response r;
  r.response_id = "r1";
  r.post_id = "p1";
  r.source = std::move(source);
  r.body = std::move(body);
  return r;
}

}  // namespace

TEST(MeasureResponse, FillsEveryLexicoSemanticMetricButDiversity) {
  Resources res;
  const auto resources = res.get();
  validate_resources(resources, true);
  const auto post = make_post("I feel so alone and I do not know what to do with my life.");
  const auto row = measure_response(post, make_response("I am sorry you feel alone. Talk to a friend today."),
                                    resources);
  for (const auto& name : metric::lexico_semantic()) {
    if (name == metric::diversity) continue;
    EXPECT_TRUE(row.get(name).has_value()) << name;
  }
  EXPECT_FALSE(row.get(std::string(metric::diversity)).has_value());
  EXPECT_TRUE(row.get("liwc:article").has_value());
  EXPECT_EQ(row.source, "human");
}

TEST(MeasureResponse, EmptyTextIsFlagged) {
  Resources res;
  const auto row = measure_response(make_post("hello there"), make_response("   ...   "), res.get());
  EXPECT_TRUE(row.flags.count(std::string(flag::empty_text)));
  EXPECT_TRUE(row.values.empty());
}

TEST(MeasureResponse, MissingEmbeddingsAreFlaggedNotFatal) {
  Resources res;
  auto resources = res.get();
  resources.embeddings = nullptr;
  const auto row = measure_response(make_post("hello there friend"), make_response("hi friend"), resources);
  EXPECT_TRUE(row.flags.count(std::string(flag::no_embeddings_loaded)));
  EXPECT_FALSE(row.get(std::string(metric::semantic_similarity)).has_value());

  const auto oov = measure_response(make_post("hello there friend"), make_response("lol dm"), res.get());
  EXPECT_TRUE(oov.flags.count(std::string(flag::no_embedding)));
}

TEST(MeasureResponse, ExternalScoresReplaceBaseline) {
  Resources res;
  ScoreSet external;
  external.formality = 0.25;
  const auto row = measure_response(make_post("hello there"), make_response("thank you so much"), res.get(), &external);
  EXPECT_EQ(row.get("formality"), 0.25);
  EXPECT_FALSE(row.get("empathy").has_value());
  EXPECT_TRUE(row.flags.count(std::string(flag::scores_missing)));
}

TEST(ValidateResources, MissingCategoryIsReported) {
  Resources res;
  auto resources = res.get();
  resources.config.style_categories = {"article", "nonexistent"};
  EXPECT_THROW(validate_resources(resources, true), InputError);
  resources = res.get();
  resources.baseline.empathy.weights["made_up"] = 1.0;
  EXPECT_THROW(validate_resources(resources, true), InputError);
  EXPECT_NO_THROW(validate_resources(resources, false));
}

TEST(MeasuresFile, RoundTrip) {
  testing_support::TempDir dir;
  MeasureRow a;
  a.response_id = "p1::h0";
  a.post_id = "p1";
  a.source = "human";
  a.values = {{"cdi", 12.5}, {"readability", -3.0000000000000004}, {"liwc:article", 0.1}};
  a.flags = {"no_embedding"};
  MeasureRow b = a;
  b.response_id = "p1::m";
  b.source = "stub-a";
  b.flags.clear();
  write_measures(dir / "m.jsonl", {a, b});
  const auto back = read_measures(dir / "m.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);

  testing_support::write_file(dir / "bad.jsonl", measure_row_to_json(a) + "\n{oops\n");
  try {
    read_measures(dir / "bad.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}
