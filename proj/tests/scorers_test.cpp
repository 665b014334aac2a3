#include <gtest/gtest.h>

#include <chrono>

#include "peerlex/scorers.hpp"
#include "test_support.hpp"

using namespace peerlex;
using namespace std::chrono_literals;

namespace {

PluginOptions options_for(const std::string& stub_name) {
  PluginOptions o;
  o.command = "sh " + testing_support::stub(stub_name);
  o.timeout = 5s;
  o.batch_size = 4;
  return o;
}

const std::vector<std::string> kTexts{"short", "a bit longer text", "", "third one here", "x"};

}  // namespace

TEST(LinearScore, ClampsIntoUnitInterval) {
  CategoryFrequencies f;
  f.freqs = {{"a", 0.5}, {"b", 0.1}};
  EXPECT_DOUBLE_EQ((LinearScore{0.1, {{"a", 1.0}}}.evaluate(f)), 0.6);
  EXPECT_EQ((LinearScore{0.9, {{"a", 1.0}}}.evaluate(f)), 1.0);
  EXPECT_EQ((LinearScore{0.0, {{"b", -3.0}}}.evaluate(f)), 0.0);
}

TEST(Baseline, FormalityIsTheFMeasure) {
  CategoryFrequencies f;
  for (const auto& c : BaselineConfig::defaults().required_categories()) f.freqs[c] = 0.0;
  f.freqs["article"] = 0.1;
  f.freqs["prep"] = 0.12;
  f.freqs["adj"] = 0.05;
  f.freqs["pronoun"] = 0.1;
  f.freqs["verb"] = 0.15;
  f.freqs["adverb"] = 0.04;
  const auto s = baseline_scores(f, BaselineConfig::defaults());
  EXPECT_NEAR(*s.formality, (0.1 + 0.12 + 0.05 - 0.1 - 0.15 - 0.04 - 0.0 + 1.0) / 2.0, 1e-15);
}

TEST(Baseline, RequiresCategories) {
  Lexicon lex;
  lex.declare(1, "article");
  EXPECT_THROW(validate_baseline(BaselineConfig::defaults(), lex), InputError);
  EXPECT_THROW(BaselineConfig::defaults().score("kindness"), InputError);
}

TEST(ScoreSet, NamedAccess) {
  ScoreSet s;
  s["empathy"] = 0.3;
  EXPECT_EQ(s.empathy, 0.3);
  EXPECT_TRUE(is_score_name("politeness"));
  EXPECT_FALSE(is_score_name("kindness"));
}

TEST(Plugin, EchoStubFullCycle) {
  PluginScorer plugin(options_for("echo_scorer.sh"));
  EXPECT_EQ(plugin.scorer_name(), "echo-stub");
  EXPECT_EQ(plugin.metrics(), (std::vector<std::string>{"formality", "empathy", "politeness"}));
  const auto scores = plugin.score_batch(kTexts);
  ASSERT_EQ(scores.size(), kTexts.size());
  for (const auto& s : scores) {
    ASSERT_TRUE(s.formality && s.empathy && s.politeness);
    EXPECT_EQ(*s.empathy, 0.25);
    EXPECT_EQ(*s.politeness, 1.0);
    EXPECT_FALSE(s.emotional_support);
  }
  // Second batch continues the id sequence.
  EXPECT_EQ(plugin.score_batch(kTexts).size(), kTexts.size());
  EXPECT_EQ(plugin.shutdown(), 0);
}

TEST(Plugin, OutOfOrderAnswersAreMatchedById) {
  PluginScorer swapped(options_for("swapped_scorer.sh"));
  const std::vector<std::string> texts{"one", "two two", "three three three", "four"};
  const auto a = swapped.score_batch(texts);
  ASSERT_EQ(a.size(), texts.size());
  for (const auto& s : a) EXPECT_EQ(s.empathy, 0.5);
}

TEST(Plugin, ProtocolViolations) {
  {
    PluginScorer p(options_for("wrong_id_scorer.sh"));
    EXPECT_THROW(p.score_batch(kTexts), ProtocolError);
  }
  {
    PluginScorer p(options_for("malformed_scorer.sh"));
    EXPECT_THROW(p.score_batch(kTexts), ProtocolError);
  }
  {
    PluginScorer p(options_for("early_exit_scorer.sh"));
    EXPECT_THROW(p.score_batch(kTexts), PluginExitedError);
  }
  {
    PluginScorer p(options_for("out_of_range_scorer.sh"));
    EXPECT_THROW(p.score_batch(kTexts), ProtocolError);
  }
  {
    PluginScorer p(options_for("duplicate_scorer.sh"));
    EXPECT_THROW(p.score_batch(kTexts), ProtocolError);
  }
  EXPECT_THROW(PluginScorer(options_for("error_hello_scorer.sh")), ScorerError);
}

TEST(Plugin, SilentPluginTimesOut) {
  auto o = options_for("silent_scorer.sh");
  o.timeout = 300ms;
  PluginScorer p(o);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(p.score_batch(kTexts), PluginTimeoutError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
}

TEST(Plugin, PerTextErrorsLeaveScoresAbsent) {
  PluginScorer p(options_for("partial_error_scorer.sh"));
  const auto scores = p.score_batch(kTexts);
  ASSERT_EQ(scores.size(), kTexts.size());
  for (std::size_t i = 0; i < scores.size(); ++i) EXPECT_EQ(scores[i].formality.has_value(), i % 2 == 0) << i;
}

TEST(ScoreTexts, LenientRunMarksFailedBatches) {
  auto o = options_for("early_exit_scorer.sh");
  o.max_retries = 1;
  auto handle = ScorerHandle::plugin(o);
  const auto run = score_texts(handle, kTexts);
  EXPECT_EQ(run.scores.size(), kTexts.size());
  EXPECT_EQ(run.failed_texts, kTexts.size());
  EXPECT_FALSE(run.errors.empty());
}

TEST(ScoreTexts, StrictRunRethrows) {
  auto o = options_for("wrong_id_scorer.sh");
  o.strict = true;
  o.max_retries = 1;
  auto handle = ScorerHandle::plugin(o);
  EXPECT_THROW(score_texts(handle, kTexts), ProtocolError);
}

TEST(ScoreTexts, PluginAnswersEveryBatch) {
  auto handle = ScorerHandle::plugin(options_for("echo_scorer.sh"));
  EXPECT_EQ(handle.label(), "plugin:echo-stub");
  const auto run = score_texts(handle, kTexts);
  EXPECT_EQ(run.failed_texts, 0u);
  for (const auto& s : run.scores) EXPECT_TRUE(s.formality);
}

TEST(ScorerHandle, FromSpec) {
  const auto lex = Lexicon::load(testing_support::fixture("lexicon.dic"));
  auto b = ScorerHandle::from_spec("builtin", lex, BaselineConfig::defaults(), {});
  EXPECT_EQ(b.kind(), ScorerHandle::Kind::builtin);
  EXPECT_EQ(b.label(), "builtin:lexical");
  EXPECT_EQ(b.provided_metrics().size(), 5u);
  EXPECT_THROW(ScorerHandle::from_spec("roberta", lex, BaselineConfig::defaults(), {}), InputError);
  EXPECT_THROW(ScorerHandle::from_spec("plugin:", lex, BaselineConfig::defaults(), {}), InputError);
}
