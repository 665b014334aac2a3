#include <gtest/gtest.h>

#include <set>

#include "hand_counted.hpp"
#include "peerlex/textproc.hpp"

using namespace peerlex;

TEST(Tokenize, FoldsCaseAndKeepsInnerApostrophes) {
  EXPECT_EQ(text::tokenize("I can't GO, 'ok'"), (std::vector<std::string>{"i", "can't", "go", "ok"}));
  EXPECT_EQ(text::tokenize("it\xE2\x80\x99s"), (std::vector<std::string>{"it's"}));
  EXPECT_EQ(text::tokenize("3.50 and 2023-01-05"),
            (std::vector<std::string>{"3", "50", "and", "2023", "01", "05"}));
  EXPECT_TRUE(text::tokenize("... !!! ---").empty());
}

TEST(Tokenize, NonAsciiLetters) {
  EXPECT_EQ(text::tokenize("CAF\xC3\x89 na\xC3\xAFve"),
            (std::vector<std::string>{"caf\xC3\xA9", "na\xC3\xAFve"}));
  EXPECT_EQ(text::letter_count("caf\xC3\xA9"), 4u);
  EXPECT_EQ(text::letter_count("can't"), 4u);
  EXPECT_EQ(text::letter_count("2023"), 0u);
}

TEST(SplitSentences, AbbreviationsAndDecimalsDoNotSplit) {
  EXPECT_EQ(text::split_sentences("Dr. Who is here. Pay 3.50 now.").size(), 2u);
  EXPECT_EQ(text::split_sentences("Done?! Yes...").size(), 2u);
  EXPECT_EQ(text::split_sentences("  \n\n  ").size(), 0u);
  EXPECT_EQ(text::split_sentences("a\nb\n\nc").size(), 3u);
}

TEST(SplitSentences, CustomAbbreviations) {
  text::Options opts;
  opts.abbreviations = {"approx."};
  EXPECT_EQ(text::split_sentences("It is approx. ten. Dr. No.", opts).size(), 3u);
}

TEST(TextStats, UrlsCanBeStripped) {
  text::Options opts;
  opts.strip_urls = true;
  const auto s = text::text_stats("see https://example.com/a.b or www.x.org now", opts);
  EXPECT_EQ(s.tokens, (std::vector<std::string>{"see", "or", "now"}));
  const auto kept = text::text_stats("see https://example.com now");
  EXPECT_GT(kept.n_words, 3u);
}

TEST(TextStats, EmptyTextIsUnusable) {
  EXPECT_FALSE(text::text_stats("").usable);
  EXPECT_FALSE(text::text_stats(" ?! ").usable);
  EXPECT_TRUE(text::text_stats("ok").usable);
}

TEST(TextStats, MatchesHandCounts) {
  for (const auto& h : hand_counted_texts()) {
    SCOPED_TRACE(h.text);
    const auto s = text::text_stats(h.text);
    EXPECT_EQ(s.n_letters, static_cast<std::size_t>(h.letters));
    EXPECT_EQ(s.n_words, static_cast<std::size_t>(h.words));
    EXPECT_EQ(s.n_sentences, static_cast<std::size_t>(h.sentences_n));
    EXPECT_EQ(std::set<std::string>(s.tokens.begin(), s.tokens.end()).size(),
              static_cast<std::size_t>(h.distinct));
    ASSERT_EQ(s.sentences.size(), h.sentences.size());
    for (std::size_t i = 0; i < h.sentences.size(); ++i)
      EXPECT_EQ(s.sentences[i].size(), static_cast<std::size_t>(h.sentences[i].second));
  }
}

TEST(FoldCase, Unicode) {
  EXPECT_EQ(text::fold_case("\xC3\x89T\xC3\x89"), "\xC3\xA9t\xC3\xA9");
  EXPECT_EQ(text::fold_case("Stra\xC3\x9F" "E"), "stra\xC3\x9F" "e");
}
