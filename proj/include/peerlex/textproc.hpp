#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace peerlex::text {

struct Options {
  // Whitespace-delimited words that never end a sentence. Compared
  // lowercased, after trimming surrounding quotes/brackets/commas.
  std::vector<std::string> abbreviations = default_abbreviations();
  // Blank out http://, https:// and www. words before tokenizing.
  bool strip_urls = false;

  static std::vector<std::string> default_abbreviations();
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // byte offsets, half open
};

struct TextStats {
  std::size_t n_words = 0;
  std::size_t n_sentences = 0;
  std::size_t n_letters = 0;
  double words_per_sentence = 0.0;
  std::vector<std::string> tokens;
  std::vector<std::vector<std::string>> sentences;
  // False when the text has no tokens; such stats feed no measure.
  bool usable = false;
};

// Maximal runs of letters and digits, with apostrophes allowed between two
// such characters. U+2019 is normalized to '\''. Output is case folded.
std::vector<std::string> tokenize(std::string_view text);

// Sentence spans. Boundaries are runs of . ! ? (plus trailing closers) and
// newline runs; abbreviations and digit.digit periods do not split. Spans
// holding only whitespace are dropped.
std::vector<Span> split_sentences(std::string_view text,
                                  const Options& options = {});

TextStats text_stats(std::string_view text, const Options& options = {});

// Unicode simple case folding of a UTF-8 string.
std::string fold_case(std::string_view text);

// Count of alphabetic code points in a token.
std::size_t letter_count(std::string_view token);

}  // namespace peerlex::text
