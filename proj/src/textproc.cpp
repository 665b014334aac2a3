#include "peerlex/textproc.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cctype>

namespace peerlex::text {

std::vector<std::string> Options::default_abbreviations() {
  return {"e.g.", "dr.", "mr.", "mrs.", "ms.", "i.e.", "etc.", "vs."};
}

namespace {

constexpr UChar32 kRightSingleQuote = 0x2019;

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back({c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i)});
  }
  return out;
}

bool is_word_char(UChar32 c) { return c >= 0 && (u_isalpha(c) || u_isdigit(c)); }

bool is_mark(UChar32 c) {
  if (c < 0) return false;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

bool is_apostrophe(UChar32 c) { return c == '\'' || c == kRightSingleQuote; }

void append_folded(std::string& out, UChar32 c) {
  const UChar32 folded = u_foldCase(c, U_FOLD_CASE_DEFAULT);
  char buf[U8_MAX_LENGTH];
  int32_t n = 0;
  U8_APPEND_UNSAFE(buf, n, folded);
  out.append(buf, static_cast<std::size_t>(n));
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

// The whitespace-delimited word around byte `pos`, stripped of surrounding
// quotes and brackets and of trailing clause punctuation.
std::string_view word_around(std::string_view text, std::size_t pos) {
  std::size_t begin = pos;
  while (begin > 0 && !is_space(text[begin - 1])) --begin;
  std::size_t end = pos;
  while (end < text.size() && !is_space(text[end])) ++end;
  auto word = text.substr(begin, end - begin);
  constexpr std::string_view leading = "\"'([{";
  constexpr std::string_view trailing = ",;:\"')]}";
  while (!word.empty() && leading.find(word.front()) != std::string_view::npos)
    word.remove_prefix(1);
  while (!word.empty() && trailing.find(word.back()) != std::string_view::npos)
    word.remove_suffix(1);
  return word;
}

bool ends_sentence_at_period(std::string_view text, std::size_t pos,
                             const Options& options) {
  const auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  if (pos > 0 && pos + 1 < text.size() && digit(text[pos - 1]) && digit(text[pos + 1]))
    return false;
  const auto word = ascii_lower(word_around(text, pos));
  return std::find(options.abbreviations.begin(), options.abbreviations.end(), word) ==
         options.abbreviations.end();
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quotes and brackets that belong to the sentence they follow.
std::size_t closer_length(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  const char c = text[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  // U+201D and U+2019 in UTF-8.
  if (text.substr(pos, 3) == "\xE2\x80\x9D" || text.substr(pos, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

std::string strip_url_words(std::string_view text) {
  std::string out(text);
  std::size_t i = 0;
  while (i < out.size()) {
    if (is_space(out[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < out.size() && !is_space(out[end])) ++end;
    const auto word = ascii_lower(std::string_view(out).substr(i, end - i));
    if (word.starts_with("http://") || word.starts_with("https://") || word.starts_with("www."))
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(i),
                out.begin() + static_cast<std::ptrdiff_t>(end), ' ');
    i = end;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  const auto cps = decode(text);
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i].value;
    if (is_word_char(c)) {
      append_folded(current, c);
    } else if (!current.empty() && is_mark(c)) {
      append_folded(current, c);
    } else if (!current.empty() && is_apostrophe(c) && i + 1 < cps.size() &&
               is_word_char(cps[i + 1].value)) {
      current.push_back('\'');
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<Span> split_sentences(std::string_view text, const Options& options) {
  std::vector<Span> spans;
  const auto emit = [&](std::size_t begin, std::size_t end) {
    if (end > begin) {
      bool blank = true;
      for (std::size_t k = begin; k < end && blank; ++k) blank = is_space(text[k]);
      if (!blank) spans.push_back({begin, end});
    }
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      emit(start, i);
      while (i < text.size() && is_space(text[i])) ++i;
      start = i;
      continue;
    }
    if (is_terminator(c) && (c != '.' || ends_sentence_at_period(text, i, options))) {
      std::size_t end = i + 1;
      while (end < text.size() && is_terminator(text[end])) ++end;
      while (std::size_t n = closer_length(text, end)) end += n;
      emit(start, end);
      start = i = end;
      continue;
    }
    ++i;
  }
  emit(start, text.size());
  return spans;
}

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const auto& cp : decode(text)) {
    if (cp.value < 0)
      out.append(text.substr(cp.begin, cp.end - cp.begin));
    else
      append_folded(out, cp.value);
  }
  return out;
}

std::size_t letter_count(std::string_view token) {
  std::size_t n = 0;
  for (const auto& cp : decode(token))
    if (cp.value >= 0 && u_isalpha(cp.value)) ++n;
  return n;
}

TextStats text_stats(std::string_view text, const Options& options) {
  std::string stripped;
  if (options.strip_urls) {
    stripped = strip_url_words(text);
    text = stripped;
  }
  TextStats stats;
  for (const auto& span : split_sentences(text, options)) {
    auto tokens = tokenize(text.substr(span.begin, span.end - span.begin));
    if (tokens.empty()) continue;
    for (const auto& token : tokens) {
      stats.n_letters += letter_count(token);
      stats.tokens.push_back(token);
    }
    stats.sentences.push_back(std::move(tokens));
  }
  stats.n_words = stats.tokens.size();
  stats.n_sentences = stats.sentences.size();
  stats.usable = stats.n_words > 0;
  if (stats.usable)
    stats.words_per_sentence =
        static_cast<double>(stats.n_words) / static_cast<double>(stats.n_sentences);
  return stats;
}

}  // namespace peerlex::text
