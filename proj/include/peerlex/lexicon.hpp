#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace peerlex {

// LIWC-style category dictionary. Category ids are the integers declared in
// the header block; internally each category has a dense index ordered by id.
class Lexicon {
 public:
  struct Category {
    int id = 0;
    std::string name;
  };

  Lexicon() = default;

  // Parses the .dic layout: optional BOM, '%', "ID NAME" lines, '%', then
  // "WORD ID [ID ...]" lines where a trailing '*' marks a prefix entry.
  static Lexicon parse(std::string_view content, const std::string& origin);
  static Lexicon load(const std::filesystem::path& path);

  const std::vector<Category>& categories() const noexcept { return categories_; }
  std::size_t literal_count() const noexcept { return literals_.size(); }
  std::size_t prefix_count() const noexcept { return prefixes_.size(); }
  bool has_category(std::string_view name) const;

  // Dense category indices matched by a lowercased token (union of literal
  // and prefix entries, each index at most once, ascending).
  std::vector<std::size_t> match(std::string_view token) const;

  // Builder used by parse() and tests. Words are stored lowercased.
  void declare(int id, std::string name);
  void add_entry(std::string word, const std::vector<int>& ids);

 private:
  std::size_t index_of_id(int id) const;

  std::vector<Category> categories_;
  std::unordered_map<int, std::size_t> id_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> literals_;
  std::unordered_map<std::string, std::vector<std::size_t>> prefixes_;
  std::size_t longest_prefix_ = 0;
};

struct CategoryFrequencies {
  std::map<std::string, double> freqs;  // proportion of tokens matching
  std::size_t n_tokens = 0;

  double at(const std::string& category) const;
};

// Throws InputError for an empty token list.
CategoryFrequencies category_frequencies(const std::vector<std::string>& tokens,
                                         const Lexicon& lexicon);

// Which categories fill each CDI role. A role listing several categories
// uses their summed frequency.
struct CdiMapping {
  std::vector<std::string> article{"article"};
  std::vector<std::string> preposition{"prep"};
  std::vector<std::string> personal_pronoun{"ppron"};
  std::vector<std::string> impersonal_pronoun{"ipron"};
  std::vector<std::string> auxiliary_verb{"auxverb"};
  std::vector<std::string> conjunction{"conj"};
  std::vector<std::string> adverb{"adverb"};
  std::vector<std::string> negation{"negate"};

  std::vector<std::string> all_categories() const;
};

// 30 + article + preposition - ppron - ipron - auxverb - conj - adverb -
// negation, each term in percentage points.
double cdi(const CategoryFrequencies& freqs, const CdiMapping& mapping);

std::vector<std::string> default_style_categories();

std::vector<double> style_vector(const CategoryFrequencies& freqs,
                                 const std::vector<std::string>& categories);

}  // namespace peerlex
