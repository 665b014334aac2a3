#include "peerlex/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "io_util.hpp"
#include "peerlex/errors.hpp"
#include "peerlex/textproc.hpp"

namespace peerlex {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

void Lexicon::declare(int id, std::string name) {
  if (name.empty()) throw InputError("category " + std::to_string(id) + " has no name");
  if (id_index_.count(id)) throw InputError("category id " + std::to_string(id) + " declared twice");
  if (has_category(name)) throw InputError("category name '" + name + "' declared twice");
  id_index_.emplace(id, categories_.size());
  categories_.push_back({id, std::move(name)});
}

bool Lexicon::has_category(std::string_view name) const {
  return std::any_of(categories_.begin(), categories_.end(),
                     [&](const Category& c) { return c.name == name; });
}

std::size_t Lexicon::index_of_id(int id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) throw InputError("undeclared category id " + std::to_string(id));
  return it->second;
}

void Lexicon::add_entry(std::string word, const std::vector<int>& ids) {
  if (ids.empty()) throw InputError("entry '" + word + "' lists no categories");
  const bool prefix = !word.empty() && word.back() == '*';
  if (prefix) word.pop_back();
  if (word.empty()) throw InputError("empty dictionary word");
  word = text::fold_case(word);

  std::vector<std::size_t> indices;
  for (int id : ids) indices.push_back(index_of_id(id));
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

  auto& table = prefix ? prefixes_ : literals_;
  if (table.count(word))
    throw InputError(std::string(prefix ? "duplicate prefix entry '" : "duplicate word '") + word +
                     (prefix ? "*'" : "'"));
  if (prefix) longest_prefix_ = std::max(longest_prefix_, word.size());
  table.emplace(std::move(word), std::move(indices));
}

std::vector<std::size_t> Lexicon::match(std::string_view token) const {
  std::vector<std::size_t> out;
  if (auto it = literals_.find(std::string(token)); it != literals_.end())
    out = it->second;
  const std::size_t limit = std::min(longest_prefix_, token.size());
  std::string key;
  for (std::size_t len = 1; len <= limit; ++len) {
    key.assign(token.substr(0, len));
    if (auto it = prefixes_.find(key); it != prefixes_.end())
      out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Lexicon Lexicon::parse(std::string_view content, const std::string& origin) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

  Lexicon lexicon;
  enum class State { before_header, header, entries } state = State::before_header;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const auto eol = content.find('\n', pos);
    auto line = content.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                   : eol - pos);
    pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
    ++number;
    line = detail::trim(line);
    if (line.empty()) continue;
    try {
      switch (state) {
        case State::before_header:
          if (line != "%") throw InputError("dictionary must start with a '%' line");
          state = State::header;
          break;
        case State::header: {
          if (line == "%") {
            state = State::entries;
            break;
          }
          const auto parts = split_ws(line);
          const auto id = parse_int(parts.at(0));
          if (!id || parts.size() < 2)
            throw InputError("header line must be 'ID NAME'");
          lexicon.declare(*id, std::string(parts[1]));
          break;
        }
        case State::entries: {
          const auto parts = split_ws(line);
          if (parts.size() < 2) throw InputError("entry line must be 'WORD ID [ID ...]'");
          std::vector<int> ids;
          for (std::size_t k = 1; k < parts.size(); ++k) {
            const auto id = parse_int(parts[k]);
            if (!id) throw InputError("category id '" + std::string(parts[k]) + "' is not an integer");
            ids.push_back(*id);
          }
          lexicon.add_entry(std::string(parts[0]), ids);
          break;
        }
      }
    } catch (const InputError& e) {
      throw ParseError(origin, number, e.what());
    }
  }
  if (state != State::entries)
    throw ParseError(origin, number, "header block is not closed by a '%' line");
  return lexicon;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path), path.string());
}

double CategoryFrequencies::at(const std::string& category) const {
  auto it = freqs.find(category);
  if (it == freqs.end()) throw InputError("category '" + category + "' is not in the lexicon");
  return it->second;
}

CategoryFrequencies category_frequencies(const std::vector<std::string>& tokens,
                                         const Lexicon& lexicon) {
  if (tokens.empty()) throw InputError("category frequencies need at least one token");
  std::vector<std::size_t> counts(lexicon.categories().size(), 0);
  for (const auto& token : tokens)
    for (std::size_t index : lexicon.match(token)) ++counts[index];

  CategoryFrequencies out;
  out.n_tokens = tokens.size();
  const auto n = static_cast<double>(tokens.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.freqs.emplace(lexicon.categories()[i].name, static_cast<double>(counts[i]) / n);
  return out;
}

std::vector<std::string> CdiMapping::all_categories() const {
  std::vector<std::string> out;
  for (const auto* role : {&article, &preposition, &personal_pronoun, &impersonal_pronoun,
                           &auxiliary_verb, &conjunction, &adverb, &negation})
    out.insert(out.end(), role->begin(), role->end());
  return out;
}

double cdi(const CategoryFrequencies& freqs, const CdiMapping& mapping) {
  const auto points = [&](const std::vector<std::string>& role) {
    double sum = 0.0;
    for (const auto& category : role) sum += 100.0 * freqs.at(category);
    return sum;
  };
  return 30.0 + points(mapping.article) + points(mapping.preposition) -
         points(mapping.personal_pronoun) - points(mapping.impersonal_pronoun) -
         points(mapping.auxiliary_verb) - points(mapping.conjunction) -
         points(mapping.adverb) - points(mapping.negation);
}

std::vector<std::string> default_style_categories() {
  return {"article", "prep", "ppron", "ipron", "auxverb", "conj", "adverb", "negate"};
}

std::vector<double> style_vector(const CategoryFrequencies& freqs,
                                 const std::vector<std::string>& categories) {
  std::vector<double> out;
  out.reserve(categories.size());
  for (const auto& category : categories) out.push_back(freqs.at(category));
  return out;
}

}  // namespace peerlex
