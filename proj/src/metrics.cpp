#include "peerlex/metrics.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_set>

#include "io_util.hpp"
#include "peerlex/errors.hpp"

namespace peerlex {

using nlohmann::json;

namespace metric {

std::vector<std::string> lexico_semantic() {
  return {std::string(words_per_response),  std::string(words_per_sentence),
          std::string(readability),         std::string(repeatability),
          std::string(complexity),          std::string(cdi),
          std::string(formality),           std::string(empathy),
          std::string(politeness),          std::string(semantic_similarity),
          std::string(style_accommodation), std::string(diversity),
          std::string(emotional_support),   std::string(informational_support)};
}

bool is_lexicon_metric(std::string_view name) { return name.starts_with(lexicon_prefix); }

std::string lexicon_metric(std::string_view category) {
  return std::string(lexicon_prefix) + std::string(category);
}

}  // namespace metric

std::optional<double> MeasureRow::get(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

namespace {

void require_usable(const text::TextStats& stats) {
  if (!stats.usable) throw InputError("measure of a text without words");
}

}  // namespace

Verbosity verbosity(const text::TextStats& stats) {
  require_usable(stats);
  return {static_cast<double>(stats.n_words), stats.words_per_sentence};
}

double coleman_liau(double letters_per_100_words, double sentences_per_100_words) {
  return 0.0588 * letters_per_100_words - 0.296 * sentences_per_100_words - 15.8;
}

double readability_cli(const text::TextStats& stats) {
  require_usable(stats);
  const auto words = static_cast<double>(stats.n_words);
  return coleman_liau(100.0 * static_cast<double>(stats.n_letters) / words,
                      100.0 * static_cast<double>(stats.n_sentences) / words);
}

double repeatability(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw InputError("repeatability of an empty token list");
  const std::unordered_set<std::string_view> distinct(tokens.begin(), tokens.end());
  return static_cast<double>(tokens.size() - distinct.size()) / static_cast<double>(tokens.size());
}

double complexity(const text::TextStats& stats) {
  require_usable(stats);
  double sum = 0.0;
  for (const auto& sentence : stats.sentences) {
    std::size_t letters = 0;
    for (const auto& token : sentence) letters += text::letter_count(token);
    sum += static_cast<double>(letters) / static_cast<double>(sentence.size());
  }
  return sum / static_cast<double>(stats.sentences.size());
}

double semantic_similarity(std::span<const double> query_vec, std::span<const double> response_vec) {
  return cosine(query_vec, response_vec);
}

double style_accommodation(std::span<const double> query_style,
                           std::span<const double> response_style) {
  return cosine(query_style, response_style);
}

std::vector<double> diversity(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) throw InputError("diversity of an empty group");
  const std::size_t dim = vectors.front().size();
  std::vector<const std::vector<double>*> order;
  order.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != dim) throw InputError("diversity group mixes vector dimensions");
    order.push_back(&v);
  }
  // Summing in lexicographic order makes the centroid independent of member order.
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return *a < *b; });
  std::vector<double> centroid(dim, 0.0);
  for (const auto* v : order)
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += (*v)[d];
  for (auto& x : centroid) x /= static_cast<double>(vectors.size());
  if (std::all_of(centroid.begin(), centroid.end(), [](double x) { return x == 0.0; }))
    throw InputError("diversity centroid has zero norm");

  std::vector<double> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(1.0 - cosine(v, centroid));
  return out;
}

void validate_resources(const MeasureResources& resources, bool builtin_scorer) {
  if (!resources.lexicon) throw InputError("measurement needs a lexicon");
  const auto& lexicon = *resources.lexicon;
  for (const auto& category : resources.config.cdi.all_categories())
    if (!lexicon.has_category(category))
      throw InputError("CDI mapping names category '" + category + "' absent from the lexicon");
  for (const auto& category : resources.config.style_categories)
    if (!lexicon.has_category(category))
      throw InputError("style category '" + category + "' is absent from the lexicon");
  if (resources.config.style_categories.empty()) throw InputError("style category list is empty");
  if (builtin_scorer) validate_baseline(resources.baseline, lexicon);
}

namespace {

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

QueryFeatures query_features(const Post& post, const MeasureResources& resources) {
  QueryFeatures q;
  const auto stats =
      text::text_stats(query_text(post, resources.config.include_title), resources.config.text);
  if (!stats.usable) return q;
  auto style = style_vector(category_frequencies(stats.tokens, *resources.lexicon),
                            resources.config.style_categories);
  if (!all_zero(style)) q.style = std::move(style);
  if (resources.embeddings) q.embedding = text_vector(stats.tokens, *resources.embeddings);
  return q;
}

ResponseMeasurement measure_response(const Post& post, const Response& response,
                                     const MeasureResources& resources, const QueryFeatures& query,
                                     const ScoreSet* external) {
  (void)post;
  ResponseMeasurement out;
  MeasureRow& row = out.row;
  row.response_id = response.response_id;
  row.post_id = response.post_id;
  row.source = response.source.name();

  const auto put_scores = [&](const ScoreSet& scores) {
    for (auto name : kScoreNames) {
      if (const auto& v = scores[name])
        row.values[std::string(name)] = *v;
      else
        row.flags.insert(std::string(flag::scores_missing));
    }
  };

  const auto stats = text::text_stats(response.body, resources.config.text);
  if (!stats.usable) {
    row.flags.insert(std::string(flag::empty_text));
    if (external) put_scores(*external);
    return out;
  }

  const auto freqs = category_frequencies(stats.tokens, *resources.lexicon);
  for (const auto& [name, value] : freqs.freqs) row.values[metric::lexicon_metric(name)] = value;

  const auto v = verbosity(stats);
  row.values[std::string(metric::words_per_response)] = v.words_per_response;
  row.values[std::string(metric::words_per_sentence)] = v.words_per_sentence;
  row.values[std::string(metric::readability)] = readability_cli(stats);
  row.values[std::string(metric::repeatability)] = repeatability(stats.tokens);
  row.values[std::string(metric::complexity)] = complexity(stats);

  const auto guarded = [&](std::string_view name, auto&& compute) {
    try {
      row.values[std::string(name)] = compute();
    } catch (const InputError&) {
      row.flags.insert(std::string(name) + "_error");
    }
  };
  guarded(metric::cdi, [&] { return cdi(freqs, resources.config.cdi); });

  if (external) {
    put_scores(*external);
  } else {
    try {
      put_scores(baseline_scores(freqs, resources.baseline));
    } catch (const InputError&) {
      row.flags.insert(std::string(flag::scores_missing));
    }
  }

  try {
    const auto style = style_vector(freqs, resources.config.style_categories);
    if (all_zero(style))
      row.flags.insert(std::string(flag::zero_style_vector));
    else if (!query.style)
      row.flags.insert(std::string(flag::query_zero_style_vector));
    else
      row.values[std::string(metric::style_accommodation)] = style_accommodation(*query.style, style);
  } catch (const InputError&) {
    row.flags.insert("style_accommodation_error");
  }

  if (!resources.embeddings) {
    row.flags.insert(std::string(flag::no_embeddings_loaded));
  } else {
    out.embedding = text_vector(stats.tokens, *resources.embeddings);
    if (!out.embedding)
      row.flags.insert(std::string(flag::no_embedding));
    else if (!query.embedding)
      row.flags.insert(std::string(flag::query_no_embedding));
    else
      row.values[std::string(metric::semantic_similarity)] =
          semantic_similarity(*query.embedding, *out.embedding);
  }
  return out;
}

MeasureRow measure_response(const Post& post, const Response& response,
                            const MeasureResources& resources, const ScoreSet* external) {
  return measure_response(post, response, resources, query_features(post, resources), external)
      .row;
}

std::vector<const Response*> ordered_responses(const Corpus& corpus) {
  std::vector<const Response*> out;
  out.reserve(corpus.response_count());
  for (std::size_t i = 0; i < corpus.posts().size(); ++i)
    for (const auto& r : corpus.responses_for(i)) out.push_back(&r);
  return out;
}

void assign_diversity(std::vector<ResponseMeasurement>& measured) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < measured.size(); ++i)
    if (measured[i].embedding) groups[measured[i].row.source].push_back(i);
  for (const auto& [source, members] : groups) {
    std::vector<std::vector<double>> vectors;
    vectors.reserve(members.size());
    for (auto i : members) vectors.push_back(*measured[i].embedding);
    try {
      const auto distances = diversity(vectors);
      for (std::size_t k = 0; k < members.size(); ++k)
        measured[members[k]].row.values[std::string(metric::diversity)] = distances[k];
    } catch (const InputError&) {
      for (auto i : members) measured[i].row.flags.insert(std::string(flag::zero_centroid));
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

json row_to_json(const MeasureRow& row) {
  json values = json::object();
  for (const auto& [k, v] : row.values) values[k] = v;
  return {{"response_id", row.response_id},
          {"post_id", row.post_id},
          {"source", row.source},
          {"values", values},
          {"flags", json(std::vector<std::string>(row.flags.begin(), row.flags.end()))}};
}

}  // namespace

std::string measure_row_to_json(const MeasureRow& row) {
  return row_to_json(row).dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_measures(const std::filesystem::path& path, const std::vector<MeasureRow>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += measure_row_to_json(row);
    out.push_back('\n');
  }
  detail::write_file_atomic(path, out);
}

std::vector<MeasureRow> read_measures(const std::filesystem::path& path) {
  std::vector<MeasureRow> rows;
  detail::for_each_line(path, [&](std::size_t number, std::string_view line) {
    if (detail::is_blank(line)) return;
    try {
      const json record = json::parse(line);
      MeasureRow row;
      row.response_id = record.at("response_id").get<std::string>();
      row.post_id = record.at("post_id").get<std::string>();
      row.source = record.at("source").get<std::string>();
      for (const auto& [k, v] : record.at("values").items()) {
        if (!v.is_number()) throw InputError("value of '" + k + "' is not a number");
        row.values[k] = v.get<double>();
      }
      for (const auto& f : record.at("flags")) row.flags.insert(f.get<std::string>());
      rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), number, e.what());
    } catch (const InputError& e) {
      throw ParseError(path.string(), number, e.what());
    }
  });
  return rows;
}

}  // namespace peerlex
