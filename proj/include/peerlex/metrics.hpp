#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peerlex/corpus.hpp"
#include "peerlex/embeddings.hpp"
#include "peerlex/lexicon.hpp"
#include "peerlex/scorers.hpp"
#include "peerlex/textproc.hpp"

namespace peerlex {

namespace metric {
inline constexpr std::string_view words_per_response = "words_per_response";
inline constexpr std::string_view words_per_sentence = "words_per_sentence";
inline constexpr std::string_view readability = "readability";
inline constexpr std::string_view repeatability = "repeatability";
inline constexpr std::string_view complexity = "complexity";
inline constexpr std::string_view cdi = "cdi";
inline constexpr std::string_view formality = "formality";
inline constexpr std::string_view empathy = "empathy";
inline constexpr std::string_view politeness = "politeness";
inline constexpr std::string_view semantic_similarity = "semantic_similarity";
inline constexpr std::string_view style_accommodation = "style_accommodation";
inline constexpr std::string_view diversity = "diversity";
inline constexpr std::string_view emotional_support = "emotional_support";
inline constexpr std::string_view informational_support =
    "informational_support";

// Lexicon category frequencies are stored as "liwc:<category name>".
inline constexpr std::string_view lexicon_prefix = "liwc:";

// The lexico-semantic family in report order.
std::vector<std::string> lexico_semantic();
bool is_lexicon_metric(std::string_view name);
std::string lexicon_metric(std::string_view category);
}  // namespace metric

namespace flag {
inline constexpr std::string_view empty_text = "empty_text";
inline constexpr std::string_view no_embedding = "no_embedding";
inline constexpr std::string_view query_no_embedding = "query_no_embedding";
inline constexpr std::string_view zero_style_vector = "zero_style_vector";
inline constexpr std::string_view query_zero_style_vector =
    "query_zero_style_vector";
inline constexpr std::string_view no_embeddings_loaded = "no_embeddings_loaded";
inline constexpr std::string_view scores_missing = "scores_missing";
inline constexpr std::string_view zero_centroid = "zero_centroid";
}  // namespace flag

struct MeasureRow {
  std::string response_id;
  std::string post_id;
  std::string source;  // "human" or model name
  std::map<std::string, double> values;
  std::set<std::string> flags;

  std::optional<double> get(const std::string& name) const;
  friend bool operator==(const MeasureRow&, const MeasureRow&) = default;
};

struct Verbosity {
  double words_per_response = 0.0;
  double words_per_sentence = 0.0;
};

// All single-text measures throw InputError on unusable (token-free) input.
Verbosity verbosity(const text::TextStats& stats);

// Coleman-Liau: 0.0588 L - 0.296 S - 15.8 with L letters and S sentences
// per 100 words.
double coleman_liau(double letters_per_100_words,
                    double sentences_per_100_words);
double readability_cli(const text::TextStats& stats);

// (n - distinct) / n.
double repeatability(const std::vector<std::string>& tokens);

// Mean over sentences of the sentence's mean letters per word.
double complexity(const text::TextStats& stats);

double semantic_similarity(std::span<const double> query_vec,
                           std::span<const double> response_vec);
double style_accommodation(std::span<const double> query_style,
                           std::span<const double> response_style);

// 1 - cosine(v_i, centroid) for each member of one source group. Throws
// InputError for an empty group or a zero-norm centroid.
std::vector<double> diversity(const std::vector<std::vector<double>>& vectors);

struct MeasureConfig {
  text::Options text;
  bool include_title = false;
  CdiMapping cdi;
  std::vector<std::string> style_categories = default_style_categories();
};

struct MeasureResources {
  const Lexicon* lexicon = nullptr;
  const EmbeddingTable* embeddings = nullptr;  // optional
  MeasureConfig config;
  BaselineConfig baseline = BaselineConfig::defaults();
  std::string scorer_label = "builtin:lexical";
};

// Checks that the lexicon covers the CDI roles, style categories and the
// baseline scorer's categories.
void validate_resources(const MeasureResources& resources, bool builtin_scorer);

// Query-side features shared by every response to one post.
struct QueryFeatures {
  std::optional<std::vector<double>> embedding;
  std::optional<std::vector<double>> style;
};

QueryFeatures query_features(const Post& post, const MeasureResources& resources);

struct ResponseMeasurement {
  MeasureRow row;
  std::optional<std::vector<double>> embedding;  // input to the diversity pass
};

// `external` replaces the builtin scores when non-null. Diversity is not
// filled here; it needs the whole source group.
ResponseMeasurement measure_response(const Post& post, const Response& response,
                                     const MeasureResources& resources,
                                     const QueryFeatures& query,
                                     const ScoreSet* external = nullptr);
MeasureRow measure_response(const Post& post, const Response& response,
                            const MeasureResources& resources,
                            const ScoreSet* external = nullptr);

// Responses in corpus order (posts in order, responses in file order). The
// measure kernels and score_texts both use this order.
std::vector<const Response*> ordered_responses(const Corpus& corpus);

// Fills the diversity metric per source group in place.
void assign_diversity(std::vector<ResponseMeasurement>& measured);

// Two-phase corpus measurement. `external_scores` is empty or aligned with
// ordered_responses(). The OpenMP kernel and the serial reference produce
// identical rows for any worker count.
std::vector<MeasureRow> measure_corpus(const Corpus& corpus,
                                       const MeasureResources& resources,
                                       std::span<const ScoreSet> external_scores,
                                       int workers);
std::vector<MeasureRow> measure_corpus_serial(
    const Corpus& corpus, const MeasureResources& resources,
    std::span<const ScoreSet> external_scores);

// Line-delimited MeasureRow file.
void write_measures(const std::filesystem::path& path,
                    const std::vector<MeasureRow>& rows);
std::vector<MeasureRow> read_measures(const std::filesystem::path& path);
std::string measure_row_to_json(const MeasureRow& row);

}  // namespace peerlex
