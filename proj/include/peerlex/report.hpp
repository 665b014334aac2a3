#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peerlex/corpus.hpp"
#include "peerlex/metrics.hpp"
#include "peerlex/stats.hpp"

namespace peerlex::report {

enum class Format { markdown, csv };
enum class KsLevel { post, response };

Format parse_format(std::string_view name);
KsLevel parse_ks_level(std::string_view name);
stats::EffectSize parse_effect_size(std::string_view name);

// 3 if p < 0.001, 2 if p < 0.01, 1 if p < 0.05, else 0.
int stars(double p);

// 100 (ai - oc) / oc; nullopt for a zero baseline.
std::optional<double> difference_percent(double mean_ai, double mean_oc);

inline constexpr double kEmphasisEffect = 0.20;

struct ComparisonRow {
  std::string metric;
  std::optional<double> mean_ai;
  std::optional<double> mean_oc;
  std::optional<double> diff_pct;
  std::optional<double> cohens_d;
  std::optional<double> t;
  std::optional<double> t_p_adjusted;
  std::optional<double> ks_d;
  std::optional<double> ks_p_adjusted;
  int stars_t = 0;
  int stars_ks = 0;
  std::size_t n_pairs = 0;
  std::size_t exclusions = 0;
  bool emphasis = false;           // |d| > 0.20
  bool negative_baseline = false;  // mean_oc < 0, diff_pct sign unreliable
};

struct Metadata {
  std::string title;
  std::string model;
  std::string scorer;        // provenance of the classifier-style columns
  std::string effect_size;   // "pooled" or "paired_dz"
  std::string ks_level;      // "post" or "response"
  std::size_t family_size = 0;
  std::size_t total_exclusions = 0;
  std::vector<std::string> notes;
};

struct ComparisonTable {
  Metadata meta;
  std::vector<ComparisonRow> rows;
};

struct Options {
  stats::EffectSize effect = stats::EffectSize::pooled;
  KsLevel ks_level = KsLevel::post;
  int precision = 3;
  int workers = 1;
  std::string scorer_label = "builtin:lexical";
};

// Pairs, compares and Bonferroni-corrects every metric of `family` (the
// family size is the correction factor for both the t and KS columns).
ComparisonTable build_comparison_table(const std::vector<MeasureRow>& rows,
                                       const Corpus& corpus,
                                       const std::string& model,
                                       const std::vector<std::string>& family,
                                       const Options& options,
                                       const std::string& title = "");

struct MultiModelRow {
  std::string metric;
  // Post-level means, human first, then models in table order.
  std::vector<std::optional<double>> means;
  // Paired t of each model against human.
  std::vector<std::optional<stats::TestResult>> t_vs_human;
  std::optional<stats::TestResult> h;
  std::size_t n_common_posts = 0;
};

struct MultiModelTable {
  Metadata meta;
  std::vector<std::string> models;
  std::vector<MultiModelRow> rows;
};

// H uses the posts that have a value in every modality (human post means
// and each model's value).
MultiModelTable build_multimodel_table(const std::vector<MeasureRow>& rows,
                                       const Corpus& corpus,
                                       const std::vector<std::string>& models,
                                       const std::vector<std::string>& family,
                                       const Options& options);

std::string render(const ComparisonTable& table, Format format, int precision = 3);
std::string render(const MultiModelTable& table, Format format, int precision = 3);
std::string render_metadata(const Metadata& meta, Format format);

// Per metric and source: equal-width histogram over the pooled range.
std::string distribution_csv(const std::vector<MeasureRow>& rows,
                             const std::vector<std::string>& metrics,
                             std::size_t bins, int precision = 6);

// Locale-independent fixed formatting.
std::string format_fixed(double value, int precision);
std::string format_general(double value, int significant);

}  // namespace peerlex::report
