#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peerlex/errors.hpp"
#include "peerlex/lexicon.hpp"
#include "peerlex/textproc.hpp"

namespace peerlex {

inline constexpr std::array<std::string_view, 5> kScoreNames = {
    "formality", "empathy", "politeness", "emotional_support",
    "informational_support"};

bool is_score_name(std::string_view name);

// Every present value lies in [0,1].
struct ScoreSet {
  std::optional<double> formality;
  std::optional<double> empathy;
  std::optional<double> politeness;
  std::optional<double> emotional_support;
  std::optional<double> informational_support;

  std::optional<double>& operator[](std::string_view name);
  const std::optional<double>& operator[](std::string_view name) const;

  friend bool operator==(const ScoreSet&, const ScoreSet&) = default;
};

// clamp01(bias + sum weight_c * f_c), f_c as proportions.
struct LinearScore {
  double bias = 0.0;
  std::map<std::string, double> weights;

  double evaluate(const CategoryFrequencies& freqs) const;
};

// Lexical stand-ins for the trained classifiers. Formality is the
// Heylighen-Dewaele F-measure on proportions:
//   (article + prep + adj - pronoun - verb - adverb - interj + 1) / 2.
struct BaselineConfig {
  LinearScore formality;
  LinearScore empathy;
  LinearScore politeness;
  LinearScore emotional_support;
  LinearScore informational_support;

  static BaselineConfig defaults();
  LinearScore& score(std::string_view name);
  const LinearScore& score(std::string_view name) const;
  std::vector<std::string> required_categories() const;
};

// Throws InputError naming the first category the lexicon lacks.
void validate_baseline(const BaselineConfig& config, const Lexicon& lexicon);

ScoreSet baseline_scores(const CategoryFrequencies& freqs,
                         const BaselineConfig& config);

class ScorerError : public Error {
 public:
  using Error::Error;
};
class ProtocolError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};
class PluginExitedError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};
class PluginTimeoutError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

struct PluginOptions {
  std::string command;  // run through /bin/sh -c
  std::size_t batch_size = 64;
  std::chrono::milliseconds timeout{120'000};  // per batch, and for hello
  int max_retries = 1;  // restarts of the plugin per failing batch
  // Strict: rethrow after retries. Lenient: mark the batch absent and log.
  bool strict = false;
};

class Subprocess;

// One running plugin process speaking the newline-delimited JSON protocol:
//   plugin -> host  {"hello":{"scorer":NAME,"metrics":[...]}}
//   host -> plugin  {"id":N,"text":S}
//   plugin -> host  {"id":N,"scores":{METRIC:FLOAT,...}}
//   host -> plugin  {"bye":true}
class PluginScorer {
 public:
  // Starts the process and waits for the hello record.
  explicit PluginScorer(PluginOptions options);
  ~PluginScorer();
  PluginScorer(const PluginScorer&) = delete;
  PluginScorer& operator=(const PluginScorer&) = delete;

  const std::string& scorer_name() const noexcept { return scorer_name_; }
  const std::vector<std::string>& metrics() const noexcept { return metrics_; }

  // Sends every text, then collects exactly one response per request id.
  std::vector<ScoreSet> score_batch(std::span<const std::string> texts);

  // Sends bye and returns the exit status (-1 if it had to be killed).
  int shutdown();

 private:
  PluginOptions options_;
  std::unique_ptr<Subprocess> process_;
  std::string scorer_name_;
  std::vector<std::string> metrics_;
  long long next_id_ = 0;
};

class ScorerHandle {
 public:
  enum class Kind { builtin, plugin };

  static ScorerHandle builtin(const Lexicon& lexicon, BaselineConfig config,
                              text::Options text_options = {});
  static ScorerHandle plugin(PluginOptions options);
  // "builtin" or "plugin:<command>".
  static ScorerHandle from_spec(std::string_view spec, const Lexicon& lexicon,
                                const BaselineConfig& config,
                                const text::Options& text_options,
                                PluginOptions plugin_defaults = {});

  Kind kind() const noexcept { return kind_; }
  const std::vector<std::string>& provided_metrics() const;
  // Provenance label for reports, e.g. "builtin:lexical" or "plugin:NAME".
  std::string label() const;

  const Lexicon* lexicon() const noexcept { return lexicon_; }
  const BaselineConfig& baseline() const noexcept { return baseline_; }
  const text::Options& text_options() const noexcept { return text_options_; }
  PluginScorer* plugin_process() const noexcept { return plugin_.get(); }
  const PluginOptions& plugin_options() const noexcept { return plugin_options_; }

  // Replaces a failed plugin process with a fresh one.
  void restart_plugin();

 private:
  Kind kind_ = Kind::builtin;
  const Lexicon* lexicon_ = nullptr;
  BaselineConfig baseline_;
  text::Options text_options_;
  PluginOptions plugin_options_;
  std::shared_ptr<PluginScorer> plugin_;
  std::vector<std::string> builtin_metrics_;
};

struct ScoreRun {
  std::vector<ScoreSet> scores;  // aligned with the input texts
  std::vector<std::string> errors;
  std::size_t failed_texts = 0;
};

ScoreRun score_texts(ScorerHandle& handle, const std::vector<std::string>& texts);

}  // namespace peerlex
