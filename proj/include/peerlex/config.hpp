#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "peerlex/genclient.hpp"
#include "peerlex/metrics.hpp"
#include "peerlex/report.hpp"
#include "peerlex/scorers.hpp"

namespace peerlex {

struct Paths {
  std::filesystem::path posts;
  std::filesystem::path responses;   // may list several files, comma separated
  std::filesystem::path lexicon;
  std::filesystem::path embeddings;
  std::string embeddings_format = "text";
  std::size_t embeddings_max_words = 0;
  std::filesystem::path measures;
  std::filesystem::path out = "out";
};

struct RunConfig {
  Paths paths;
  MeasureConfig measure;
  BaselineConfig baseline = BaselineConfig::defaults();
  std::string scorer = "builtin";
  PluginOptions plugin;
  report::Options report;
  std::vector<std::string> lexicon_categories;  // empty: every lexicon category
  std::vector<std::string> lexico_semantic_metrics = metric::lexico_semantic();
  std::size_t histogram_bins = 20;
  gen::GenerationConfig generation;
  int workers = 1;
  std::string model;
  std::vector<std::string> models;
  report::Format format = report::Format::markdown;
};

// INI-style sections of key = value lines. Unknown sections or keys throw
// InputError. Keys absent from the file keep their defaults.
RunConfig load_config(const std::filesystem::path& path);
void apply_config_text(RunConfig& config, const std::string& ini,
                       const std::string& origin);

// Every key in canonical order, suitable for load_config.
std::string normalized_config(const RunConfig& config);

}  // namespace peerlex
