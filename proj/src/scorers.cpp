#include "peerlex/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <set>
#include <unordered_map>

#include "subprocess.hpp"

namespace peerlex {

using nlohmann::json;

bool is_score_name(std::string_view name) {
  return std::find(kScoreNames.begin(), kScoreNames.end(), name) != kScoreNames.end();
}

std::optional<double>& ScoreSet::operator[](std::string_view name) {
  if (name == "formality") return formality;
  if (name == "empathy") return empathy;
  if (name == "politeness") return politeness;
  if (name == "emotional_support") return emotional_support;
  if (name == "informational_support") return informational_support;
  throw InputError("unknown score '" + std::string(name) + "'");
}

const std::optional<double>& ScoreSet::operator[](std::string_view name) const {
  return const_cast<ScoreSet&>(*this)[name];
}

double LinearScore::evaluate(const CategoryFrequencies& freqs) const {
  double value = bias;
  for (const auto& [category, weight] : weights) value += weight * freqs.at(category);
  return std::clamp(value, 0.0, 1.0);
}

BaselineConfig BaselineConfig::defaults() {
  BaselineConfig c;
  c.formality = {0.5,
                 {{"article", 0.5}, {"prep", 0.5}, {"adj", 0.5}, {"pronoun", -0.5},
                  {"verb", -0.5}, {"adverb", -0.5}, {"interj", -0.5}}};
  c.politeness = {0.5, {{"gratitude", 4.0}, {"hedge", 3.0}, {"request", 3.0}, {"swear", -6.0}}};
  c.empathy = {0.2, {{"affect", 3.0}, {"feel", 4.0}}};
  c.emotional_support = {0.0, {{"emosupport", 10.0}}};
  c.informational_support = {0.0, {{"infosupport", 10.0}}};
  return c;
}

LinearScore& BaselineConfig::score(std::string_view name) {
  if (name == "formality") return formality;
  if (name == "empathy") return empathy;
  if (name == "politeness") return politeness;
  if (name == "emotional_support") return emotional_support;
  if (name == "informational_support") return informational_support;
  throw InputError("unknown score '" + std::string(name) + "'");
}

const LinearScore& BaselineConfig::score(std::string_view name) const {
  return const_cast<BaselineConfig&>(*this).score(name);
}

std::vector<std::string> BaselineConfig::required_categories() const {
  std::set<std::string> names;
  for (auto name : kScoreNames)
    for (const auto& [category, weight] : score(name).weights) names.insert(category);
  return {names.begin(), names.end()};
}

void validate_baseline(const BaselineConfig& config, const Lexicon& lexicon) {
  for (const auto& category : config.required_categories())
    if (!lexicon.has_category(category))
      throw InputError("builtin scorer needs lexicon category '" + category + "'");
}

ScoreSet baseline_scores(const CategoryFrequencies& freqs, const BaselineConfig& config) {
  ScoreSet out;
  for (auto name : kScoreNames) out[name] = config.score(name).evaluate(freqs);
  return out;
}

// ---------------------------------------------------------------------------
// Plugin protocol

namespace {

json parse_protocol_line(const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::parse_error&) {
    throw ProtocolError("malformed line from plugin: " + line.substr(0, 200));
  }
}

std::chrono::steady_clock::time_point deadline_after(std::chrono::milliseconds timeout) {
  return std::chrono::steady_clock::now() + timeout;
}

}  // namespace

PluginScorer::PluginScorer(PluginOptions options)
    : options_(std::move(options)), process_(std::make_unique<Subprocess>(options_.command)) {
  std::string line;
  const auto deadline = deadline_after(options_.timeout);
  for (;;) {
    const auto status = process_->read_line(line, deadline);
    if (status == Subprocess::ReadStatus::timeout)
      throw PluginTimeoutError("plugin sent no hello within the timeout");
    if (status == Subprocess::ReadStatus::eof)
      throw PluginExitedError("plugin exited before sending hello");
    if (!line.empty()) break;
  }
  const json hello = parse_protocol_line(line);
  if (hello.is_object() && hello.contains("error"))
    throw ScorerError("plugin failed to start: " + hello["error"].dump());
  if (!hello.is_object() || !hello.contains("hello") || !hello["hello"].is_object())
    throw ProtocolError("first plugin record must be a hello: " + line.substr(0, 200));
  const auto& body = hello["hello"];
  if (!body.contains("scorer") || !body["scorer"].is_string())
    throw ProtocolError("hello lacks a scorer name");
  if (!body.contains("metrics") || !body["metrics"].is_array())
    throw ProtocolError("hello lacks a metrics list");
  scorer_name_ = body["scorer"].get<std::string>();
  for (const auto& m : body["metrics"]) {
    if (!m.is_string() || !is_score_name(m.get<std::string>()))
      throw ProtocolError("hello advertises unknown metric " + m.dump());
    const auto name = m.get<std::string>();
    if (std::find(metrics_.begin(), metrics_.end(), name) != metrics_.end())
      throw ProtocolError("hello advertises '" + name + "' twice");
    metrics_.push_back(name);
  }
}

PluginScorer::~PluginScorer() {
  try {
    shutdown();
  } catch (...) {
  }
}

std::vector<ScoreSet> PluginScorer::score_batch(std::span<const std::string> texts) {
  if (process_->exited()) throw PluginExitedError("plugin is not running");
  std::unordered_map<long long, std::size_t> pending;
  std::set<long long> answered;
  std::string requests;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const long long id = next_id_++;
    pending.emplace(id, i);
    json record = {{"id", id}, {"text", texts[i]}};
    requests += record.dump(-1, ' ', false, json::error_handler_t::replace);
    requests.push_back('\n');
  }
  process_->send(requests);

  std::vector<ScoreSet> out(texts.size());
  const auto deadline = deadline_after(options_.timeout);
  std::string line;
  while (!pending.empty()) {
    const auto status = process_->read_line(line, deadline);
    if (status == Subprocess::ReadStatus::timeout)
      throw PluginTimeoutError("plugin did not answer " + std::to_string(pending.size()) +
                               " request(s) within the batch timeout");
    if (status == Subprocess::ReadStatus::eof)
      throw PluginExitedError("plugin exited with " + std::to_string(pending.size()) +
                              " request(s) unanswered");
    if (line.empty()) continue;
    const json record = parse_protocol_line(line);
    if (!record.is_object() || !record.contains("id") || !record["id"].is_number_integer())
      throw ProtocolError("plugin record lacks an integer id: " + line.substr(0, 200));
    const long long id = record["id"].get<long long>();
    auto it = pending.find(id);
    if (it == pending.end()) {
      if (answered.count(id)) throw ProtocolError("duplicate response for id " + std::to_string(id));
      throw ProtocolError("response for id " + std::to_string(id) + " that was never requested");
    }
    ScoreSet& scores = out[it->second];
    // A per-text inference failure omits scores and carries an error field.
    if (record.contains("error") && !record.contains("scores")) {
      std::cerr << "scorer: text " << id << ": " << record["error"].dump() << "\n";
      answered.insert(id);
      pending.erase(it);
      continue;
    }
    if (!record.contains("scores") || !record["scores"].is_object())
      throw ProtocolError("response " + std::to_string(id) + " lacks a scores object");
    if (record.contains("error"))
      std::cerr << "scorer: text " << id << ": " << record["error"].dump() << "\n";
    for (const auto& [name, value] : record["scores"].items()) {
      if (std::find(metrics_.begin(), metrics_.end(), name) == metrics_.end())
        throw ProtocolError("response " + std::to_string(id) + " has unadvertised metric '" + name + "'");
      if (!value.is_number() || !std::isfinite(value.get<double>()) || value.get<double>() < 0.0 ||
          value.get<double>() > 1.0)
        throw ProtocolError("response " + std::to_string(id) + " has score " + value.dump() +
                            " for '" + name + "' outside [0,1]");
      scores[name] = value.get<double>();
    }
    answered.insert(id);
    pending.erase(it);
  }
  return out;
}

int PluginScorer::shutdown() {
  if (!process_ || process_->exited()) return process_ ? process_->wait({}).value_or(-1) : -1;
  const auto deadline = deadline_after(std::chrono::milliseconds(5000));
  try {
    process_->send("{\"bye\":true}\n");
  } catch (const Error&) {
  }
  process_->close_stdin(deadline);
  if (auto status = process_->wait(deadline)) return *status;
  process_->kill();
  return -1;
}

// ---------------------------------------------------------------------------

ScorerHandle ScorerHandle::builtin(const Lexicon& lexicon, BaselineConfig config,
                                   text::Options text_options) {
  validate_baseline(config, lexicon);
  ScorerHandle h;
  h.kind_ = Kind::builtin;
  h.lexicon_ = &lexicon;
  h.baseline_ = std::move(config);
  h.text_options_ = std::move(text_options);
  h.builtin_metrics_.assign(kScoreNames.begin(), kScoreNames.end());
  return h;
}

ScorerHandle ScorerHandle::plugin(PluginOptions options) {
  ScorerHandle h;
  h.kind_ = Kind::plugin;
  h.plugin_options_ = options;
  h.plugin_ = std::make_shared<PluginScorer>(std::move(options));
  return h;
}

ScorerHandle ScorerHandle::from_spec(std::string_view spec, const Lexicon& lexicon,
                                     const BaselineConfig& config,
                                     const text::Options& text_options,
                                     PluginOptions plugin_defaults) {
  if (spec == "builtin") return builtin(lexicon, config, text_options);
  constexpr std::string_view prefix = "plugin:";
  if (spec.starts_with(prefix) && spec.size() > prefix.size()) {
    plugin_defaults.command = std::string(spec.substr(prefix.size()));
    return plugin(std::move(plugin_defaults));
  }
  throw InputError("scorer must be 'builtin' or 'plugin:<command>', got '" + std::string(spec) + "'");
}

const std::vector<std::string>& ScorerHandle::provided_metrics() const {
  return kind_ == Kind::plugin ? plugin_->metrics() : builtin_metrics_;
}

std::string ScorerHandle::label() const {
  return kind_ == Kind::plugin ? "plugin:" + plugin_->scorer_name() : "builtin:lexical";
}

void ScorerHandle::restart_plugin() {
  if (kind_ != Kind::plugin) return;
  const auto previous = plugin_->metrics();
  plugin_.reset();
  plugin_ = std::make_shared<PluginScorer>(plugin_options_);
  if (plugin_->metrics() != previous)
    throw ProtocolError("restarted plugin advertises a different metric set");
}

ScoreRun score_texts(ScorerHandle& handle, const std::vector<std::string>& texts) {
  ScoreRun run;
  run.scores.resize(texts.size());
  if (handle.kind() == ScorerHandle::Kind::builtin) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto stats = text::text_stats(texts[i], handle.text_options());
      if (!stats.usable) continue;
      run.scores[i] =
          baseline_scores(category_frequencies(stats.tokens, *handle.lexicon()), handle.baseline());
    }
    return run;
  }

  const auto& options = handle.plugin_options();
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  for (std::size_t begin = 0; begin < texts.size(); begin += batch) {
    const std::size_t end = std::min(texts.size(), begin + batch);
    const std::span<const std::string> slice(texts.data() + begin, end - begin);
    for (int attempt = 0;; ++attempt) {
      try {
        auto scores = handle.plugin_process()->score_batch(slice);
        std::move(scores.begin(), scores.end(), run.scores.begin() + static_cast<std::ptrdiff_t>(begin));
        break;
      } catch (const ScorerError& e) {
        run.errors.push_back("texts " + std::to_string(begin) + ".." + std::to_string(end - 1) +
                             " attempt " + std::to_string(attempt + 1) + ": " + e.what());
        std::cerr << "scorer: " << run.errors.back() << "\n";
        const bool retry = attempt < options.max_retries;
        if (!retry && options.strict) throw;
        try {
          handle.restart_plugin();
        } catch (const ScorerError& restart) {
          if (options.strict) throw;
          run.errors.push_back(std::string("restart failed: ") + restart.what());
          run.failed_texts += texts.size() - begin;
          return run;
        }
        if (!retry) {
          run.failed_texts += end - begin;
          break;
        }
      }
    }
  }
  return run;
}

}  // namespace peerlex
