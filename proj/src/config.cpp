#include "peerlex/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "io_util.hpp"
#include "peerlex/errors.hpp"

namespace peerlex {

namespace {

namespace pt = boost::property_tree;

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : "nan";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::vector<std::string> split_list(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto comma = raw.find(',', start);
    if (comma == std::string_view::npos) comma = raw.size();
    const auto item = detail::trim(raw.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

struct Field {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

class Binder {
 public:
  using Section = std::vector<std::pair<std::string, Field>>;
  std::vector<std::pair<std::string, Section>> sections;

  Section& section(const std::string& name) {
    sections.emplace_back(name, Section{});
    return sections.back().second;
  }

  const Field* find(const std::string& sec, const std::string& key) const {
    for (const auto& [name, fields] : sections)
      if (name == sec)
        for (const auto& [k, f] : fields)
          if (k == key) return &f;
    return nullptr;
  }
  bool has_section(const std::string& sec) const {
    for (const auto& [name, fields] : sections)
      if (name == sec) return true;
    return false;
  }
};

template <typename T>
T parse_number(const std::string& raw) {
  T value{};
  const auto s = detail::trim(raw);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InputError("'" + raw + "' is not a valid number");
  return value;
}

bool parse_bool(const std::string& raw) {
  const auto s = detail::trim(raw);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw InputError("'" + raw + "' is not a boolean");
}

Field text_field(std::string& target) {
  return {[&target](const std::string& v) { target = std::string(detail::trim(v)); },
          [&target] { return target; }};
}
Field path_field(std::filesystem::path& target) {
  return {[&target](const std::string& v) { target = std::string(detail::trim(v)); },
          [&target] { return target.string(); }};
}
Field bool_field(bool& target) {
  return {[&target](const std::string& v) { target = parse_bool(v); },
          [&target] { return std::string(target ? "true" : "false"); }};
}
template <typename T>
Field number_field(T& target) {
  return {[&target](const std::string& v) { target = parse_number<T>(v); },
          [&target] {
            if constexpr (std::is_floating_point_v<T>) return shortest(target);
            else return std::to_string(target);
          }};
}
Field list_field(std::vector<std::string>& target) {
  return {[&target](const std::string& v) { target = split_list(v); },
          [&target] { return join(target); }};
}

// "category:weight, ..." for a linear score.
Field weights_field(LinearScore& score) {
  return {[&score](const std::string& v) {
            score.weights.clear();
            for (const auto& item : split_list(v)) {
              const auto colon = item.rfind(':');
              if (colon == std::string::npos || colon == 0)
                throw InputError("weight '" + item + "' must be category:weight");
              const auto name = std::string(detail::trim(item.substr(0, colon)));
              if (!score.weights.emplace(name, parse_number<double>(item.substr(colon + 1))).second)
                throw InputError("weight for '" + name + "' given twice");
            }
          },
          [&score] {
            std::vector<std::string> items;
            for (const auto& [k, w] : score.weights) items.push_back(k + ":" + shortest(w));
            return join(items);
          }};
}

Binder bind(RunConfig& c) {
  Binder b;
  auto& paths = b.section("paths");
  paths = {{"posts", path_field(c.paths.posts)},
           {"responses", path_field(c.paths.responses)},
           {"lexicon", path_field(c.paths.lexicon)},
           {"embeddings", path_field(c.paths.embeddings)},
           {"embeddings_format", text_field(c.paths.embeddings_format)},
           {"embeddings_max_words", number_field(c.paths.embeddings_max_words)},
           {"measures", path_field(c.paths.measures)},
           {"out", path_field(c.paths.out)}};

  auto& measure = b.section("measure");
  measure = {{"include_title", bool_field(c.measure.include_title)},
             {"strip_urls", bool_field(c.measure.text.strip_urls)},
             {"abbreviations", list_field(c.measure.text.abbreviations)},
             {"style_categories", list_field(c.measure.style_categories)},
             {"cdi_article", list_field(c.measure.cdi.article)},
             {"cdi_preposition", list_field(c.measure.cdi.preposition)},
             {"cdi_personal_pronoun", list_field(c.measure.cdi.personal_pronoun)},
             {"cdi_impersonal_pronoun", list_field(c.measure.cdi.impersonal_pronoun)},
             {"cdi_auxiliary_verb", list_field(c.measure.cdi.auxiliary_verb)},
             {"cdi_conjunction", list_field(c.measure.cdi.conjunction)},
             {"cdi_adverb", list_field(c.measure.cdi.adverb)},
             {"cdi_negation", list_field(c.measure.cdi.negation)}};

  auto& baseline = b.section("baseline");
  for (auto name : kScoreNames) {
    auto& score = c.baseline.score(name);
    baseline.emplace_back(std::string(name) + "_bias", number_field(score.bias));
    baseline.emplace_back(std::string(name) + "_weights", weights_field(score));
  }

  auto& scorer = b.section("scorer");
  scorer = {{"spec", text_field(c.scorer)},
            {"batch_size", number_field(c.plugin.batch_size)},
            {"timeout_ms",
             {[&c](const std::string& v) {
                c.plugin.timeout = std::chrono::milliseconds(parse_number<long long>(v));
              },
              [&c] { return std::to_string(c.plugin.timeout.count()); }}},
            {"max_retries", number_field(c.plugin.max_retries)},
            {"strict", bool_field(c.plugin.strict)}};

  auto& report = b.section("report");
  report = {{"effect_size",
             {[&c](const std::string& v) { c.report.effect = report::parse_effect_size(detail::trim(v)); },
              [&c] {
                return std::string(c.report.effect == stats::EffectSize::pooled ? "pooled" : "paired_dz");
              }}},
            {"ks_level",
             {[&c](const std::string& v) { c.report.ks_level = report::parse_ks_level(detail::trim(v)); },
              [&c] { return std::string(c.report.ks_level == report::KsLevel::post ? "post" : "response"); }}},
            {"precision", number_field(c.report.precision)},
            {"format",
             {[&c](const std::string& v) { c.format = report::parse_format(detail::trim(v)); },
              [&c] { return std::string(c.format == report::Format::csv ? "csv" : "markdown"); }}},
            {"lexicon_categories", list_field(c.lexicon_categories)},
            {"lexico_semantic_metrics", list_field(c.lexico_semantic_metrics)},
            {"histogram_bins", number_field(c.histogram_bins)}};

  auto& gen = b.section("generation");
  gen = {{"endpoint_url", text_field(c.generation.endpoint_url)},
         {"model_name", text_field(c.generation.model_name)},
         {"api_key_env", text_field(c.generation.api_key_env)},
         {"max_retries", number_field(c.generation.max_retries)},
         {"backoff_base_s", number_field(c.generation.backoff_base_s)},
         {"cache_dir", path_field(c.generation.cache_dir)},
         {"include_title", bool_field(c.generation.include_title)},
         {"workers", number_field(c.generation.workers)},
         {"request_timeout_s", number_field(c.generation.request_timeout_s)}};

  auto& run = b.section("run");
  run = {{"workers", number_field(c.workers)},
         {"model", text_field(c.model)},
         {"models", list_field(c.models)}};
  return b;
}

}  // namespace

void apply_config_text(RunConfig& config, const std::string& ini, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(ini);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(origin, e.line(), e.message());
  }
  const Binder binder = bind(config);
  for (const auto& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty())
      throw InputError(origin + ": key '" + section + "' must sit inside a [section]");
    if (!binder.has_section(section)) throw InputError(origin + ": unknown section [" + section + "]");
    for (const auto& [key, value] : keys) {
      const Field* field = binder.find(section, key);
      if (!field) throw InputError(origin + ": unknown key '" + key + "' in [" + section + "]");
      try {
        field->set(value.data());
      } catch (const InputError& e) {
        throw InputError(origin + ": [" + section + "] " + key + ": " + e.what());
      }
    }
  }
  if (config.report.precision < 0 || config.report.precision > 17)
    throw InputError(origin + ": precision must be within 0..17");
  if (config.histogram_bins == 0) throw InputError(origin + ": histogram_bins must be >= 1");
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig config;
  apply_config_text(config, detail::read_file(path), path.string());
  return config;
}

std::string normalized_config(const RunConfig& config) {
  RunConfig copy = config;
  const Binder binder = bind(copy);
  std::string out;
  for (const auto& [section, fields] : binder.sections) {
    out += (out.empty() ? "[" : "\n[") + section + "]\n";
    for (const auto& [key, field] : fields) out += key + " = " + field.get() + "\n";
  }
  return out;
}

}  // namespace peerlex
