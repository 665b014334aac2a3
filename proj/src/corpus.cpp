#include "peerlex/corpus.hpp"

#include <algorithm>
#include <json.hpp>
#include <unordered_set>

#include "io_util.hpp"
#include "peerlex/errors.hpp"
#include "peerlex/metrics.hpp"

namespace peerlex {

using nlohmann::json;

Source Source::model(std::string name) {
  if (name.empty()) throw InputError("model name must be nonempty");
  if (name == kHumanSource) throw InputError("\"human\" is not a model name");
  return Source(std::move(name));
}

Source Source::parse(std::string_view raw) {
  if (raw == kHumanSource) return human();
  return model(std::string(raw));
}

std::optional<std::size_t> Corpus::find_post(std::string_view post_id) const {
  auto it = post_index_.find(std::string(post_id));
  if (it == post_index_.end()) return std::nullopt;
  return it->second;
}

const Post& Corpus::post(std::string_view post_id) const {
  auto index = find_post(post_id);
  if (!index) throw InputError("unknown post_id '" + std::string(post_id) + "'");
  return posts_[*index];
}

std::size_t Corpus::response_count() const noexcept {
  std::size_t n = 0;
  for (const auto& list : responses_by_post_) n += list.size();
  return n;
}

std::vector<std::string> Corpus::model_names() const {
  std::vector<std::string> names;
  for (const auto& list : responses_by_post_)
    for (const auto& r : list)
      if (!r.source.is_human() &&
          std::find(names.begin(), names.end(), r.source.name()) == names.end())
        names.push_back(r.source.name());
  return names;
}

void Corpus::add_post(Post post) {
  if (post.post_id.empty()) throw InputError("post_id must be nonempty");
  if (detail::is_blank(post.body))
    throw InputError("post '" + post.post_id + "' has an empty body");
  if (post_index_.count(post.post_id))
    throw InputError("duplicate post_id '" + post.post_id + "'");
  post_index_.emplace(post.post_id, posts_.size());
  posts_.push_back(std::move(post));
  responses_by_post_.emplace_back();
}

void Corpus::add_response(Response response) {
  if (response.response_id.empty()) throw InputError("response_id must be nonempty");
  auto index = find_post(response.post_id);
  if (!index)
    throw InputError("response '" + response.response_id +
                     "' references unknown post_id '" + response.post_id + "'");
  if (response_ids_.count(response.response_id))
    throw InputError("duplicate response_id '" + response.response_id + "'");
  auto& list = responses_by_post_[*index];
  if (!response.source.is_human()) {
    for (const auto& existing : list)
      if (existing.source == response.source)
        throw InputError("post '" + response.post_id + "' already has a response from model '" +
                         response.source.name() + "'");
  }
  response_ids_.emplace(response.response_id, *index);
  list.push_back(std::move(response));
}

namespace {

const json& require(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& record, const char* key) {
  const auto& value = require(record, key);
  if (!value.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
  return value.get<std::string>();
}

std::int64_t require_int(const json& record, const char* key) {
  const auto& value = require(record, key);
  if (!value.is_number_integer())
    throw InputError(std::string("field '") + key + "' must be an integer");
  return value.get<std::int64_t>();
}

json parse_record(std::string_view line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!record.is_object()) throw InputError("record must be a JSON object");
  return record;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& posts_path,
                   const std::filesystem::path& responses_path) {
  return load_corpus(posts_path, std::vector<std::filesystem::path>{responses_path});
}

Corpus load_corpus(const std::filesystem::path& posts_path,
                   const std::vector<std::filesystem::path>& responses_paths) {
  Corpus corpus;
  std::unordered_set<std::string> rejected_posts;

  detail::for_each_line(posts_path, [&](std::size_t number, std::string_view line) {
    if (detail::is_blank(line)) return;
    try {
      const json record = parse_record(line);
      Post post;
      post.post_id = require_string(record, "post_id");
      post.community = require_string(record, "community");
      post.created_utc = require_int(record, "created_utc");
      post.title = require_string(record, "title");
      post.body = require_string(record, "body");
      if (!post.post_id.empty() && detail::is_blank(post.body)) {
        if (!rejected_posts.insert(post.post_id).second || corpus.find_post(post.post_id))
          throw InputError("duplicate post_id '" + post.post_id + "'");
        ++corpus.report_.posts_rejected;
        return;
      }
      if (rejected_posts.count(post.post_id))
        throw InputError("duplicate post_id '" + post.post_id + "'");
      corpus.add_post(std::move(post));
      ++corpus.report_.posts_loaded;
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(posts_path.string(), number, e.what());
    }
  });

  for (const auto& responses_path : responses_paths) {
    detail::for_each_line(responses_path, [&](std::size_t number, std::string_view line) {
      if (detail::is_blank(line)) return;
      try {
        const json record = parse_record(line);
        Response response;
        response.response_id = require_string(record, "response_id");
        response.post_id = require_string(record, "post_id");
        response.source = Source::parse(require_string(record, "source"));
        response.body = require_string(record, "body");
        response.created_utc = require_int(record, "created_utc");
        if (rejected_posts.count(response.post_id)) {
          ++corpus.report_.responses_rejected;
          return;
        }
        corpus.add_response(std::move(response));
        ++corpus.report_.responses_loaded;
      } catch (const ParseError&) {
        throw;
      } catch (const InputError& e) {
        throw ParseError(responses_path.string(), number, e.what());
      }
    });
  }

  return corpus;
}

std::string query_text(const Post& post, bool include_title) {
  if (include_title && !detail::is_blank(post.title)) return post.title + "\n\n" + post.body;
  return post.body;
}

Pairing pair_by_post(const Corpus& corpus, const std::vector<MeasureRow>& rows,
                     const std::string& metric, const std::string& model) {
  struct Side {
    std::vector<double> human;
    std::optional<double> model;
  };
  std::vector<Side> sides(corpus.posts().size());
  bool seen = false;
  for (const auto& row : rows) {
    auto value = row.get(metric);
    if (!value) continue;
    seen = true;
    auto index = corpus.find_post(row.post_id);
    if (!index) continue;
    if (row.source == kHumanSource)
      sides[*index].human.push_back(*value);
    else if (row.source == model)
      sides[*index].model = *value;
  }
  if (!seen) throw InputError("metric '" + metric + "' is absent from every measure row");

  Pairing pairing;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    auto& side = sides[i];
    if (side.human.empty() || !side.model) {
      ++pairing.excluded_posts;
      continue;
    }
    // Summation in sorted order keeps the mean independent of reply order.
    std::sort(side.human.begin(), side.human.end());
    double sum = 0.0;
    for (double v : side.human) sum += v;
    pairing.observations.push_back(
        {corpus.posts()[i].post_id, metric, sum / static_cast<double>(side.human.size()),
         *side.model});
  }
  return pairing;
}

}  // namespace peerlex
