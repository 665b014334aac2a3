#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace peerlex {

struct MeasureRow;

inline constexpr std::string_view kHumanSource = "human";

struct Post {
  std::string post_id;
  std::string community;
  std::int64_t created_utc = 0;
  std::string title;
  std::string body;
};

// A response source is either "human" or the name of the generating model.
class Source {
 public:
  static Source human() { return Source(std::string(kHumanSource)); }
  static Source model(std::string name);
  static Source parse(std::string_view raw);

  bool is_human() const noexcept { return name_ == kHumanSource; }
  // "human" for community replies, otherwise the model name.
  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Source&, const Source&) = default;

 private:
  explicit Source(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

struct Response {
  std::string response_id;
  std::string post_id;
  Source source = Source::human();
  std::string body;
  std::int64_t created_utc = 0;
};

struct LoadReport {
  std::size_t posts_loaded = 0;
  std::size_t posts_rejected = 0;      // empty body after trimming
  std::size_t responses_loaded = 0;
  std::size_t responses_rejected = 0;  // attached to a rejected post
};

// Immutable after load. Posts keep file order; responses keep file order
// within each post.
class Corpus {
 public:
  Corpus() = default;

  const std::vector<Post>& posts() const noexcept { return posts_; }
  const std::vector<Response>& responses_for(std::size_t post_index) const {
    return responses_by_post_.at(post_index);
  }
  std::optional<std::size_t> find_post(std::string_view post_id) const;
  const Post& post(std::string_view post_id) const;

  std::size_t response_count() const noexcept;
  // Distinct model names in first-seen order.
  std::vector<std::string> model_names() const;
  const LoadReport& report() const noexcept { return report_; }

  // Validating builders; throw InputError on any violated invariant.
  void add_post(Post post);
  void add_response(Response response);

 private:
  friend Corpus load_corpus(const std::filesystem::path&,
                            const std::vector<std::filesystem::path>&);

  std::vector<Post> posts_;
  std::vector<std::vector<Response>> responses_by_post_;
  std::unordered_map<std::string, std::size_t> post_index_;
  std::unordered_map<std::string, std::size_t> response_ids_;
  LoadReport report_;
};

// Loads a posts/responses JSONL pair. Blank lines are skipped; posts whose
// body is blank are rejected and counted, as are responses attached to them.
// Throws ParseError on malformed lines, duplicate ids, dangling post_ids and
// duplicate model responses for one post.
Corpus load_corpus(const std::filesystem::path& posts_path,
                   const std::filesystem::path& responses_path);
// Responses may be split across files, e.g. one per model.
Corpus load_corpus(const std::filesystem::path& posts_path,
                   const std::vector<std::filesystem::path>& responses_paths);

// Query text sent to models and used for similarity measures.
std::string query_text(const Post& post, bool include_title);

struct PairedObservation {
  std::string post_id;
  std::string metric;
  double oc_mean = 0.0;
  double ai_value = 0.0;
};

struct Pairing {
  std::vector<PairedObservation> observations;
  std::size_t excluded_posts = 0;  // missing a human side or the model side
};

// One observation per post with >=1 human value and a model value for
// `metric`, in corpus post order.
Pairing pair_by_post(const Corpus& corpus, const std::vector<MeasureRow>& rows,
                     const std::string& metric, const std::string& model);

}  // namespace peerlex
