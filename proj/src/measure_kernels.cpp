// Corpus-wide measurement: an OpenMP kernel and the serial reference it is
// tested against. Both run the same per-response function and the same
// serial diversity pass, so their rows are identical for any thread count.

#include <omp.h>

#include <exception>
#include <mutex>

#include "peerlex/errors.hpp"
#include "peerlex/metrics.hpp"

namespace peerlex {

namespace {

void check_scores(const Corpus& corpus, std::span<const ScoreSet> external) {
  if (!external.empty() && external.size() != corpus.response_count())
    throw InputError("external scores (" + std::to_string(external.size()) +
                     ") do not align with the corpus (" +
                     std::to_string(corpus.response_count()) + " responses)");
}

std::vector<MeasureRow> take_rows(std::vector<ResponseMeasurement>& measured) {
  std::vector<MeasureRow> rows;
  rows.reserve(measured.size());
  for (auto& m : measured) rows.push_back(std::move(m.row));
  return rows;
}

}  // namespace

std::vector<MeasureRow> measure_corpus_serial(const Corpus& corpus,
                                              const MeasureResources& resources,
                                              std::span<const ScoreSet> external_scores) {
  check_scores(corpus, external_scores);
  const auto& posts = corpus.posts();
  std::vector<ResponseMeasurement> measured;
  measured.reserve(corpus.response_count());
  std::size_t k = 0;
  for (std::size_t p = 0; p < posts.size(); ++p) {
    const auto query = query_features(posts[p], resources);
    for (const auto& response : corpus.responses_for(p)) {
      const ScoreSet* external = external_scores.empty() ? nullptr : &external_scores[k];
      measured.push_back(measure_response(posts[p], response, resources, query, external));
      ++k;
    }
  }
  assign_diversity(measured);
  return take_rows(measured);
}

std::vector<MeasureRow> measure_corpus(const Corpus& corpus, const MeasureResources& resources,
                                       std::span<const ScoreSet> external_scores, int workers) {
  check_scores(corpus, external_scores);
  if (workers < 1) workers = 1;
  const auto& posts = corpus.posts();
  const auto responses = ordered_responses(corpus);
  std::vector<std::size_t> post_of;
  post_of.reserve(responses.size());
  for (std::size_t p = 0; p < posts.size(); ++p)
    post_of.insert(post_of.end(), corpus.responses_for(p).size(), p);

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto record_failure = [&] {
    std::lock_guard lock(failure_mutex);
    if (!failure) failure = std::current_exception();
  };

  std::vector<QueryFeatures> queries(posts.size());
  const auto n_posts = static_cast<std::ptrdiff_t>(posts.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 8)
  for (std::ptrdiff_t p = 0; p < n_posts; ++p) {
    try {
      queries[p] = query_features(posts[p], resources);
    } catch (...) {
      record_failure();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResponseMeasurement> measured(responses.size());
  const auto n = static_cast<std::ptrdiff_t>(responses.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto p = post_of[i];
      const ScoreSet* external = external_scores.empty() ? nullptr : &external_scores[i];
      measured[i] = measure_response(posts[p], *responses[i], resources, queries[p], external);
    } catch (...) {
      record_failure();
    }
  }
  if (failure) std::rethrow_exception(failure);

  assign_diversity(measured);
  return take_rows(measured);
}

}  // namespace peerlex
