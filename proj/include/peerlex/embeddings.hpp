#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace peerlex {

enum class EmbeddingFormat { binary, text };

EmbeddingFormat parse_embedding_format(std::string_view name);

// word2vec-style table. Vectors are stored as the file's 32-bit floats;
// all arithmetic on them is done in double.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim);

  // max_words == 0 loads the full vocabulary; otherwise the first N entries.
  static EmbeddingTable load(const std::filesystem::path& path,
                             EmbeddingFormat format, std::size_t max_words = 0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::size_t duplicates_skipped() const noexcept { return duplicates_; }

  // Null when the word is out of vocabulary.
  const float* find(std::string_view word) const;
  std::span<const float> vector(std::size_t index) const;

  // Returns false (and keeps the first vector) for a repeated word.
  bool add(std::string word, std::span<const float> values);

  void write_binary(const std::filesystem::path& path) const;
  void write_text(const std::filesystem::path& path) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_ = 0;
};

// Mean of in-vocabulary token vectors (multiset); nullopt when every token is
// out of vocabulary. Throws InputError for an empty token list.
std::optional<std::vector<double>> text_vector(
    const std::vector<std::string>& tokens, const EmbeddingTable& table);

// Throws InputError on a dimension mismatch or zero-norm input.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace peerlex
