#include "peerlex/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "io_util.hpp"
#include "peerlex/errors.hpp"

namespace peerlex {

namespace {

constexpr std::size_t kMaxWordBytes = 4096;

struct Header {
  std::size_t vocab = 0;
  std::size_t dim = 0;
};

Header parse_header(std::string_view line, const std::string& origin) {
  line = detail::trim(line);
  const auto space = line.find_first_of(" \t");
  if (space == std::string_view::npos) throw ParseError(origin, 1, "header must be 'VOCAB DIM'");
  const auto first = line.substr(0, space);
  const auto second = detail::trim(line.substr(space));
  Header h;
  auto r1 = std::from_chars(first.data(), first.data() + first.size(), h.vocab);
  auto r2 = std::from_chars(second.data(), second.data() + second.size(), h.dim);
  if (r1.ec != std::errc() || r1.ptr != first.data() + first.size() || r2.ec != std::errc() ||
      r2.ptr != second.data() + second.size() || h.dim == 0)
    throw ParseError(origin, 1, "header must be 'VOCAB DIM' with DIM > 0");
  return h;
}

float from_little_endian(const unsigned char* bytes) {
  std::uint32_t bits = 0;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(&bits, bytes, 4);
  } else {
    bits = std::uint32_t(bytes[0]) | std::uint32_t(bytes[1]) << 8 |
           std::uint32_t(bytes[2]) << 16 | std::uint32_t(bytes[3]) << 24;
  }
  return std::bit_cast<float>(bits);
}

void to_little_endian(float value, unsigned char* out) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>(bits >> (8 * i));
}

EmbeddingTable load_binary(const std::filesystem::path& path, std::size_t max_words) {
  const std::string origin = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + origin);
  std::string header_line;
  if (!std::getline(in, header_line)) throw ParseError(origin, 1, "missing header");
  const Header header = parse_header(header_line, origin);

  EmbeddingTable table(header.dim);
  const std::size_t wanted = max_words == 0 ? header.vocab : std::min(max_words, header.vocab);
  std::vector<unsigned char> payload(header.dim * 4);
  std::vector<float> values(header.dim);
  std::string word;
  for (std::size_t k = 0; k < wanted; ++k) {
    int c = in.get();
    while (c == '\n') c = in.get();
    word.clear();
    while (c != EOF && c != ' ') {
      word.push_back(static_cast<char>(c));
      if (word.size() > kMaxWordBytes)
        throw InputError(origin + ": entry " + std::to_string(k + 1) + " has no word terminator");
      c = in.get();
    }
    if (c == EOF)
      throw InputError(origin + ": truncated: header declares " + std::to_string(header.vocab) +
                       " words but the file ends after " + std::to_string(k));
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size())
      throw InputError(origin + ": truncated vector payload for word '" + word + "'");
    for (std::size_t d = 0; d < header.dim; ++d) {
      values[d] = from_little_endian(&payload[4 * d]);
      if (!std::isfinite(values[d]))
        throw InputError(origin + ": non-finite value in vector for '" + word + "'");
    }
    table.add(word, values);
  }
  if (wanted == header.vocab) {
    int c = in.get();
    while (c == '\n' || c == '\r' || c == ' ') c = in.get();
    if (c != EOF)
      throw InputError(origin + ": header/vocab mismatch: data continues after " +
                       std::to_string(header.vocab) + " entries");
  }
  return table;
}

EmbeddingTable load_text(const std::filesystem::path& path, std::size_t max_words) {
  const std::string origin = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + origin);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(origin, 1, "missing header");
  const Header header = parse_header(line, origin);

  EmbeddingTable table(header.dim);
  const std::size_t wanted = max_words == 0 ? header.vocab : std::min(max_words, header.vocab);
  std::vector<float> values(header.dim);
  std::size_t number = 1;
  std::size_t read = 0;
  while (read < wanted && std::getline(in, line)) {
    ++number;
    std::string_view view = detail::trim(line);
    if (view.empty()) continue;
    const auto space = view.find(' ');
    if (space == std::string_view::npos) throw ParseError(origin, number, "entry has no values");
    const std::string word(view.substr(0, space));
    std::size_t d = 0;
    const char* p = view.data() + space;
    const char* end = view.data() + view.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (d == header.dim)
        throw ParseError(origin, number, "more than " + std::to_string(header.dim) + " values");
      float value = 0.0f;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc() || (next != end && *next != ' '))
        throw ParseError(origin, number, "malformed value");
      if (!std::isfinite(value)) throw ParseError(origin, number, "non-finite value");
      values[d++] = value;
      p = next;
    }
    if (d != header.dim)
      throw ParseError(origin, number, "expected " + std::to_string(header.dim) + " values, got " +
                                           std::to_string(d));
    table.add(word, values);
    ++read;
  }
  if (read < wanted)
    throw InputError(origin + ": truncated: header declares " + std::to_string(header.vocab) +
                     " words but the file contains " + std::to_string(read));
  if (wanted == header.vocab) {
    while (std::getline(in, line))
      if (!detail::is_blank(line))
        throw InputError(origin + ": header/vocab mismatch: more than " +
                         std::to_string(header.vocab) + " entries");
  }
  return table;
}

}  // namespace

EmbeddingFormat parse_embedding_format(std::string_view name) {
  if (name == "binary" || name == "bin") return EmbeddingFormat::binary;
  if (name == "text" || name == "txt") return EmbeddingFormat::text;
  throw InputError("unknown embedding format '" + std::string(name) + "'");
}

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, EmbeddingFormat format,
                                    std::size_t max_words) {
  return format == EmbeddingFormat::binary ? load_binary(path, max_words)
                                           : load_text(path, max_words);
}

const float* EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return nullptr;
  return data_.data() + it->second * dim_;
}

std::span<const float> EmbeddingTable::vector(std::size_t index) const {
  return {data_.data() + index * dim_, dim_};
}

bool EmbeddingTable::add(std::string word, std::span<const float> values) {
  if (values.size() != dim_)
    throw InputError("vector for '" + word + "' has " + std::to_string(values.size()) +
                     " values, expected " + std::to_string(dim_));
  if (index_.count(word)) {
    ++duplicates_;
    return false;
  }
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), values.begin(), values.end());
  return true;
}

void EmbeddingTable::write_binary(const std::filesystem::path& path) const {
  std::string out = std::to_string(words_.size()) + " " + std::to_string(dim_) + "\n";
  unsigned char bytes[4];
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    out.push_back(' ');
    for (float v : vector(i)) {
      to_little_endian(v, bytes);
      out.append(reinterpret_cast<const char*>(bytes), 4);
    }
    out.push_back('\n');
  }
  detail::write_file_atomic(path, out);
}

void EmbeddingTable::write_text(const std::filesystem::path& path) const {
  std::string out = std::to_string(words_.size()) + " " + std::to_string(dim_) + "\n";
  char buf[64];
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    for (float v : vector(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out.push_back(' ');
      out.append(buf, end);
    }
    out.push_back('\n');
  }
  detail::write_file_atomic(path, out);
}

std::optional<std::vector<double>> text_vector(const std::vector<std::string>& tokens,
                                               const EmbeddingTable& table) {
  if (tokens.empty()) throw InputError("text vector needs at least one token");
  std::vector<const float*> found;
  found.reserve(tokens.size());
  for (const auto& token : tokens)
    if (const float* v = table.find(token)) found.push_back(v);
  if (found.empty()) return std::nullopt;
  // Fixed summation order makes the mean independent of token order.
  std::sort(found.begin(), found.end());
  std::vector<double> mean(table.dim(), 0.0);
  for (const float* v : found)
    for (std::size_t d = 0; d < table.dim(); ++d) mean[d] += static_cast<double>(v[d]);
  const auto n = static_cast<double>(found.size());
  for (auto& x : mean) x /= n;
  return mean;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw InputError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                     std::to_string(v.size()));
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw InputError("cosine of a zero-norm vector");
  return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

}  // namespace peerlex
