#include <gtest/gtest.h>

#include <cstring>

#include "peerlex/embeddings.hpp"
#include "peerlex/errors.hpp"
#include "test_support.hpp"

using namespace peerlex;
using testing_support::TempDir;

namespace {

EmbeddingTable three_words() {
  EmbeddingTable t(4);
  const float a[] = {0.1f, -2.5f, 3.0e-8f, 1.0f / 3.0f};
  const float b[] = {-0.0f, 1e30f, -7.25f, 0.2f};
  const float c[] = {5.0f, 6.0f, 7.0f, 8.0f};
  t.add("alpha", a);
  t.add("beta", b);
  t.add("gamma", c);
  return t;
}

bool bit_equal(std::span<const float> x, std::span<const float> y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size_bytes()) == 0;
}

}  // namespace

TEST(Embeddings, BinaryRoundTripIsBitExact) {
  TempDir dir;
  const auto t = three_words();
  t.write_binary(dir / "e.bin");
  const auto back = EmbeddingTable::load(dir / "e.bin", EmbeddingFormat::binary);
  ASSERT_EQ(back.size(), 3u);
  ASSERT_EQ(back.dim(), 4u);
  EXPECT_EQ(back.words(), t.words());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(bit_equal(back.vector(i), t.vector(i))) << i;
}

TEST(Embeddings, TextAndBinaryAgree) {
  TempDir dir;
  const auto t = three_words();
  t.write_binary(dir / "e.bin");
  t.write_text(dir / "e.txt");
  const auto bin = EmbeddingTable::load(dir / "e.bin", EmbeddingFormat::binary);
  const auto txt = EmbeddingTable::load(dir / "e.txt", EmbeddingFormat::text);
  ASSERT_EQ(bin.words(), txt.words());
  for (std::size_t i = 0; i < bin.size(); ++i) EXPECT_TRUE(bit_equal(bin.vector(i), txt.vector(i)));
}

TEST(Embeddings, FixtureExportsAgree) {
  const auto bin = EmbeddingTable::load(testing_support::fixture("embeddings.bin"), EmbeddingFormat::binary);
  const auto txt = EmbeddingTable::load(testing_support::fixture("embeddings.txt"), EmbeddingFormat::text);
  ASSERT_EQ(bin.size(), txt.size());
  ASSERT_EQ(bin.words(), txt.words());
  for (std::size_t i = 0; i < bin.size(); ++i) ASSERT_TRUE(bit_equal(bin.vector(i), txt.vector(i))) << bin.words()[i];
}

TEST(Embeddings, MaxWordsAndDuplicates) {
  TempDir dir;
  testing_support::write_file(dir / "e.txt", "3 2\nx 1 0\ny 0 1\nx 5 5\n");
  const auto all = EmbeddingTable::load(dir / "e.txt", EmbeddingFormat::text);
  EXPECT_EQ(all.size(), 2u);
  EXPECT_EQ(all.duplicates_skipped(), 1u);
  EXPECT_EQ(all.find("x")[0], 1.0f);
  const auto first = EmbeddingTable::load(dir / "e.txt", EmbeddingFormat::text, 1);
  EXPECT_EQ(first.size(), 1u);
  EXPECT_EQ(first.find("y"), nullptr);
}

TEST(Embeddings, MalformedFilesThrow) {
  TempDir dir;
  testing_support::write_file(dir / "short.txt", "2 3\nx 1 2 3\ny 1 2\n");
  EXPECT_THROW(EmbeddingTable::load(dir / "short.txt", EmbeddingFormat::text), InputError);
  testing_support::write_file(dir / "hdr.txt", "two 3\n");
  EXPECT_THROW(EmbeddingTable::load(dir / "hdr.txt", EmbeddingFormat::text), InputError);
  testing_support::write_file(dir / "trunc.bin", std::string("2 4\nab \x01\x02", 10));
  EXPECT_THROW(EmbeddingTable::load(dir / "trunc.bin", EmbeddingFormat::binary), InputError);
  EXPECT_THROW(EmbeddingTable::load(dir / "absent.bin", EmbeddingFormat::binary), InputError);
  EXPECT_THROW(parse_embedding_format("glove"), InputError);
}

TEST(TextVector, MeanOfKnownTokens) {
  const auto t = three_words();
  const auto v = text_vector({"gamma", "unknown", "gamma", "alpha"}, t);
  ASSERT_TRUE(v);
  EXPECT_DOUBLE_EQ((*v)[0], (5.0 + 5.0 + static_cast<double>(0.1f)) / 3.0);
  EXPECT_FALSE(text_vector({"nope"}, t));
  EXPECT_THROW(text_vector({}, t), InputError);
}

TEST(TextVector, PermutationInvariant) {
  const auto t = three_words();
  const auto a = text_vector({"alpha", "beta", "gamma"}, t);
  const auto b = text_vector({"gamma", "alpha", "beta"}, t);
  EXPECT_EQ(*a, *b);
}

TEST(Cosine, ScaleInvariantAndValidated) {
  const std::vector<double> u{1, 2, 3}, v{-1, 0.5, 2};
  const std::vector<double> su{3, 6, 9}, sv{-0.5, 0.25, 1};
  EXPECT_NEAR(cosine(u, v), cosine(su, sv), 1e-15);
  EXPECT_NEAR(cosine(u, u), 1.0, 1e-15);
  EXPECT_THROW(cosine(u, std::vector<double>{1, 2}), InputError);
  EXPECT_THROW(cosine(u, std::vector<double>{0, 0, 0}), InputError);
}
