#pragma once

#include "geocell/corpus.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace geocell
{
using TokenIndex = int32_t;

inline constexpr TokenIndex kPadIndex = 0;
inline constexpr TokenIndex kUnknownIndex = 1;

class Vocabulary
{
public:
  Vocabulary();

  // Returns the existing index or appends the token.
  TokenIndex Add(std::string const & token);
  // kUnknownIndex for tokens not in the vocabulary.
  TokenIndex Lookup(std::string const & token) const;
  std::string const & Token(TokenIndex index) const;
  size_t size() const { return m_tokens.size(); }
  std::vector<std::string> const & tokens() const { return m_tokens; }

  friend bool operator==(Vocabulary const & a, Vocabulary const & b) { return a.m_tokens == b.m_tokens; }

private:
  std::vector<std::string> m_tokens;
  std::unordered_map<std::string, TokenIndex> m_index;
};

// Context tokens seen at least min_count times, most frequent first, ties in
// byte order.
Vocabulary BuildVocabulary(std::span<TrainingExample const> examples, size_t min_count = 1);

struct FeatureConfig
{
  size_t len_a = 400;  // context tokens
  size_t len_b = 100;  // toponym mention tokens
  size_t len_c = 10;   // target surface tokens

  friend bool operator==(FeatureConfig const &, FeatureConfig const &) = default;
};

// The three input channels, each exactly its configured length. The position
// lists record where target / toponym tokens landed so the ablation
// operators can work on the bundle alone.
struct FeatureBundle
{
  std::vector<TokenIndex> channel_a;
  std::vector<TokenIndex> channel_b;
  std::vector<TokenIndex> channel_c;

  std::vector<size_t> target_in_a;
  std::vector<size_t> target_in_b;
  std::vector<size_t> toponyms_in_a;

  friend bool operator==(FeatureBundle const &, FeatureBundle const &) = default;
};

FeatureBundle ExtractFeatures(TrainingExample const & example, Vocabulary const & vocab,
                              FeatureConfig const & config);

// Pads channel c and the target's tokens in channels a and b.
FeatureBundle MaskTarget(FeatureBundle bundle);
// Pads channels b and c and every toponym token in channel a.
FeatureBundle MaskAllToponyms(FeatureBundle bundle);

enum class Ablation
{
  None,
  Target,
  AllToponyms,
};

FeatureBundle Ablate(FeatureBundle bundle, Ablation mode);

// V x D, row 0 is the padding vector and always zero.
using EmbeddingTable = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kEmbeddingInitRange = 0.05;

EmbeddingTable RandomEmbeddings(size_t vocab_size, size_t dim, uint64_t seed);

// Rows for tokens present in the file are copied from it, the rest are
// uniform in [-0.05, 0.05]. Lines are `token v1 ... vD`; a leading
// "<count> <dim>" header line is skipped.
EmbeddingTable LoadEmbeddings(std::string const & path, Vocabulary const & vocab, size_t dim,
                              uint64_t seed);
}  // namespace geocell
