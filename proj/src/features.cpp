#include "geocell/features.hpp"

#include "geocell/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace geocell
{
namespace
{
// Uniform in [-range, range) from the top 53 bits of the generator.
double UniformSymmetric(std::mt19937_64 & rng, double range)
{
  double const unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return (2 * unit - 1) * range;
}

void PadAt(std::vector<TokenIndex> & channel, std::vector<size_t> const & positions)
{
  for (size_t p : positions)
  {
    if (p < channel.size())
      channel[p] = kPadIndex;
  }
}
}  // namespace

Vocabulary::Vocabulary()
{
  Add("<pad>");
  Add("<unk>");
}

TokenIndex Vocabulary::Add(std::string const & token)
{
  auto const [it, inserted] = m_index.emplace(token, static_cast<TokenIndex>(m_tokens.size()));
  if (inserted)
    m_tokens.push_back(token);
  return it->second;
}

TokenIndex Vocabulary::Lookup(std::string const & token) const
{
  auto const it = m_index.find(token);
  return it == m_index.end() ? kUnknownIndex : it->second;
}

std::string const & Vocabulary::Token(TokenIndex index) const
{
  if (index < 0 || static_cast<size_t>(index) >= m_tokens.size())
    throw InvalidArgument("token index " + std::to_string(index) + " outside vocabulary");
  return m_tokens[static_cast<size_t>(index)];
}

Vocabulary BuildVocabulary(std::span<TrainingExample const> examples, size_t min_count)
{
  std::map<std::string, size_t> counts;
  for (auto const & ex : examples)
  {
    for (auto const & tok : ex.context_tokens)
      ++counts[tok];
  }
  std::vector<std::pair<std::string, size_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](auto const & a, auto const & b) { return a.second > b.second; });
  Vocabulary vocab;
  for (auto const & [tok, n] : sorted)
  {
    if (n >= min_count)
      vocab.Add(tok);
  }
  return vocab;
}

FeatureBundle ExtractFeatures(TrainingExample const & ex, Vocabulary const & vocab,
                              FeatureConfig const & config)
{
  FeatureBundle out;
  out.channel_a.assign(config.len_a, kPadIndex);
  out.channel_b.assign(config.len_b, kPadIndex);
  out.channel_c.assign(config.len_c, kPadIndex);

  auto const & toks = ex.context_tokens;
  for (size_t i = 0; i < std::min(toks.size(), config.len_a); ++i)
    out.channel_a[i] = vocab.Lookup(toks[i]);

  std::vector<TokenSpan> spans = ex.toponym_spans;
  std::sort(spans.begin(), spans.end());
  size_t b = 0;
  bool targetSeen = false;
  for (auto const & s : spans)
  {
    bool const isTarget = !targetSeen && s == ex.target_span;
    targetSeen = targetSeen || isTarget;
    for (size_t i = s.start; i < s.end && i < toks.size(); ++i)
    {
      if (i < config.len_a)
      {
        out.toponyms_in_a.push_back(i);
        if (isTarget)
          out.target_in_a.push_back(i);
      }
      if (b < config.len_b)
      {
        if (isTarget)
          out.target_in_b.push_back(b);
        out.channel_b[b++] = vocab.Lookup(toks[i]);
      }
    }
  }
  std::sort(out.toponyms_in_a.begin(), out.toponyms_in_a.end());
  out.toponyms_in_a.erase(std::unique(out.toponyms_in_a.begin(), out.toponyms_in_a.end()),
                          out.toponyms_in_a.end());

  size_t c = 0;
  for (size_t i = ex.target_span.start; i < ex.target_span.end && c < config.len_c; ++i)
    out.channel_c[c++] = vocab.Lookup(toks.at(i));
  return out;
}

FeatureBundle MaskTarget(FeatureBundle bundle)
{
  std::fill(bundle.channel_c.begin(), bundle.channel_c.end(), kPadIndex);
  PadAt(bundle.channel_a, bundle.target_in_a);
  PadAt(bundle.channel_b, bundle.target_in_b);
  return bundle;
}

FeatureBundle MaskAllToponyms(FeatureBundle bundle)
{
  bundle = MaskTarget(std::move(bundle));
  std::fill(bundle.channel_b.begin(), bundle.channel_b.end(), kPadIndex);
  PadAt(bundle.channel_a, bundle.toponyms_in_a);
  return bundle;
}

FeatureBundle Ablate(FeatureBundle bundle, Ablation mode)
{
  switch (mode)
  {
  case Ablation::None: return bundle;
  case Ablation::Target: return MaskTarget(std::move(bundle));
  case Ablation::AllToponyms: return MaskAllToponyms(std::move(bundle));
  }
  return bundle;
}

EmbeddingTable RandomEmbeddings(size_t vocab_size, size_t dim, uint64_t seed)
{
  std::mt19937_64 rng(seed);
  EmbeddingTable table(static_cast<Eigen::Index>(vocab_size), static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < table.rows(); ++r)
  {
    for (Eigen::Index c = 0; c < table.cols(); ++c)
      table(r, c) = UniformSymmetric(rng, kEmbeddingInitRange);
  }
  if (table.rows() > 0)
    table.row(kPadIndex).setZero();
  return table;
}

EmbeddingTable LoadEmbeddings(std::string const & path, Vocabulary const & vocab, size_t dim,
                              uint64_t seed)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open embeddings '" + path + "'");
  EmbeddingTable table = RandomEmbeddings(vocab.size(), dim, seed);

  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token))
      continue;
    std::vector<double> values;
    std::string field;
    while (fields >> field)
    {
      char * end = nullptr;
      double const v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0' || !std::isfinite(v))
        throw ParseError(AtLine(path, lineNo) + "bad embedding value '" + field + "'");
      values.push_back(v);
    }
    if (lineNo == 1 && values.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos)
      continue;
    if (values.size() != dim)
      throw FormatError(AtLine(path, lineNo) + "embedding has " + std::to_string(values.size()) +
                        " dimensions, expected " + std::to_string(dim));
    TokenIndex const idx = vocab.Lookup(token);
    if (idx == kUnknownIndex && token != "<unk>")
      continue;
    if (idx == kPadIndex)
      continue;
    for (size_t d = 0; d < dim; ++d)
      table(idx, static_cast<Eigen::Index>(d)) = values[d];
  }
  return table;
}
}  // namespace geocell
