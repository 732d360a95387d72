#pragma once

// Shared helpers for the model and acceptance tests.

#include "geocell/model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace geocell::testing
{
// A bundle of random non-padding tokens filling every channel.
inline FeatureBundle RandomBundle(ModelConfig const & config, size_t vocab_size, std::mt19937_64 & rng)
{
  auto fill = [&](size_t n) {
    std::vector<TokenIndex> v(n);
    for (auto & t : v)
      t = static_cast<TokenIndex>(1 + rng() % (vocab_size - 1));
    return v;
  };
  FeatureBundle b;
  b.channel_a = fill(config.features.len_a);
  b.channel_b = fill(config.features.len_b);
  b.channel_c = fill(config.features.len_c);
  return b;
}

inline void RandomizeValues(ModelParams & params, double range, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(-range, range);
  for (auto & v : params.values)
    v = u(rng);
  // Row 0 is the padding vector.
  for (size_t d = 0; d < params.layout.embedding.cols; ++d)
    params.values[params.layout.embedding.offset + d] = 0.0;
}

inline std::vector<double> Normalize(std::vector<double> v)
{
  double sum = 0;
  for (double x : v)
    sum += x;
  for (double & x : v)
    x /= sum;
  return v;
}

// Random strictly positive distributions over a 4-ary hierarchy whose
// finest level has `fine_size` classes.
inline std::vector<std::vector<double>> RandomHierarchy(std::vector<int> const & levels, size_t fine_size,
                                                        std::mt19937_64 & rng, double sharpness = 1.0)
{
  std::exponential_distribution<double> e(1.0);
  std::vector<std::vector<double>> probs;
  for (int l : levels)
  {
    size_t const n = fine_size >> (2 * (levels.back() - l));
    std::vector<double> p(n);
    for (auto & x : p)
      x = std::pow(e(rng), sharpness);
    probs.push_back(Normalize(std::move(p)));
  }
  return probs;
}
// Distributions over levels {5, 6, 7} where the per-level argmaxes and the
// combined argmax disagree:
//   level 5: class 0 = 0.40, class 1 = 0.35
//   level 6: classes 0-3 = 0.05 each, class 5 = 0.60
//   level 7: class 0 = 0.45, classes 20-23 = 0.10 each
// Combined: class 0 scores 0.4 * 0.05 * 0.45 = 0.009, class 20 scores
// 0.35 * 0.6 * 0.1 = 0.021 and wins; its level-5 parent is class 1.
inline LevelDistributions DisagreeingFixture()
{
  auto spread = [](size_t n, std::vector<std::pair<size_t, double>> const & fixed) {
    double used = 0;
    for (auto const & [i, p] : fixed)
      used += p;
    std::vector<double> v(n, (1.0 - used) / static_cast<double>(n - fixed.size()));
    for (auto const & [i, p] : fixed)
      v[i] = p;
    return v;
  };
  LevelDistributions d;
  d.levels = {5, 6, 7};
  d.probs.push_back(spread(NumCells(5), {{0, 0.40}, {1, 0.35}}));
  d.probs.push_back(spread(NumCells(6), {{0, 0.05}, {1, 0.05}, {2, 0.05}, {3, 0.05}, {5, 0.60}}));
  d.probs.push_back(spread(NumCells(7), {{0, 0.45}, {20, 0.10}, {21, 0.10}, {22, 0.10}, {23, 0.10}}));
  return d;
}

// A model whose output ignores its input and equals `d`: zero weights and
// head biases set to the log-probabilities.
inline ModelParams ConstantModel(LevelDistributions const & d, size_t vocab_size)
{
  ModelConfig c;
  c.features = {4, 3, 3};
  c.embedding_dim = 2;
  c.filters = 1;
  c.hidden = 1;
  c.levels.levels = d.levels;
  ModelParams p = ZeroParams(c, vocab_size, CellHeadSizes(c.levels));
  for (size_t h = 0; h < d.probs.size(); ++h)
    for (size_t k = 0; k < d.probs[h].size(); ++k)
      p.values[p.layout.heads[h].bias.offset + k] = std::log(d.probs[h][k]);
  return p;
}
}  // namespace geocell::testing
