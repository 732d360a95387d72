#pragma once

// Multi-level convolutional cell classifier.
//
// Each (channel, n-gram width) pair runs embed -> Conv1D (valid) -> ReLU ->
// max-pool over positions -> dense -> ReLU. The seven projections are
// concatenated and fed to one softmax head per cell level. Training
// minimises the mean of the per-level cross-entropies with Adam.

#include "geocell/cellgrid.hpp"
#include "geocell/features.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace geocell
{
struct LevelConfig
{
  std::vector<int> levels{5, 6, 7};

  // Strictly increasing, each within [2, 12].
  void Validate() const;
  int finest() const { return levels.back(); }
  friend bool operator==(LevelConfig const &, LevelConfig const &) = default;
};

std::string LevelsToString(std::vector<int> const & levels);
std::vector<int> ParseLevels(std::string const & text);

enum class Channel : int
{
  Context = 0,
  Toponyms = 1,
  Target = 2,
};

struct ProjectionSpec
{
  Channel channel;
  int width;
  friend bool operator==(ProjectionSpec const &, ProjectionSpec const &) = default;
};

struct ModelConfig
{
  FeatureConfig features;
  size_t embedding_dim = 50;
  size_t filters = 64;
  // Width of each per-projection dense layer.
  size_t hidden = 32;
  std::vector<ProjectionSpec> projections{{Channel::Context, 1},  {Channel::Context, 2},
                                          {Channel::Toponyms, 1}, {Channel::Toponyms, 2},
                                          {Channel::Target, 1},   {Channel::Target, 2},
                                          {Channel::Target, 3}};
  LevelConfig levels;

  double learning_rate = 1e-4;
  size_t batch_size = 512;
  size_t warmup_steps = 1000;
  double decay_rate = 0.98;
  size_t decay_steps = 1000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool freeze_embeddings = false;
  uint64_t seed = 0;

  void Validate() const;
  size_t ChannelLength(Channel c) const;
  size_t RepresentationSize() const { return projections.size() * hidden; }
  friend bool operator==(ModelConfig const &, ModelConfig const &) = default;
};

// Offsets of every tensor inside the flat parameter vector. Matrices are
// row-major.
struct ParamLayout
{
  struct Block
  {
    size_t offset = 0;
    size_t rows = 0;
    size_t cols = 0;
    size_t size() const { return rows * cols; }
  };
  struct Projection
  {
    Block conv;       // (width * D) x F
    Block conv_bias;  // 1 x F
    Block dense;      // F x H
    Block dense_bias; // 1 x H
  };
  struct Head
  {
    Block weights;  // (projections * H) x C
    Block bias;     // 1 x C
  };

  Block embedding;  // V x D
  std::vector<Projection> projections;
  std::vector<Head> heads;
  size_t total = 0;

  static ParamLayout Make(ModelConfig const & config, size_t vocab_size,
                          std::span<size_t const> head_sizes);
};

struct ModelParams
{
  ModelConfig config;
  size_t vocab_size = 0;
  // Number of classes per head; 6 * 4^level for cell heads.
  std::vector<size_t> head_sizes;
  ParamLayout layout;

  std::vector<double> values;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  uint64_t step = 0;

  friend bool operator==(ModelParams const & a, ModelParams const & b)
  {
    return a.config == b.config && a.vocab_size == b.vocab_size && a.head_sizes == b.head_sizes &&
           a.values == b.values && a.adam_m == b.adam_m && a.adam_v == b.adam_v &&
           a.step == b.step;
  }
};

// All-zero parameters with the given head sizes.
ModelParams ZeroParams(ModelConfig const & config, size_t vocab_size,
                       std::vector<size_t> head_sizes);
// Glorot-uniform weights, zero biases and the given embedding table.
ModelParams InitParams(ModelConfig const & config, EmbeddingTable const & embeddings,
                       std::vector<size_t> head_sizes, uint64_t seed);
// Cell heads of size 6 * 4^level for each configured level.
ModelParams InitParams(ModelConfig const & config, EmbeddingTable const & embeddings);

std::vector<size_t> CellHeadSizes(LevelConfig const & levels);

struct LevelDistributions
{
  std::vector<int> levels;
  std::vector<std::vector<double>> probs;
};

LevelDistributions Forward(ModelParams const & params, FeatureBundle const & bundle);

// Class index of the gold point's cell at every level.
std::vector<uint32_t> GoldClasses(LatLng gold, std::span<int const> levels);

inline constexpr double kProbabilityFloor = 1e-30;

// Mean over heads of -log p(gold class), with p clamped at 1e-30.
double LossFromClasses(LevelDistributions const & dists, std::span<uint32_t const> gold);
double LossMultilevel(LevelDistributions const & dists, LatLng gold);

struct LabeledBundle
{
  FeatureBundle features;
  std::vector<uint32_t> gold;  // one class index per head
};

struct LossBreakdown
{
  double total = 0;
  std::vector<double> per_head;
};

// Mean loss over the batch and its gradient with respect to params.values.
LossBreakdown LossAndGradient(ModelParams const & params, std::span<LabeledBundle const> batch,
                              std::vector<double> & gradient);

double LearningRate(ModelConfig const & config, uint64_t step);

struct StepResult
{
  LossBreakdown loss;
  double learning_rate = 0;
};

// One Adam update on the mean batch loss. Throws NumericError on a
// non-finite gradient, leaving params untouched.
StepResult TrainStep(ModelParams & params, std::span<LabeledBundle const> batch);

inline constexpr size_t kDefaultCombineTopK = 4096;

struct ScoredClass
{
  uint64_t index = 0;
  double score = 0;
};

struct CombinedClasses
{
  // Scores of every finest-level class that was evaluated, best first.
  std::vector<ScoredClass> scores;
  uint64_t best = 0;
  double best_score = 0;
};

// s(f) = prod_l p_l(ancestor of f at level l), over finest-level class
// indices, where the ancestor index is f >> 2 * (finest - l). Evaluates at
// least the top_k finest classes by probability and keeps going until no
// unevaluated class can beat the best score, so the argmax is exact. Ties go
// to the smaller index.
CombinedClasses CombineClassScores(std::span<std::vector<double> const> probs,
                                   std::span<int const> levels,
                                   size_t top_k = kDefaultCombineTopK);

struct ScoredCell
{
  CellId cell;
  double score = 0;
};

struct CombinedScores
{
  std::vector<ScoredCell> scores;
  CellId best;
};

CombinedScores CombineLevels(LevelDistributions const & dists, size_t top_k = kDefaultCombineTopK);

struct InferenceMode
{
  // Empty for combined inference, otherwise the single level to use.
  std::optional<int> only_level;

  static InferenceMode Combined() { return {}; }
  static InferenceMode Only(int level) { return {level}; }
  // "combined" or "only-<level>".
  static InferenceMode Parse(std::string const & text);
  std::string ToString() const;
};

struct Prediction
{
  LevelDistributions distributions;
  std::vector<ScoredCell> combined_scores;
  // Per-level argmax cells, in LevelConfig order.
  std::vector<CellId> level_best;
  CellId best_cell;
  LatLng point;
};

Prediction Predict(ModelParams const & params, FeatureBundle const & bundle, InferenceMode mode,
                   size_t top_k = kDefaultCombineTopK);
// Same as Predict, from already computed distributions.
Prediction PredictFromDistributions(LevelDistributions dists, InferenceMode mode,
                                    size_t top_k = kDefaultCombineTopK);

// Model file: parameters, Adam state, configuration and vocabulary.
void SaveParams(ModelParams const & params, Vocabulary const & vocab, std::string const & path);

struct LoadedModel
{
  ModelParams params;
  Vocabulary vocab;
};

// Throws FormatError on a bad/truncated file or when expected_levels is given
// and differs from the stored levels.
LoadedModel LoadParams(std::string const & path,
                       std::optional<LevelConfig> const & expected_levels = std::nullopt);
}  // namespace geocell
