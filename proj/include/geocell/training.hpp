#pragma once

#include "geocell/corpus.hpp"
#include "geocell/features.hpp"
#include "geocell/model.hpp"

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace geocell
{
struct TrainOptions
{
  size_t steps = 1000;
  size_t log_every = 10;
  // Write "<checkpoint_prefix>.step<N>" every this many steps; 0 disables.
  size_t checkpoint_every = 0;
  std::string checkpoint_prefix;
  // Optional pretrained vectors; random initialisation otherwise.
  std::string embeddings_path;
  size_t min_count = 1;
};

struct StepLog
{
  uint64_t step = 0;
  double loss = 0;
  std::vector<double> level_losses;
  double learning_rate = 0;
};

struct TrainedModel
{
  ModelParams params;
  Vocabulary vocab;
  std::vector<StepLog> log;
};

// Portable Fisher-Yates permutation of [0, n).
std::vector<size_t> Permutation(size_t n, std::mt19937_64 & rng);

struct Split
{
  std::vector<TrainingExample> train;
  std::vector<TrainingExample> dev;
};

// Shuffles with `seed` and puts round(fraction * n) examples in train.
Split SplitExamples(std::span<TrainingExample const> examples, double fraction, uint64_t seed);

std::vector<LabeledBundle> MakeLabeled(std::span<TrainingExample const> examples, Vocabulary const & vocab,
                                       ModelConfig const & config, Ablation ablation = Ablation::None);

// Builds the vocabulary and embeddings from `examples`, initialises with
// config.seed and runs opts.steps Adam steps over reshuffled epochs.
TrainedModel Train(std::span<TrainingExample const> examples, ModelConfig const & config,
                   TrainOptions const & opts, std::function<void(StepLog const &)> const & on_log = {});

// Mean multi-level loss over the examples without updating anything.
double MeanLoss(ModelParams const & params, std::span<LabeledBundle const> examples);
}  // namespace geocell
