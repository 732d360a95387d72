#include "geocell/training.hpp"

#include "geocell/error.hpp"

#include <cmath>

namespace geocell
{
std::vector<size_t> Permutation(size_t n, std::mt19937_64 & rng)
{
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i)
    order[i] = i;
  for (size_t i = n; i > 1; --i)
  {
    size_t const j = static_cast<size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

Split SplitExamples(std::span<TrainingExample const> examples, double fraction, uint64_t seed)
{
  if (!(fraction > 0 && fraction <= 1))
    throw InvalidArgument("split fraction must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  auto const order = Permutation(examples.size(), rng);
  auto const nTrain = static_cast<size_t>(std::llround(fraction * static_cast<double>(examples.size())));
  Split split;
  for (size_t i = 0; i < order.size(); ++i)
    (i < nTrain ? split.train : split.dev).push_back(examples[order[i]]);
  return split;
}

std::vector<LabeledBundle> MakeLabeled(std::span<TrainingExample const> examples, Vocabulary const & vocab,
                                       ModelConfig const & config, Ablation ablation)
{
  std::vector<LabeledBundle> out;
  out.reserve(examples.size());
  for (auto const & ex : examples)
  {
    out.push_back({Ablate(ExtractFeatures(ex, vocab, config.features), ablation),
                   GoldClasses(ex.gold, config.levels.levels)});
  }
  return out;
}

TrainedModel Train(std::span<TrainingExample const> examples, ModelConfig const & config,
                   TrainOptions const & opts, std::function<void(StepLog const &)> const & on_log)
{
  config.Validate();
  TrainedModel model;
  model.vocab = BuildVocabulary(examples, opts.min_count);
  EmbeddingTable const embeddings =
      opts.embeddings_path.empty()
          ? RandomEmbeddings(model.vocab.size(), config.embedding_dim, config.seed)
          : LoadEmbeddings(opts.embeddings_path, model.vocab, config.embedding_dim, config.seed);
  model.params = InitParams(config, embeddings);
  if (opts.steps == 0)
    return model;
  if (examples.empty())
    throw InvalidArgument("no training examples");

  auto const labeled = MakeLabeled(examples, model.vocab, config);
  // Batch order uses its own stream so it does not depend on how many
  // numbers initialisation consumed.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<size_t> order = Permutation(labeled.size(), rng);
  size_t cursor = 0;
  std::vector<LabeledBundle> batch;
  size_t const batchSize = std::min(config.batch_size, labeled.size());

  for (size_t s = 0; s < opts.steps; ++s)
  {
    batch.clear();
    while (batch.size() < batchSize)
    {
      if (cursor == order.size())
      {
        order = Permutation(labeled.size(), rng);
        cursor = 0;
      }
      batch.push_back(labeled[order[cursor++]]);
    }
    StepResult const r = TrainStep(model.params, batch);
    uint64_t const step = model.params.step;
    if (opts.log_every > 0 && (step % opts.log_every == 0 || s + 1 == opts.steps))
    {
      StepLog entry{step, r.loss.total, r.loss.per_head, r.learning_rate};
      if (on_log)
        on_log(entry);
      model.log.push_back(std::move(entry));
    }
    if (opts.checkpoint_every > 0 && step % opts.checkpoint_every == 0 && !opts.checkpoint_prefix.empty())
      SaveParams(model.params, model.vocab, opts.checkpoint_prefix + ".step" + std::to_string(step));
  }
  return model;
}

double MeanLoss(ModelParams const & params, std::span<LabeledBundle const> examples)
{
  if (examples.empty())
    throw InvalidArgument("no examples");
  double total = 0;
  for (auto const & ex : examples)
    total += LossFromClasses(Forward(params, ex.features), ex.gold);
  return total / static_cast<double>(examples.size());
}
}  // namespace geocell
