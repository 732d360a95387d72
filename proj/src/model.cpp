#include "geocell/model.hpp"

#include "geocell/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace geocell
{
namespace
{
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<RowMatrix const>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstVectorMap = Eigen::Map<Eigen::VectorXd const>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using Block = ParamLayout::Block;

ConstMatrixMap View(std::vector<double> const & v, Block const & b)
{
  return {v.data() + b.offset, static_cast<Eigen::Index>(b.rows), static_cast<Eigen::Index>(b.cols)};
}

MatrixMap View(std::vector<double> & v, Block const & b)
{
  return {v.data() + b.offset, static_cast<Eigen::Index>(b.rows), static_cast<Eigen::Index>(b.cols)};
}

ConstVectorMap VecView(std::vector<double> const & v, Block const & b)
{
  return {v.data() + b.offset, static_cast<Eigen::Index>(b.size())};
}

VectorMap VecView(std::vector<double> & v, Block const & b)
{
  return {v.data() + b.offset, static_cast<Eigen::Index>(b.size())};
}

std::vector<TokenIndex> const & ChannelOf(FeatureBundle const & bundle, Channel c)
{
  switch (c)
  {
  case Channel::Context: return bundle.channel_a;
  case Channel::Toponyms: return bundle.channel_b;
  case Channel::Target: return bundle.channel_c;
  }
  return bundle.channel_a;
}

struct ProjectionCache
{
  RowMatrix windows;                 // positions x (width * D)
  std::vector<Eigen::Index> argmax;  // per filter, -1 when the pooled value is clamped to 0
  Eigen::VectorXd pooled;            // F
  Eigen::VectorXd pre;               // H, before ReLU
};

struct EncoderCache
{
  std::vector<ProjectionCache> projections;
};

void CheckBundle(ModelConfig const & config, FeatureBundle const & bundle, size_t vocab_size)
{
  for (Channel c : {Channel::Context, Channel::Toponyms, Channel::Target})
  {
    auto const & ch = ChannelOf(bundle, c);
    if (ch.size() != config.ChannelLength(c))
      throw InvalidArgument("feature channel " + std::to_string(static_cast<int>(c)) + " has length " +
                            std::to_string(ch.size()) + ", model expects " +
                            std::to_string(config.ChannelLength(c)));
    for (TokenIndex idx : ch)
    {
      if (idx < 0 || static_cast<size_t>(idx) >= vocab_size)
        throw InvalidArgument("token index " + std::to_string(idx) + " outside vocabulary of " +
                              std::to_string(vocab_size));
    }
  }
}

// Writes the concatenated projection outputs into `rep`.
void Encode(ModelParams const & params, FeatureBundle const & bundle, Eigen::Ref<Eigen::VectorXd> rep,
            EncoderCache * cache)
{
  auto const & cfg = params.config;
  auto const & layout = params.layout;
  auto const D = static_cast<Eigen::Index>(cfg.embedding_dim);
  auto const H = static_cast<Eigen::Index>(cfg.hidden);
  ConstMatrixMap const embedding = View(params.values, layout.embedding);

  if (cache)
    cache->projections.resize(cfg.projections.size());

  for (size_t p = 0; p < cfg.projections.size(); ++p)
  {
    auto const & spec = cfg.projections[p];
    auto const & blocks = layout.projections[p];
    auto const & tokens = ChannelOf(bundle, spec.channel);
    auto const width = static_cast<Eigen::Index>(spec.width);
    auto const positions = static_cast<Eigen::Index>(tokens.size()) - width + 1;

    RowMatrix windows(positions, width * D);
    for (Eigen::Index t = 0; t < positions; ++t)
    {
      for (Eigen::Index k = 0; k < width; ++k)
        windows.block(t, k * D, 1, D) = embedding.row(tokens[static_cast<size_t>(t + k)]);
    }

    ConstMatrixMap const conv = View(params.values, blocks.conv);
    ConstVectorMap const convBias = VecView(params.values, blocks.conv_bias);
    RowMatrix z = windows * conv;
    z.rowwise() += convBias.transpose();

    auto const F = z.cols();
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(F);
    std::vector<Eigen::Index> argmax(static_cast<size_t>(F), -1);
    for (Eigen::Index f = 0; f < F; ++f)
    {
      Eigen::Index best = 0;
      for (Eigen::Index t = 1; t < positions; ++t)
      {
        if (z(t, f) > z(best, f))
          best = t;
      }
      if (z(best, f) > 0)
      {
        pooled[f] = z(best, f);
        argmax[static_cast<size_t>(f)] = best;
      }
    }

    ConstMatrixMap const dense = View(params.values, blocks.dense);
    ConstVectorMap const denseBias = VecView(params.values, blocks.dense_bias);
    Eigen::VectorXd pre = dense.transpose() * pooled + denseBias;
    rep.segment(static_cast<Eigen::Index>(p) * H, H) = pre.cwiseMax(0.0);

    if (cache)
    {
      auto & pc = cache->projections[p];
      pc.windows = std::move(windows);
      pc.argmax = std::move(argmax);
      pc.pooled = std::move(pooled);
      pc.pre = std::move(pre);
    }
  }
}

void EncodeBackward(ModelParams const & params, FeatureBundle const & bundle, EncoderCache const & cache,
                    Eigen::Ref<Eigen::VectorXd const> dRep, std::vector<double> & grad)
{
  auto const & cfg = params.config;
  auto const & layout = params.layout;
  auto const D = static_cast<Eigen::Index>(cfg.embedding_dim);
  auto const H = static_cast<Eigen::Index>(cfg.hidden);
  MatrixMap gEmbedding = View(grad, layout.embedding);

  for (size_t p = 0; p < cfg.projections.size(); ++p)
  {
    auto const & spec = cfg.projections[p];
    auto const & blocks = layout.projections[p];
    auto const & pc = cache.projections[p];
    auto const & tokens = ChannelOf(bundle, spec.channel);

    Eigen::VectorXd const dPre =
        dRep.segment(static_cast<Eigen::Index>(p) * H, H).cwiseProduct((pc.pre.array() > 0).cast<double>().matrix());

    MatrixMap gDense = View(grad, blocks.dense);
    VecView(grad, blocks.dense_bias) += dPre;
    gDense.noalias() += pc.pooled * dPre.transpose();

    ConstMatrixMap const dense = View(params.values, blocks.dense);
    Eigen::VectorXd const dPooled = dense * dPre;

    ConstMatrixMap const conv = View(params.values, blocks.conv);
    MatrixMap gConv = View(grad, blocks.conv);
    VectorMap gConvBias = VecView(grad, blocks.conv_bias);
    for (size_t f = 0; f < pc.argmax.size(); ++f)
    {
      Eigen::Index const t = pc.argmax[f];
      if (t < 0)
        continue;
      auto const fi = static_cast<Eigen::Index>(f);
      double const g = dPooled[fi];
      gConvBias[fi] += g;
      gConv.col(fi) += g * pc.windows.row(t).transpose();
      for (Eigen::Index k = 0; k < spec.width; ++k)
      {
        TokenIndex const tok = tokens[static_cast<size_t>(t + k)];
        gEmbedding.row(tok) += g * conv.block(k * D, fi, D, 1).transpose();
      }
    }
  }
}

void SoftmaxRows(RowMatrix & logits)
{
  for (Eigen::Index r = 0; r < logits.rows(); ++r)
  {
    auto row = logits.row(r);
    double const m = row.maxCoeff();
    row = (row.array() - m).exp();
    row /= row.sum();
  }
}

RowMatrix HeadProbabilities(ModelParams const & params, size_t head, RowMatrix const & reps)
{
  auto const & blocks = params.layout.heads[head];
  RowMatrix logits = reps * View(params.values, blocks.weights);
  logits.rowwise() += VecView(params.values, blocks.bias).transpose();
  SoftmaxRows(logits);
  return logits;
}

double UniformSymmetric(std::mt19937_64 & rng, double range)
{
  double const unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return (2 * unit - 1) * range;
}

void GlorotFill(std::vector<double> & values, Block const & b, std::mt19937_64 & rng)
{
  double const range = std::sqrt(6.0 / static_cast<double>(b.rows + b.cols));
  for (size_t i = 0; i < b.size(); ++i)
    values[b.offset + i] = UniformSymmetric(rng, range);
}

uint64_t ArgmaxIndex(std::vector<double> const & p)
{
  uint64_t best = 0;
  for (uint64_t i = 1; i < p.size(); ++i)
  {
    if (p[i] > p[best])
      best = i;
  }
  return best;
}
}  // namespace

void LevelConfig::Validate() const
{
  if (levels.empty())
    throw InvalidArgument("at least one level is required");
  for (size_t i = 0; i < levels.size(); ++i)
  {
    if (levels[i] < 2 || levels[i] > kMaxLevel)
      throw InvalidArgument("level " + std::to_string(levels[i]) + " outside [2, " +
                            std::to_string(kMaxLevel) + "]");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw InvalidArgument("levels must be strictly increasing: " + LevelsToString(levels));
  }
}

std::string LevelsToString(std::vector<int> const & levels)
{
  std::string out;
  for (int l : levels)
  {
    if (!out.empty())
      out.push_back(',');
    out += std::to_string(l);
  }
  return out;
}

std::vector<int> ParseLevels(std::string const & text)
{
  std::vector<int> levels;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ','))
  {
    try
    {
      size_t used = 0;
      levels.push_back(std::stoi(part, &used));
      if (used != part.size())
        throw std::invalid_argument(part);
    }
    catch (std::exception const &)
    {
      throw InvalidArgument("bad level list '" + text + "'");
    }
  }
  return levels;
}

size_t ModelConfig::ChannelLength(Channel c) const
{
  switch (c)
  {
  case Channel::Context: return features.len_a;
  case Channel::Toponyms: return features.len_b;
  case Channel::Target: return features.len_c;
  }
  return 0;
}

void ModelConfig::Validate() const
{
  if (embedding_dim == 0 || filters == 0 || hidden == 0 || batch_size == 0 || decay_steps == 0)
    throw InvalidArgument("model dimensions, batch size and decay steps must be positive");
  if (projections.empty())
    throw InvalidArgument("at least one projection is required");
  for (auto const & p : projections)
  {
    if (p.width <= 0 || static_cast<size_t>(p.width) > ChannelLength(p.channel))
      throw InvalidArgument("n-gram width " + std::to_string(p.width) + " exceeds channel length " +
                            std::to_string(ChannelLength(p.channel)));
  }
  if (!(learning_rate >= 0) || !(decay_rate > 0) || !(adam_epsilon > 0))
    throw InvalidArgument("learning rate, decay rate and epsilon must be positive");
  levels.Validate();
}

ParamLayout ParamLayout::Make(ModelConfig const & config, size_t vocab_size,
                              std::span<size_t const> head_sizes)
{
  ParamLayout layout;
  size_t offset = 0;
  auto take = [&offset](size_t rows, size_t cols) {
    Block b{offset, rows, cols};
    offset += rows * cols;
    return b;
  };
  size_t const D = config.embedding_dim, F = config.filters, H = config.hidden;
  layout.embedding = take(vocab_size, D);
  for (auto const & p : config.projections)
  {
    Projection proj;
    proj.conv = take(static_cast<size_t>(p.width) * D, F);
    proj.conv_bias = take(1, F);
    proj.dense = take(F, H);
    proj.dense_bias = take(1, H);
    layout.projections.push_back(proj);
  }
  for (size_t c : head_sizes)
  {
    Head head;
    head.weights = take(config.RepresentationSize(), c);
    head.bias = take(1, c);
    layout.heads.push_back(head);
  }
  layout.total = offset;
  return layout;
}

std::vector<size_t> CellHeadSizes(LevelConfig const & levels)
{
  std::vector<size_t> sizes;
  for (int l : levels.levels)
    sizes.push_back(static_cast<size_t>(NumCells(l)));
  return sizes;
}

ModelParams ZeroParams(ModelConfig const & config, size_t vocab_size, std::vector<size_t> head_sizes)
{
  if (vocab_size < 2)
    throw InvalidArgument("vocabulary must hold at least the padding and unknown tokens");
  if (head_sizes.empty() || std::find(head_sizes.begin(), head_sizes.end(), size_t{0}) != head_sizes.end())
    throw InvalidArgument("every head needs at least one class");
  ModelParams params;
  params.config = config;
  params.vocab_size = vocab_size;
  params.head_sizes = std::move(head_sizes);
  params.layout = ParamLayout::Make(config, vocab_size, params.head_sizes);
  params.values.assign(params.layout.total, 0.0);
  params.adam_m.assign(params.layout.total, 0.0);
  params.adam_v.assign(params.layout.total, 0.0);
  return params;
}

ModelParams InitParams(ModelConfig const & config, EmbeddingTable const & embeddings,
                       std::vector<size_t> head_sizes, uint64_t seed)
{
  if (static_cast<size_t>(embeddings.cols()) != config.embedding_dim)
    throw InvalidArgument("embedding table has dimension " + std::to_string(embeddings.cols()) +
                          ", config expects " + std::to_string(config.embedding_dim));
  ModelParams params = ZeroParams(config, static_cast<size_t>(embeddings.rows()), std::move(head_sizes));
  View(params.values, params.layout.embedding) = embeddings;
  View(params.values, params.layout.embedding).row(kPadIndex).setZero();

  std::mt19937_64 rng(seed);
  for (auto const & proj : params.layout.projections)
  {
    GlorotFill(params.values, proj.conv, rng);
    GlorotFill(params.values, proj.dense, rng);
  }
  for (auto const & head : params.layout.heads)
    GlorotFill(params.values, head.weights, rng);
  return params;
}

ModelParams InitParams(ModelConfig const & config, EmbeddingTable const & embeddings)
{
  config.Validate();
  return InitParams(config, embeddings, CellHeadSizes(config.levels), config.seed);
}

LevelDistributions Forward(ModelParams const & params, FeatureBundle const & bundle)
{
  CheckBundle(params.config, bundle, params.vocab_size);
  RowMatrix rep(1, static_cast<Eigen::Index>(params.config.RepresentationSize()));
  Encode(params, bundle, rep.row(0).transpose(), nullptr);

  LevelDistributions out;
  out.levels = params.config.levels.levels;
  for (size_t h = 0; h < params.head_sizes.size(); ++h)
  {
    RowMatrix const p = HeadProbabilities(params, h, rep);
    out.probs.emplace_back(p.data(), p.data() + p.size());
  }
  return out;
}

std::vector<uint32_t> GoldClasses(LatLng gold, std::span<int const> levels)
{
  std::vector<uint32_t> out;
  for (int l : levels)
    out.push_back(static_cast<uint32_t>(CellFromLatLng(gold, l).ClassIndex()));
  return out;
}

double LossFromClasses(LevelDistributions const & dists, std::span<uint32_t const> gold)
{
  if (gold.size() != dists.probs.size() || dists.probs.empty())
    throw InvalidArgument("need one gold class per level distribution");
  double total = 0;
  for (size_t l = 0; l < gold.size(); ++l)
  {
    auto const & p = dists.probs[l];
    if (gold[l] >= p.size())
      throw InvalidArgument("gold class outside distribution");
    total += -std::log(std::max(p[gold[l]], kProbabilityFloor));
  }
  return total / static_cast<double>(gold.size());
}

double LossMultilevel(LevelDistributions const & dists, LatLng gold)
{
  auto const classes = GoldClasses(gold, dists.levels);
  return LossFromClasses(dists, classes);
}

LossBreakdown LossAndGradient(ModelParams const & params, std::span<LabeledBundle const> batch,
                              std::vector<double> & gradient)
{
  if (batch.empty())
    throw InvalidArgument("empty batch");
  gradient.assign(params.values.size(), 0.0);
  auto const B = static_cast<Eigen::Index>(batch.size());
  auto const R = static_cast<Eigen::Index>(params.config.RepresentationSize());
  size_t const heads = params.head_sizes.size();

  RowMatrix reps(B, R);
  std::vector<EncoderCache> caches(batch.size());
  for (Eigen::Index b = 0; b < B; ++b)
  {
    auto const & item = batch[static_cast<size_t>(b)];
    CheckBundle(params.config, item.features, params.vocab_size);
    if (item.gold.size() != heads)
      throw InvalidArgument("example has " + std::to_string(item.gold.size()) + " gold labels, model has " +
                            std::to_string(heads) + " heads");
    Encode(params, item.features, reps.row(b).transpose(), &caches[static_cast<size_t>(b)]);
  }

  LossBreakdown loss;
  loss.per_head.assign(heads, 0.0);
  RowMatrix dReps = RowMatrix::Zero(B, R);
  double const scale = 1.0 / (static_cast<double>(B) * static_cast<double>(heads));
  for (size_t h = 0; h < heads; ++h)
  {
    RowMatrix dLogits = HeadProbabilities(params, h, reps);
    for (Eigen::Index b = 0; b < B; ++b)
    {
      uint32_t const g = batch[static_cast<size_t>(b)].gold[h];
      if (g >= params.head_sizes[h])
        throw InvalidArgument("gold class outside head");
      loss.per_head[h] += -std::log(std::max(dLogits(b, g), kProbabilityFloor));
      dLogits(b, g) -= 1.0;
    }
    loss.per_head[h] /= static_cast<double>(B);
    loss.total += loss.per_head[h];
    dLogits *= scale;

    auto const & blocks = params.layout.heads[h];
    View(gradient, blocks.weights).noalias() += reps.transpose() * dLogits;
    VecView(gradient, blocks.bias) += dLogits.colwise().sum().transpose();
    dReps.noalias() += dLogits * View(params.values, blocks.weights).transpose();
  }
  loss.total /= static_cast<double>(heads);

  for (Eigen::Index b = 0; b < B; ++b)
  {
    EncodeBackward(params, batch[static_cast<size_t>(b)].features, caches[static_cast<size_t>(b)],
                   dReps.row(b).transpose(), gradient);
  }
  // The padding row is a constant.
  View(gradient, params.layout.embedding).row(kPadIndex).setZero();
  return loss;
}

double LearningRate(ModelConfig const & config, uint64_t step)
{
  if (step < config.warmup_steps)
    return config.learning_rate * static_cast<double>(step + 1) / static_cast<double>(config.warmup_steps);
  double const decayed = static_cast<double>(step - config.warmup_steps) / static_cast<double>(config.decay_steps);
  return config.learning_rate * std::pow(config.decay_rate, decayed);
}

StepResult TrainStep(ModelParams & params, std::span<LabeledBundle const> batch)
{
  std::vector<double> grad;
  StepResult result;
  result.loss = LossAndGradient(params, batch, grad);
  for (size_t i = 0; i < grad.size(); ++i)
  {
    if (!std::isfinite(grad[i]))
      throw NumericError("non-finite gradient at parameter " + std::to_string(i) + " on step " +
                         std::to_string(params.step) + " (loss " + std::to_string(result.loss.total) + ")");
  }

  auto const & cfg = params.config;
  result.learning_rate = LearningRate(cfg, params.step);
  ++params.step;
  double const t = static_cast<double>(params.step);
  double const correction1 = 1 - std::pow(cfg.adam_beta1, t);
  double const correction2 = 1 - std::pow(cfg.adam_beta2, t);

  auto const & emb = params.layout.embedding;
  size_t const begin = cfg.freeze_embeddings ? emb.offset + emb.size() : emb.offset + emb.cols;
  for (size_t i = begin; i < grad.size(); ++i)
  {
    double const g = grad[i];
    double & m = params.adam_m[i];
    double & v = params.adam_v[i];
    m = cfg.adam_beta1 * m + (1 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v + (1 - cfg.adam_beta2) * g * g;
    double const mHat = m / correction1;
    double const vHat = v / correction2;
    params.values[i] -= result.learning_rate * mHat / (std::sqrt(vHat) + cfg.adam_epsilon);
  }
  return result;
}

CombinedClasses CombineClassScores(std::span<std::vector<double> const> probs, std::span<int const> levels,
                                   size_t top_k)
{
  if (probs.empty() || probs.size() != levels.size())
    throw InvalidArgument("need one distribution per level");
  int const finest = levels.back();
  auto const & fine = probs.back();
  std::vector<int> shifts;
  for (size_t i = 0; i < levels.size(); ++i)
  {
    if (i > 0 && levels[i] <= levels[i - 1])
      throw InvalidArgument("levels must be strictly increasing");
    int const shift = 2 * (finest - levels[i]);
    if ((probs[i].size() << shift) != fine.size())
      throw InvalidArgument("distribution sizes are not a 4-ary hierarchy");
    shifts.push_back(shift);
  }
  if (fine.empty())
    throw InvalidArgument("empty distribution");

  auto score = [&](uint64_t f) {
    double s = fine[f];
    for (size_t i = levels.size() - 1; i-- > 0;)
      s *= probs[i][f >> shifts[i]];
    return s;
  };

  std::vector<uint64_t> order(fine.size());
  std::iota(order.begin(), order.end(), uint64_t{0});
  auto const byProbability = [&fine](uint64_t a, uint64_t b) {
    return fine[a] > fine[b] || (fine[a] == fine[b] && a < b);
  };
  size_t const k = std::clamp<size_t>(top_k, 1, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), byProbability);

  CombinedClasses out;
  out.best = order[0];
  out.best_score = -1;
  for (size_t i = 0; i < order.size(); ++i)
  {
    if (i == k)
    {
      // Every remaining class scores at most its own probability.
      if (fine[order[i - 1]] < out.best_score)
        break;
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), byProbability);
    }
    uint64_t const f = order[i];
    if (i >= k && fine[f] < out.best_score)
      break;
    double const s = score(f);
    out.scores.push_back({f, s});
    if (s > out.best_score || (s == out.best_score && f < out.best))
    {
      out.best_score = s;
      out.best = f;
    }
  }
  std::sort(out.scores.begin(), out.scores.end(), [](ScoredClass const & a, ScoredClass const & b) {
    return a.score > b.score || (a.score == b.score && a.index < b.index);
  });
  return out;
}

CombinedScores CombineLevels(LevelDistributions const & dists, size_t top_k)
{
  CombinedClasses const classes = CombineClassScores(dists.probs, dists.levels, top_k);
  int const finest = dists.levels.back();
  CombinedScores out;
  out.scores.reserve(classes.scores.size());
  for (auto const & s : classes.scores)
    out.scores.push_back({CellId::FromClassIndex(s.index, finest), s.score});
  out.best = CellId::FromClassIndex(classes.best, finest);
  return out;
}

InferenceMode InferenceMode::Parse(std::string const & text)
{
  if (text == "combined")
    return Combined();
  constexpr std::string_view kPrefix = "only-";
  if (text.starts_with(kPrefix))
  {
    std::string const rest = text.substr(kPrefix.size());
    if (!rest.empty() && rest.find_first_not_of("0123456789") == std::string::npos && rest.size() <= 2)
      return Only(std::stoi(rest));
  }
  throw InvalidArgument("unknown inference mode '" + text + "' (expected combined or only-<level>)");
}

std::string InferenceMode::ToString() const
{
  return only_level ? "only-" + std::to_string(*only_level) : "combined";
}

Prediction PredictFromDistributions(LevelDistributions dists, InferenceMode mode, size_t top_k)
{
  if (dists.levels.size() != dists.probs.size() || dists.levels.empty())
    throw InvalidArgument("distributions and levels disagree");
  Prediction out;
  for (size_t i = 0; i < dists.levels.size(); ++i)
    out.level_best.push_back(CellId::FromClassIndex(ArgmaxIndex(dists.probs[i]), dists.levels[i]));

  if (mode.only_level)
  {
    auto const it = std::find(dists.levels.begin(), dists.levels.end(), *mode.only_level);
    if (it == dists.levels.end())
      throw InvalidArgument("mode " + mode.ToString() + " names a level the model was not trained on (" +
                            LevelsToString(dists.levels) + ")");
    auto const i = static_cast<size_t>(it - dists.levels.begin());
    out.best_cell = out.level_best[i];
    out.combined_scores.push_back({out.best_cell, dists.probs[i][out.best_cell.ClassIndex()]});
  }
  else
  {
    CombinedScores combined = CombineLevels(dists, top_k);
    out.best_cell = combined.best;
    out.combined_scores = std::move(combined.scores);
  }
  out.point = CellCenter(out.best_cell);
  out.distributions = std::move(dists);
  return out;
}

Prediction Predict(ModelParams const & params, FeatureBundle const & bundle, InferenceMode mode, size_t top_k)
{
  return PredictFromDistributions(Forward(params, bundle), mode, top_k);
}
}  // namespace geocell
