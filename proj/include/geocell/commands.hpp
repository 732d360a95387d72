#pragma once

// Workflows behind the command-line subcommands. Each one validates its
// inputs before writing anything and writes outputs atomically.

#include "geocell/corpus.hpp"
#include "geocell/gazetteer.hpp"
#include "geocell/metrics.hpp"
#include "geocell/model.hpp"
#include "geocell/training.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geocell
{
inline constexpr double kDefaultPopBias = 0.90;

Ablation ParseAblation(std::string const & text);

struct TrainCommand
{
  std::string train_path;
  std::string model_path;
  // JSONL step log; empty disables.
  std::string log_path;
  ModelConfig config;
  TrainOptions options;
  double split = 0.9;
  size_t max_context = kDefaultMaxContext;
};

struct TrainSummary
{
  size_t train_examples = 0;
  size_t dev_examples = 0;
  double final_loss = 0;
  std::optional<double> dev_loss;
};

TrainSummary RunTrain(TrainCommand const & cmd, std::ostream & log);

struct PredictOptions
{
  InferenceMode mode;
  Ablation ablation = Ablation::None;
  Gazetteer const * gazetteer = nullptr;
  double pop_bias = kDefaultPopBias;
  size_t top_k = kDefaultCombineTopK;
};

struct RecordPrediction
{
  CellId cell;
  LatLng cell_center;
  std::vector<CellId> level_best;
  std::optional<Candidate> candidate;
  // A gazetteer was given but the mention had no candidates.
  bool gazetteer_fallback = false;
  // Final point: the candidate when one was selected, else the cell centre.
  LatLng point;
};

RecordPrediction PredictRecord(ModelParams const & params, Vocabulary const & vocab, EvalRecord const & record,
                               PredictOptions const & options);

struct PredictCommand
{
  std::string model_path;
  std::string data_path;
  std::string out_path;
  std::string gazetteer_path;
  std::optional<LevelConfig> levels;
  PredictOptions options;
};

void RunPredict(PredictCommand const & cmd);

struct BaselineCommand
{
  std::string data_path;
  std::string gazetteer_path;
  std::string out_path;
};

void RunBaseline(BaselineCommand const & cmd);

struct EvaluateCommand
{
  std::string predictions_path;
  std::string data_path;
  std::string report_path;
  // Optional error-curve CSV.
  std::string curve_path;
};

struct EvaluationResult
{
  EvalReport overall;
  std::vector<std::pair<std::string, EvalReport>> per_dataset;
};

EvaluationResult RunEvaluate(EvaluateCommand const & cmd);

struct UnifyCommand
{
  std::string data_path;
  std::string patches_path;
  std::string out_path;
  std::string report_path;
};

PatchReport RunUnify(UnifyCommand const & cmd, std::ostream & warnings);

// One "level token center_lat center_lng" line per level.
void RunCells(LatLng p, std::vector<int> const & levels, std::ostream & out);
}  // namespace geocell
