#include "geocell/commands.hpp"

#include "geocell/atomic_file.hpp"
#include "geocell/error.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

using nlohmann::json;

namespace geocell
{
namespace
{
json SummaryJson(EvalReport const & r)
{
  return {{"n", r.n},
          {"accuracy_at_161", r.accuracy_at_161},
          {"mean_error_km", r.mean_error_km},
          {"auc_log_error", r.auc_log_error}};
}

json CandidateJson(Candidate const & c)
{
  return {{"name", c.name}, {"lat", c.location.lat}, {"lng", c.location.lng}, {"population", c.population}};
}

std::string FormatDouble(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

Ablation ParseAblation(std::string const & text)
{
  if (text == "none")
    return Ablation::None;
  if (text == "target")
    return Ablation::Target;
  if (text == "all-toponyms")
    return Ablation::AllToponyms;
  throw InvalidArgument("unknown ablation '" + text + "' (expected none, target or all-toponyms)");
}

TrainSummary RunTrain(TrainCommand const & cmd, std::ostream & log)
{
  ModelConfig config = cmd.config;
  config.Validate();

  // Validation failures abort here, before any training or output.
  std::vector<TrainingExample> const all = LoadTraining(cmd.train_path, cmd.max_context);
  Split const split = SplitExamples(all, cmd.split, config.seed);

  std::optional<AtomicFile> stepLog;
  if (!cmd.log_path.empty())
    stepLog.emplace(cmd.log_path);

  TrainOptions opts = cmd.options;
  if (opts.checkpoint_every > 0 && opts.checkpoint_prefix.empty())
    opts.checkpoint_prefix = cmd.model_path;

  TrainSummary summary;
  summary.train_examples = split.train.size();
  summary.dev_examples = split.dev.size();
  log << "training on " << split.train.size() << " examples, " << split.dev.size() << " held out\n";

  TrainedModel model = Train(split.train, config, opts, [&](StepLog const & s) {
    json j = {{"step", s.step}, {"loss", s.loss}, {"learning_rate", s.learning_rate}};
    json levels = json::object();
    for (size_t i = 0; i < s.level_losses.size(); ++i)
      levels[std::to_string(config.levels.levels[i])] = s.level_losses[i];
    j["level_loss"] = std::move(levels);
    if (stepLog)
      stepLog->stream() << j.dump() << '\n';
    log << "step " << s.step << " loss " << s.loss << " lr " << s.learning_rate << '\n';
    summary.final_loss = s.loss;
  });

  if (!split.dev.empty())
  {
    auto const dev = MakeLabeled(split.dev, model.vocab, config);
    summary.dev_loss = MeanLoss(model.params, dev);
    log << "dev loss " << *summary.dev_loss << '\n';
    if (stepLog)
      stepLog->stream() << json{{"step", model.params.step}, {"dev_loss", *summary.dev_loss}}.dump() << '\n';
  }

  SaveParams(model.params, model.vocab, cmd.model_path);
  if (stepLog)
    stepLog->Commit();
  return summary;
}

RecordPrediction PredictRecord(ModelParams const & params, Vocabulary const & vocab, EvalRecord const & record,
                               PredictOptions const & options)
{
  FeatureBundle const bundle = Ablate(ExtractFeatures(record.example, vocab, params.config.features), options.ablation);
  Prediction const pred = Predict(params, bundle, options.mode, options.top_k);

  RecordPrediction out;
  out.cell = pred.best_cell;
  out.cell_center = pred.point;
  out.level_best = pred.level_best;
  out.point = pred.point;
  if (options.gazetteer)
  {
    if (options.gazetteer->Contains(record.mention))
    {
      out.candidate = ConstrainedSelect(*options.gazetteer, record.mention, pred.point, options.pop_bias);
      out.point = out.candidate->location;
    }
    else
    {
      out.gazetteer_fallback = true;
    }
  }
  return out;
}

void RunPredict(PredictCommand const & cmd)
{
  LoadedModel const model = LoadParams(cmd.model_path, cmd.levels);
  std::vector<EvalRecord> const records = LoadEval(cmd.data_path);
  std::optional<Gazetteer> gazetteer;
  PredictOptions options = cmd.options;
  if (!cmd.gazetteer_path.empty())
  {
    gazetteer = LoadGazetteer(cmd.gazetteer_path);
    options.gazetteer = &*gazetteer;
  }
  // Fail on a bad mode before writing anything.
  if (options.mode.only_level)
  {
    auto const & levels = model.params.config.levels.levels;
    if (std::find(levels.begin(), levels.end(), *options.mode.only_level) == levels.end())
      throw InvalidArgument("mode " + options.mode.ToString() + " names a level the model was not trained on (" +
                            LevelsToString(levels) + ")");
  }

  AtomicFile file(cmd.out_path);
  for (auto const & r : records)
  {
    RecordPrediction const p = PredictRecord(model.params, model.vocab, r, options);
    json levelCells = json::object();
    for (size_t i = 0; i < p.level_best.size(); ++i)
      levelCells[std::to_string(model.params.config.levels.levels[i])] = CellToToken(p.level_best[i]);
    json j = {{"dataset_id", r.dataset_id},
              {"doc_id", r.doc_id},
              {"mention", r.mention},
              {"mode", options.mode.ToString()},
              {"cell", CellToToken(p.cell)},
              {"cell_lat", p.cell_center.lat},
              {"cell_lng", p.cell_center.lng},
              {"level_cells", levelCells},
              {"lat", p.point.lat},
              {"lng", p.point.lng}};
    if (options.gazetteer)
    {
      j["candidate"] = p.candidate ? CandidateJson(*p.candidate) : json(nullptr);
      j["gazetteer_fallback"] = p.gazetteer_fallback;
    }
    file.stream() << j.dump() << '\n';
  }
  file.Commit();
}

void RunBaseline(BaselineCommand const & cmd)
{
  std::vector<EvalRecord> const records = LoadEval(cmd.data_path);
  Gazetteer const gazetteer = LoadGazetteer(cmd.gazetteer_path);
  AtomicFile file(cmd.out_path);
  for (size_t i = 0; i < records.size(); ++i)
  {
    auto const & r = records[i];
    Candidate const * best = nullptr;
    try
    {
      best = &PopBaseline(gazetteer, r.mention);
    }
    catch (NoCandidateError const & e)
    {
      throw NoCandidateError("record " + std::to_string(i + 1) + ": " + e.what());
    }
    json const j = {{"dataset_id", r.dataset_id},
                    {"doc_id", r.doc_id},
                    {"mention", r.mention},
                    {"mode", "pop-baseline"},
                    {"candidate", CandidateJson(*best)},
                    {"lat", best->location.lat},
                    {"lng", best->location.lng}};
    file.stream() << j.dump() << '\n';
  }
  file.Commit();
}

EvaluationResult RunEvaluate(EvaluateCommand const & cmd)
{
  std::vector<EvalRecord> const gold = LoadEval(cmd.data_path);
  std::ifstream in(cmd.predictions_path);
  if (!in)
    throw Error("cannot open predictions '" + cmd.predictions_path + "'");
  std::vector<LatLng> predicted;
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try
    {
      json const j = json::parse(line);
      size_t const idx = predicted.size();
      if (idx < gold.size())
      {
        auto const doc = j.find("doc_id");
        if (doc != j.end() && doc->is_string() && doc->get<std::string>() != gold[idx].doc_id)
          throw ValidationError("prediction doc_id '" + doc->get<std::string>() + "' does not match record doc_id '" +
                                gold[idx].doc_id + "'");
      }
      predicted.push_back(Normalized({j.at("lat").get<double>(), j.at("lng").get<double>()}));
    }
    catch (json::exception const & e)
    {
      throw ParseError(AtLine(cmd.predictions_path, lineNo) + e.what());
    }
    catch (ValidationError const & e)
    {
      throw ValidationError(AtLine(cmd.predictions_path, lineNo) + e.what());
    }
  }
  if (predicted.size() != gold.size())
    throw ValidationError("record-count mismatch: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(gold.size()) + " records");

  std::vector<double> errors;
  std::map<std::string, std::vector<double>> byDataset;
  for (size_t i = 0; i < gold.size(); ++i)
  {
    double const e = ErrorKm(predicted[i], gold[i].example.gold);
    errors.push_back(e);
    if (!gold[i].dataset_id.empty())
      byDataset[gold[i].dataset_id].push_back(e);
  }

  EvaluationResult result;
  result.overall = Evaluate(errors);
  json report = SummaryJson(result.overall);
  json datasets = json::object();
  for (auto & [id, errs] : byDataset)
  {
    result.per_dataset.emplace_back(id, Evaluate(std::move(errs)));
    datasets[id] = SummaryJson(result.per_dataset.back().second);
  }
  if (!datasets.empty())
    report["datasets"] = std::move(datasets);

  if (!cmd.curve_path.empty())
    WriteErrorCurveCsv(errors, cmd.curve_path);
  if (!cmd.report_path.empty())
  {
    AtomicFile file(cmd.report_path);
    file.stream() << report.dump(2) << '\n';
    file.Commit();
  }
  return result;
}

PatchReport RunUnify(UnifyCommand const & cmd, std::ostream & warnings)
{
  std::vector<EvalRecord> records = LoadEval(cmd.data_path);
  std::vector<CoordinatePatch> const patches = LoadPatches(cmd.patches_path);
  PatchReport report;
  records = ApplyPatches(std::move(records), patches, report);
  for (auto const & w : report.warnings)
    warnings << "warning: " << w << '\n';

  AtomicFile out(cmd.out_path);
  WriteEval(out.stream(), records);
  if (!cmd.report_path.empty())
  {
    AtomicFile rep(cmd.report_path);
    json const j = {{"applied", report.applied},
                    {"mismatched", report.mismatched},
                    {"flagged", report.flagged},
                    {"warnings", report.warnings}};
    rep.stream() << j.dump(2) << '\n';
    out.Commit();
    rep.Commit();
  }
  else
  {
    out.Commit();
  }
  return report;
}

void RunCells(LatLng p, std::vector<int> const & levels, std::ostream & out)
{
  for (int level : levels)
  {
    CellId const c = CellFromLatLng(p, level);
    LatLng const center = CellCenter(c);
    out << level << ' ' << CellToToken(c) << ' ' << FormatDouble(center.lat) << ' ' << FormatDouble(center.lng)
        << '\n';
  }
}
}  // namespace geocell
