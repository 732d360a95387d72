// geocell: train, run and evaluate the multi-level cell geocoder.
//
//   geocell train    --train data.jsonl --model model.bin [--levels 5,6,7] ...
//   geocell predict  --model model.bin --data eval.jsonl --out preds.jsonl
//   geocell evaluate --predictions preds.jsonl --data eval.jsonl --report r.json
//   geocell unify    --data eval.jsonl --patches fixes.jsonl --out unified.jsonl
//   geocell baseline --data eval.jsonl --gazetteer gaz.tsv --out preds.jsonl
//   geocell cells    --lat 40.7128 --lng -74.0060 --levels 5,8
//
// Any option may also come from --config FILE (key=value / TOML, or a JSON
// object); command-line flags take precedence.

#include "geocell/commands.hpp"
#include "geocell/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
// Reads a JSON object ({"levels": "5,6,7", "seed": 3, ...}) or key=value
// lines as CLI11 configuration. Top-level keys belong to the subcommand being
// run; a nested object or [section] names the subcommand explicitly.
class JsonOrIniConfig : public CLI::ConfigTOML
{
public:
  explicit JsonOrIniConfig(CLI::App const & app) : m_app(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream & input) const override
  {
    std::string const text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    auto const first = text.find_first_not_of(" \t\r\n");
    std::vector<CLI::ConfigItem> items;
    if (first == std::string::npos || text[first] != '{')
    {
      std::istringstream again(text);
      items = CLI::ConfigTOML::from_config(again);
    }
    else
    {
      AddJson(nlohmann::json::parse(text), {}, items);
    }
    auto const active = m_app.get_subcommands();
    if (!active.empty())
    {
      for (auto & item : items)
      {
        if (item.parents.empty())
          item.parents = {active.front()->get_name()};
      }
    }
    return items;
  }

private:
  static void AddJson(nlohmann::json const & j, std::vector<std::string> const & parents,
                      std::vector<CLI::ConfigItem> & items)
  {
    for (auto const & [key, value] : j.items())
    {
      if (value.is_object())
      {
        auto nested = parents;
        nested.push_back(key);
        AddJson(value, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_string())
        item.inputs = {value.get<std::string>()};
      else if (value.is_boolean())
        item.inputs = {value.get<bool>() ? "true" : "false"};
      else if (value.is_array())
      {
        for (auto const & v : value)
          item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
      else
        item.inputs = {value.dump()};
      items.push_back(std::move(item));
    }
  }

  CLI::App const & m_app;
};

struct ModelFlags
{
  std::string levels = "5,6,7";
  size_t len_a = 400, len_b = 100, len_c = 10;
};

void AddModelFlags(CLI::App & cmd, geocell::TrainCommand & train, ModelFlags & flags)
{
  auto & c = train.config;
  cmd.add_option("--levels", flags.levels, "Comma-separated cell levels")->capture_default_str();
  cmd.add_option("--len-context", flags.len_a, "Context channel length")->capture_default_str();
  cmd.add_option("--len-toponyms", flags.len_b, "Toponym channel length")->capture_default_str();
  cmd.add_option("--len-target", flags.len_c, "Target channel length")->capture_default_str();
  cmd.add_option("--dim", c.embedding_dim, "Embedding dimension")->capture_default_str();
  cmd.add_option("--filters", c.filters, "Convolution filters per n-gram width")->capture_default_str();
  cmd.add_option("--hidden", c.hidden, "Dense projection width")->capture_default_str();
  cmd.add_option("--lr", c.learning_rate, "Initial learning rate")->capture_default_str();
  cmd.add_option("--batch-size", c.batch_size, "Examples per batch")->capture_default_str();
  cmd.add_option("--warmup", c.warmup_steps, "Linear warm-up steps")->capture_default_str();
  cmd.add_option("--decay-rate", c.decay_rate, "Learning-rate decay factor")->capture_default_str();
  cmd.add_option("--decay-steps", c.decay_steps, "Steps per decay factor")->capture_default_str();
  cmd.add_flag("--freeze-embeddings", c.freeze_embeddings, "Keep embeddings fixed");
  cmd.add_option("--seed", c.seed, "Random seed")->capture_default_str();
}
}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Multi-level cell geocoder"};
  app.require_subcommand(1);
  // Lets --config follow the subcommand name.
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonOrIniConfig>(app));
  app.set_config("--config", "", "Read options from a key=value or JSON file");

  // train
  geocell::TrainCommand train;
  ModelFlags modelFlags;
  auto * trainCmd = app.add_subcommand("train", "Train a model on JSONL examples");
  trainCmd->add_option("--train", train.train_path, "Training JSONL")->required()->check(CLI::ExistingFile);
  trainCmd->add_option("--model", train.model_path, "Output model file")->required();
  trainCmd->add_option("--log", train.log_path, "JSONL training log");
  trainCmd->add_option("--embeddings", train.options.embeddings_path, "Pretrained vectors (token v1 ... vD)");
  trainCmd->add_option("--steps", train.options.steps, "Training steps")->capture_default_str();
  trainCmd->add_option("--log-every", train.options.log_every, "Log every N steps")->capture_default_str();
  trainCmd->add_option("--checkpoint-every", train.options.checkpoint_every, "Checkpoint every N steps (0: off)");
  trainCmd->add_option("--min-count", train.options.min_count, "Minimum token count for the vocabulary");
  trainCmd->add_option("--split", train.split, "Training fraction; the rest is held out")->capture_default_str();
  trainCmd->add_option("--max-context", train.max_context, "Maximum context tokens per record")->capture_default_str();
  AddModelFlags(*trainCmd, train, modelFlags);

  // predict
  geocell::PredictCommand predict;
  std::string mode = "combined", ablate = "none", predictLevels;
  auto * predictCmd = app.add_subcommand("predict", "Predict cells for evaluation records");
  predictCmd->add_option("--model", predict.model_path, "Model file")->required();
  predictCmd->add_option("--data", predict.data_path, "Evaluation JSONL")->required()->check(CLI::ExistingFile);
  predictCmd->add_option("--out", predict.out_path, "Output predictions JSONL")->required();
  predictCmd->add_option("--mode", mode, "combined or only-<level>")->capture_default_str();
  predictCmd->add_option("--gazetteer", predict.gazetteer_path, "Gazetteer for constrained selection");
  predictCmd->add_option("--pop-bias", predict.options.pop_bias, "Population bias c in [0, 1]")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  predictCmd->add_option("--ablate", ablate, "none, target or all-toponyms")->capture_default_str();
  predictCmd->add_option("--levels", predictLevels, "Expected model levels");
  predictCmd->add_option("--top-k", predict.options.top_k, "Finest cells scored before the exactness check");

  // evaluate
  geocell::EvaluateCommand evaluate;
  auto * evaluateCmd = app.add_subcommand("evaluate", "Score predictions against gold coordinates");
  evaluateCmd->add_option("--predictions", evaluate.predictions_path, "Predictions JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  evaluateCmd->add_option("--data", evaluate.data_path, "Evaluation JSONL")->required()->check(CLI::ExistingFile);
  evaluateCmd->add_option("--report", evaluate.report_path, "Report JSON (stdout when omitted)");
  evaluateCmd->add_option("--curve", evaluate.curve_path, "Error-curve CSV");

  // unify
  geocell::UnifyCommand unify;
  auto * unifyCmd = app.add_subcommand("unify", "Apply coordinate patches to evaluation data");
  unifyCmd->add_option("--data", unify.data_path, "Evaluation JSONL")->required()->check(CLI::ExistingFile);
  unifyCmd->add_option("--patches", unify.patches_path, "Patch JSONL")->required()->check(CLI::ExistingFile);
  unifyCmd->add_option("--out", unify.out_path, "Patched JSONL")->required();
  unifyCmd->add_option("--report", unify.report_path, "Patch report JSON");

  // baseline
  geocell::BaselineCommand baseline;
  auto * baselineCmd = app.add_subcommand("baseline", "Most-populous-candidate predictions");
  baselineCmd->add_option("--data", baseline.data_path, "Evaluation JSONL")->required()->check(CLI::ExistingFile);
  baselineCmd->add_option("--gazetteer", baseline.gazetteer_path, "Gazetteer")->required()->check(CLI::ExistingFile);
  baselineCmd->add_option("--out", baseline.out_path, "Output predictions JSONL")->required();

  // cells
  double lat = 0, lng = 0;
  std::string cellLevels = "0,1,2,3,4,5,6,7,8,9,10,11,12";
  auto * cellsCmd = app.add_subcommand("cells", "Print cell tokens for a point");
  cellsCmd->add_option("--lat", lat, "Latitude")->required();
  cellsCmd->add_option("--lng", lng, "Longitude")->required();
  cellsCmd->add_option("--levels", cellLevels, "Comma-separated levels")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (*trainCmd)
    {
      train.config.levels.levels = geocell::ParseLevels(modelFlags.levels);
      train.config.features = {modelFlags.len_a, modelFlags.len_b, modelFlags.len_c};
      auto const summary = geocell::RunTrain(train, std::cerr);
      std::cout << "trained " << summary.train_examples << " examples, final loss " << summary.final_loss;
      if (summary.dev_loss)
        std::cout << ", dev loss " << *summary.dev_loss;
      std::cout << '\n';
    }
    else if (*predictCmd)
    {
      predict.options.mode = geocell::InferenceMode::Parse(mode);
      predict.options.ablation = geocell::ParseAblation(ablate);
      if (!predictLevels.empty())
        predict.levels = geocell::LevelConfig{geocell::ParseLevels(predictLevels)};
      geocell::RunPredict(predict);
    }
    else if (*evaluateCmd)
    {
      auto const result = geocell::RunEvaluate(evaluate);
      if (evaluate.report_path.empty())
      {
        auto const & r = result.overall;
        std::cout << "n " << r.n << "\naccuracy_at_161 " << r.accuracy_at_161 << "\nmean_error_km "
                  << r.mean_error_km << "\nauc_log_error " << r.auc_log_error << '\n';
      }
    }
    else if (*unifyCmd)
    {
      auto const report = geocell::RunUnify(unify, std::cerr);
      std::cout << "applied " << report.applied << ", mismatched " << report.mismatched << '\n';
    }
    else if (*baselineCmd)
    {
      geocell::RunBaseline(baseline);
    }
    else if (*cellsCmd)
    {
      geocell::RunCells({lat, lng}, geocell::ParseLevels(cellLevels), std::cout);
    }
  }
  catch (std::exception const & e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
