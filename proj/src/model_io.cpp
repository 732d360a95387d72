#include "geocell/model.hpp"

#include "geocell/atomic_file.hpp"
#include "geocell/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

using nlohmann::json;

namespace geocell
{
namespace
{
// Layout: magic, u32 version, u64 header length, JSON header, then
// values / adam_m / adam_v as little-endian float64 arrays, then the trailer.
constexpr char kMagic[8] = {'G', 'E', 'O', 'C', 'E', 'L', 'L', 'M'};
constexpr char kTrailer[8] = {'G', 'E', 'O', 'C', 'E', 'N', 'D', '!'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "model files are little-endian");

json ConfigToJson(ModelConfig const & c)
{
  json projections = json::array();
  for (auto const & p : c.projections)
    projections.push_back({static_cast<int>(p.channel), p.width});
  return {
      {"len_a", c.features.len_a},
      {"len_b", c.features.len_b},
      {"len_c", c.features.len_c},
      {"embedding_dim", c.embedding_dim},
      {"filters", c.filters},
      {"hidden", c.hidden},
      {"projections", projections},
      {"levels", c.levels.levels},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"warmup_steps", c.warmup_steps},
      {"decay_rate", c.decay_rate},
      {"decay_steps", c.decay_steps},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"freeze_embeddings", c.freeze_embeddings},
      {"seed", c.seed},
  };
}

ModelConfig ConfigFromJson(json const & j)
{
  ModelConfig c;
  c.features.len_a = j.at("len_a").get<size_t>();
  c.features.len_b = j.at("len_b").get<size_t>();
  c.features.len_c = j.at("len_c").get<size_t>();
  c.embedding_dim = j.at("embedding_dim").get<size_t>();
  c.filters = j.at("filters").get<size_t>();
  c.hidden = j.at("hidden").get<size_t>();
  c.projections.clear();
  for (auto const & p : j.at("projections"))
  {
    int const channel = p.at(0).get<int>();
    if (channel < 0 || channel > 2)
      throw FormatError("bad projection channel " + std::to_string(channel));
    c.projections.push_back({static_cast<Channel>(channel), p.at(1).get<int>()});
  }
  c.levels.levels = j.at("levels").get<std::vector<int>>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<size_t>();
  c.warmup_steps = j.at("warmup_steps").get<size_t>();
  c.decay_rate = j.at("decay_rate").get<double>();
  c.decay_steps = j.at("decay_steps").get<size_t>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  c.freeze_embeddings = j.at("freeze_embeddings").get<bool>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

template <typename T>
void WritePod(std::ostream & out, T const & v)
{
  out.write(reinterpret_cast<char const *>(&v), sizeof(T));
}

void WriteDoubles(std::ostream & out, std::vector<double> const & v)
{
  out.write(reinterpret_cast<char const *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void ReadExact(std::istream & in, void * dst, size_t bytes, std::string const & path, char const * what)
{
  in.read(static_cast<char *>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes)
    throw FormatError("model file '" + path + "' is truncated (while reading " + what + ")");
}
}  // namespace

void SaveParams(ModelParams const & params, Vocabulary const & vocab, std::string const & path)
{
  if (vocab.size() != params.vocab_size)
    throw InvalidArgument("vocabulary has " + std::to_string(vocab.size()) + " tokens, parameters expect " +
                          std::to_string(params.vocab_size));
  json header = {
      {"config", ConfigToJson(params.config)},
      {"vocab_size", params.vocab_size},
      {"head_sizes", params.head_sizes},
      {"param_count", params.values.size()},
      {"step", params.step},
      {"vocab", vocab.tokens()},
  };
  std::string const text = header.dump();

  AtomicFile file(path, std::ios::binary);
  auto & out = file.stream();
  out.write(kMagic, sizeof(kMagic));
  WritePod(out, kVersion);
  WritePod(out, static_cast<uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  WriteDoubles(out, params.values);
  WriteDoubles(out, params.adam_m);
  WriteDoubles(out, params.adam_v);
  out.write(kTrailer, sizeof(kTrailer));
  file.Commit();
}

LoadedModel LoadParams(std::string const & path, std::optional<LevelConfig> const & expected_levels)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open model file '" + path + "'");

  char magic[sizeof(kMagic)];
  ReadExact(in, magic, sizeof(magic), path, "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("'" + path + "' is not a model file");
  uint32_t version = 0;
  ReadExact(in, &version, sizeof(version), path, "version");
  if (version != kVersion)
    throw FormatError("model file version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kVersion) + ")");
  uint64_t headerSize = 0;
  ReadExact(in, &headerSize, sizeof(headerSize), path, "header size");
  if (headerSize > (uint64_t{1} << 32))
    throw FormatError("model file header is implausibly large");
  std::string text(headerSize, '\0');
  ReadExact(in, text.data(), text.size(), path, "header");

  LoadedModel model;
  std::vector<size_t> headSizes;
  size_t paramCount = 0;
  try
  {
    json const header = json::parse(text);
    ModelConfig const config = ConfigFromJson(header.at("config"));
    config.Validate();
    size_t const vocabSize = header.at("vocab_size").get<size_t>();
    headSizes = header.at("head_sizes").get<std::vector<size_t>>();
    paramCount = header.at("param_count").get<size_t>();
    model.params = ZeroParams(config, vocabSize, headSizes);
    model.params.step = header.at("step").get<uint64_t>();
    auto const tokens = header.at("vocab").get<std::vector<std::string>>();
    for (size_t i = 2; i < tokens.size(); ++i)
      model.vocab.Add(tokens[i]);
    if (model.vocab.size() != vocabSize)
      throw FormatError("vocabulary holds " + std::to_string(model.vocab.size()) + " tokens, header says " +
                        std::to_string(vocabSize));
  }
  catch (json::exception const & e)
  {
    throw FormatError("bad model header in '" + path + "': " + e.what());
  }
  catch (InvalidArgument const & e)
  {
    throw FormatError("bad model configuration in '" + path + "': " + e.what());
  }

  auto & params = model.params;
  if (expected_levels && !(params.config.levels == *expected_levels))
    throw FormatError("model levels " + LevelsToString(params.config.levels.levels) + " do not match requested " +
                      LevelsToString(expected_levels->levels));
  if (params.head_sizes != CellHeadSizes(params.config.levels))
    throw FormatError("head sizes do not match the model levels");
  if (paramCount != params.layout.total)
    throw FormatError("parameter count " + std::to_string(paramCount) + " does not match the configured shapes (" +
                      std::to_string(params.layout.total) + ")");

  size_t const bytes = paramCount * sizeof(double);
  ReadExact(in, params.values.data(), bytes, path, "parameters");
  ReadExact(in, params.adam_m.data(), bytes, path, "Adam first moments");
  ReadExact(in, params.adam_v.data(), bytes, path, "Adam second moments");
  char trailer[sizeof(kTrailer)];
  ReadExact(in, trailer, sizeof(trailer), path, "trailer");
  if (std::memcmp(trailer, kTrailer, sizeof(kTrailer)) != 0)
    throw FormatError("model file '" + path + "' has a corrupt trailer");
  if (in.peek() != std::char_traits<char>::eof())
    throw FormatError("model file '" + path + "' has trailing bytes");
  return model;
}
}  // namespace geocell
