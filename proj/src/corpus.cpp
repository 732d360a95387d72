#include "geocell/corpus.hpp"

#include "geocell/error.hpp"
#include "geocell/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

using nlohmann::json;

namespace geocell
{
namespace
{
constexpr double kPatchTolerance = 1e-6;

TokenSpan ParseSpan(json const & j)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError("span must be a [start, end] pair of integers");
  auto const start = j[0].get<long long>();
  auto const end = j[1].get<long long>();
  if (start < 0 || end < 0)
    throw ValidationError("negative span index");
  return {static_cast<size_t>(start), static_cast<size_t>(end)};
}

json SpanToJson(TokenSpan const & s) { return json::array({s.start, s.end}); }

double GetNumber(json const & j, char const * key)
{
  auto const it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw ParseError(std::string("missing numeric field '") + key + "'");
  return it->get<double>();
}

std::string GetString(json const & j, char const * key, std::string fallback = {})
{
  auto const it = j.find(key);
  if (it == j.end() || it->is_null())
    return fallback;
  if (!it->is_string())
    throw ParseError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

TrainingExample ExampleFromJson(json const & j)
{
  if (!j.is_object())
    throw ParseError("record must be a JSON object");
  TrainingExample ex;
  if (auto const it = j.find("context"); it != j.end())
  {
    if (!it->is_array())
      throw ParseError("'context' must be an array of tokens");
    for (auto const & tok : *it)
    {
      if (!tok.is_string())
        throw ParseError("'context' must contain strings");
      ex.context_tokens.push_back(FoldCase(tok.get<std::string>()));
    }
  }
  else if (auto const text = j.find("text"); text != j.end() && text->is_string())
  {
    ex.context_tokens = Tokenize(text->get<std::string>());
  }
  else
  {
    throw ParseError("record needs 'context' or 'text'");
  }

  auto const target = j.find("target_span");
  if (target == j.end())
    throw ParseError("missing 'target_span'");
  ex.target_span = ParseSpan(*target);

  if (auto const it = j.find("toponym_spans"); it != j.end() && !it->is_null())
  {
    if (!it->is_array())
      throw ParseError("'toponym_spans' must be an array");
    for (auto const & s : *it)
      ex.toponym_spans.push_back(ParseSpan(s));
  }
  else
  {
    ex.toponym_spans.push_back(ex.target_span);
  }
  ex.gold = Normalized({GetNumber(j, "lat"), GetNumber(j, "lng")});
  return ex;
}

json ExampleToJson(TrainingExample const & ex)
{
  json j;
  j["context"] = ex.context_tokens;
  json spans = json::array();
  for (auto const & s : ex.toponym_spans)
    spans.push_back(SpanToJson(s));
  j["toponym_spans"] = std::move(spans);
  j["target_span"] = SpanToJson(ex.target_span);
  j["lat"] = ex.gold.lat;
  j["lng"] = ex.gold.lng;
  return j;
}

template <typename Fn>
auto WithLine(std::string const & path, size_t line, Fn && fn)
{
  try
  {
    return fn();
  }
  catch (json::exception const & e)
  {
    throw ParseError(AtLine(path, line) + e.what());
  }
  catch (ParseError const & e)
  {
    throw ParseError(AtLine(path, line) + e.what());
  }
  catch (ValidationError const & e)
  {
    throw ValidationError(AtLine(path, line) + e.what());
  }
  catch (InvalidArgument const & e)
  {
    throw ValidationError(AtLine(path, line) + e.what());
  }
}

bool IsBlank(std::string const & line)
{
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::ifstream OpenOrThrow(std::string const & path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open '" + path + "'");
  return in;
}
}  // namespace

void Validate(TrainingExample const & ex, size_t max_context)
{
  size_t const n = ex.context_tokens.size();
  if (n > max_context)
    throw ValidationError("context has " + std::to_string(n) + " tokens, limit is " +
                          std::to_string(max_context));
  auto check = [n](TokenSpan const & s, char const * what) {
    if (s.start >= s.end || s.end > n)
      throw ValidationError(std::string(what) + " [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") outside context of " + std::to_string(n) +
                            " tokens");
  };
  check(ex.target_span, "target_span");
  for (auto const & s : ex.toponym_spans)
    check(s, "toponym span");
  if (std::find(ex.toponym_spans.begin(), ex.toponym_spans.end(), ex.target_span) ==
      ex.toponym_spans.end())
    throw ValidationError("target_span is not one of toponym_spans");
}

std::string TargetSurface(TrainingExample const & ex)
{
  std::string out;
  for (size_t i = ex.target_span.start; i < ex.target_span.end && i < ex.context_tokens.size(); ++i)
  {
    if (!out.empty())
      out.push_back(' ');
    out += ex.context_tokens[i];
  }
  return out;
}

TrainingReader::TrainingReader(std::string path, size_t max_context)
  : m_path(std::move(path)), m_in(OpenOrThrow(m_path)), m_maxContext(max_context)
{
}

std::optional<TrainingExample> TrainingReader::Next()
{
  std::string line;
  while (std::getline(m_in, line))
  {
    ++m_line;
    if (IsBlank(line))
      continue;
    return WithLine(m_path, m_line, [&] {
      TrainingExample ex = ExampleFromJson(json::parse(line));
      Validate(ex, m_maxContext);
      return ex;
    });
  }
  return std::nullopt;
}

std::vector<TrainingExample> LoadTraining(std::string const & path, size_t max_context)
{
  TrainingReader reader(path, max_context);
  std::vector<TrainingExample> out;
  while (auto ex = reader.Next())
    out.push_back(std::move(*ex));
  return out;
}

std::vector<EvalRecord> LoadEval(std::string const & path, size_t max_context)
{
  auto in = OpenOrThrow(path);
  std::vector<EvalRecord> out;
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    if (IsBlank(line))
      continue;
    out.push_back(WithLine(path, lineNo, [&] {
      json const j = json::parse(line);
      EvalRecord r;
      r.example = ExampleFromJson(j);
      Validate(r.example, max_context);
      r.dataset_id = GetString(j, "dataset_id");
      r.doc_id = GetString(j, "doc_id");
      r.mention = GetString(j, "mention", TargetSurface(r.example));
      if (auto const it = j.find("entity_key"); it != j.end() && !it->is_null())
        r.entity_key = GetString(j, "entity_key");
      return r;
    }));
  }
  return out;
}

void WriteTraining(std::ostream & out, std::span<TrainingExample const> examples)
{
  for (auto const & ex : examples)
    out << ExampleToJson(ex).dump() << '\n';
}

void WriteEval(std::ostream & out, std::span<EvalRecord const> records)
{
  for (auto const & r : records)
  {
    json j = ExampleToJson(r.example);
    j["dataset_id"] = r.dataset_id;
    j["doc_id"] = r.doc_id;
    j["mention"] = r.mention;
    if (r.entity_key)
      j["entity_key"] = *r.entity_key;
    out << j.dump() << '\n';
  }
}

std::vector<CoordinatePatch> LoadPatches(std::string const & path)
{
  auto in = OpenOrThrow(path);
  std::vector<CoordinatePatch> out;
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    if (IsBlank(line))
      continue;
    out.push_back(WithLine(path, lineNo, [&] {
      json const j = json::parse(line);
      CoordinatePatch p;
      p.entity_key = GetString(j, "entity_key");
      if (p.entity_key.empty())
        throw ValidationError("patch needs a non-empty 'entity_key'");
      p.coord = Normalized({GetNumber(j, "lat"), GetNumber(j, "lng")});
      bool const hasOldLat = j.contains("old_lat");
      bool const hasOldLng = j.contains("old_lng");
      if (hasOldLat != hasOldLng)
        throw ParseError("'old_lat' and 'old_lng' must be given together");
      if (hasOldLat)
        p.expected_old = Normalized({GetNumber(j, "old_lat"), GetNumber(j, "old_lng")});
      return p;
    }));
  }
  return out;
}

std::vector<EvalRecord> ApplyPatches(std::vector<EvalRecord> records,
                                     std::span<CoordinatePatch const> patches, PatchReport & report)
{
  report = {};
  std::map<std::string, CoordinatePatch const *> byKey;
  for (auto const & p : patches)
  {
    auto const [it, inserted] = byKey.emplace(p.entity_key, &p);
    if (!inserted)
    {
      report.warnings.push_back("duplicate patch for '" + p.entity_key + "'; last one wins");
      it->second = &p;
    }
  }

  for (size_t i = 0; i < records.size(); ++i)
  {
    auto & r = records[i];
    if (!r.entity_key)
      continue;
    auto const it = byKey.find(*r.entity_key);
    if (it == byKey.end())
      continue;
    CoordinatePatch const & p = *it->second;
    if (p.expected_old)
    {
      LatLng const & g = r.example.gold;
      if (std::fabs(g.lat - p.expected_old->lat) > kPatchTolerance ||
          std::fabs(g.lng - p.expected_old->lng) > kPatchTolerance)
      {
        ++report.mismatched;
        report.flagged.push_back(i);
        report.warnings.push_back("record " + std::to_string(i) + " ('" + p.entity_key +
                                  "'): gold (" + std::to_string(g.lat) + ", " +
                                  std::to_string(g.lng) + ") differs from expected old (" +
                                  std::to_string(p.expected_old->lat) + ", " +
                                  std::to_string(p.expected_old->lng) + ")");
      }
    }
    r.example.gold = p.coord;
    ++report.applied;
  }
  return records;
}

ContextWindow MakeContextWindow(std::span<std::string const> doc_tokens,
                                std::span<TokenSpan const> sentences,
                                std::span<TokenSpan const> toponym_spans, TokenSpan target_span,
                                LatLng gold, size_t max_tokens)
{
  if (target_span.start >= target_span.end || target_span.end > doc_tokens.size())
    throw InvalidArgument("target span outside the document");
  if (target_span.size() > max_tokens)
    throw InvalidArgument("target span longer than the token budget");
  for (size_t k = 0; k < sentences.size(); ++k)
  {
    bool const contiguous = k == 0 ? sentences[k].start == 0
                                   : sentences[k].start == sentences[k - 1].end;
    if (!contiguous || sentences[k].end < sentences[k].start)
      throw InvalidArgument("sentences must tile the document in order");
  }
  if (sentences.empty() || sentences.back().end != doc_tokens.size())
    throw InvalidArgument("sentences must tile the document in order");

  // Sentences overlapped by the target form the core of the window.
  size_t lo = 0;
  while (sentences[lo].end <= target_span.start)
    ++lo;
  size_t hi = lo;
  while (sentences[hi].end < target_span.end)
    ++hi;

  ContextWindow out;
  size_t begin = sentences[lo].start;
  size_t end = sentences[hi].end;

  if (end - begin > max_tokens)
  {
    out.truncated = true;
    size_t const slack = max_tokens - target_span.size();
    size_t start = target_span.start >= slack / 2 ? target_span.start - slack / 2 : 0;
    start = std::max(start, begin);
    start = std::min(start, end - max_tokens);
    begin = start;
    end = start + max_tokens;
  }
  else
  {
    bool growBefore = lo > 0;
    bool growAfter = hi + 1 < sentences.size();
    while (growBefore || growAfter)
    {
      if (growBefore)
      {
        if (end - sentences[lo - 1].start <= max_tokens)
        {
          --lo;
          begin = sentences[lo].start;
          growBefore = lo > 0;
        }
        else
        {
          growBefore = false;
        }
      }
      if (growAfter)
      {
        if (sentences[hi + 1].end - begin <= max_tokens)
        {
          ++hi;
          end = sentences[hi].end;
          growAfter = hi + 1 < sentences.size();
        }
        else
        {
          growAfter = false;
        }
      }
    }
  }

  out.offset = begin;
  auto & ex = out.example;
  ex.context_tokens.assign(doc_tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                           doc_tokens.begin() + static_cast<std::ptrdiff_t>(end));
  TokenSpan const window{begin, end};
  auto const shift = [begin](TokenSpan s) { return TokenSpan{s.start - begin, s.end - begin}; };
  for (auto const & s : toponym_spans)
  {
    if (window.Contains(s) && s.start < s.end)
      ex.toponym_spans.push_back(shift(s));
  }
  ex.target_span = shift(target_span);
  if (std::find(ex.toponym_spans.begin(), ex.toponym_spans.end(), ex.target_span) ==
      ex.toponym_spans.end())
  {
    ex.toponym_spans.push_back(ex.target_span);
    std::sort(ex.toponym_spans.begin(), ex.toponym_spans.end());
  }
  ex.gold = gold;
  return out;
}
}  // namespace geocell
