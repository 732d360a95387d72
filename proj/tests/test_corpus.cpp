#include "geocell/corpus.hpp"
#include "geocell/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace geocell;

namespace
{
struct TempFile
{
  std::string path;
  explicit TempFile(std::string const & name, std::string const & content = {})
      : path((std::filesystem::temp_directory_path() / ("geocell_corpus_" + name)).string())
  {
    std::ofstream(path) << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

EvalRecord Record(std::string key, LatLng gold)
{
  EvalRecord r;
  r.dataset_id = "fixture";
  r.doc_id = key;
  r.mention = key;
  r.example.context_tokens = {"in", key};
  r.example.target_span = {1, 2};
  r.example.toponym_spans = {{1, 2}};
  r.example.gold = gold;
  r.entity_key = key;
  return r;
}
}  // namespace

TEST_CASE("empty training file")
{
  TempFile f("empty.jsonl");
  CHECK(LoadTraining(f.path).empty());
  TrainingReader reader(f.path);
  CHECK_FALSE(reader.Next().has_value());
}

TEST_CASE("missing file")
{
  CHECK_THROWS_AS(LoadTraining("/nonexistent/geocell.jsonl"), Error);
}

TEST_CASE("validation errors name the line")
{
  TempFile f("bad.jsonl",
             "{\"context\": [\"a\", \"b\"], \"target_span\": [0, 1], \"lat\": 1, \"lng\": 2}\n"
             "\n"
             "{\"context\": [\"a\", \"b\"], \"target_span\": [1, 3], \"lat\": 1, \"lng\": 2}\n");
  try
  {
    LoadTraining(f.path);
    FAIL("expected a validation error");
  }
  catch (ValidationError const & e)
  {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  TempFile g("malformed.jsonl", "{\"context\": [\"a\"], \"target_span\": [0, 1], \"lat\": 1\n");
  try
  {
    LoadTraining(g.path);
    FAIL("expected a parse error");
  }
  catch (ParseError const & e)
  {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
}

TEST_CASE("validate")
{
  TrainingExample ex;
  ex.context_tokens = {"flights", "to", "lima", "and", "cusco"};
  ex.target_span = {2, 3};
  ex.toponym_spans = {{2, 3}, {4, 5}};
  CHECK_NOTHROW(Validate(ex));
  CHECK_THROWS_AS(Validate(ex, 4), ValidationError);

  auto bad = ex;
  bad.target_span = {3, 4};
  CHECK_THROWS_AS(Validate(bad), ValidationError);
  bad = ex;
  bad.toponym_spans.push_back({4, 6});
  CHECK_THROWS_AS(Validate(bad), ValidationError);
  bad = ex;
  bad.target_span = {2, 2};
  bad.toponym_spans = {{2, 2}};
  CHECK_THROWS_AS(Validate(bad), ValidationError);
  CHECK(TargetSurface(ex) == "lima");
}

TEST_CASE("text records are tokenized")
{
  TempFile f("text.jsonl", "{\"text\": \"Flights to Lima, Peru\", \"target_span\": [2, 3], \"lat\": -12.05, \"lng\": -77.04}\n");
  auto const ex = LoadTraining(f.path);
  REQUIRE(ex.size() == 1);
  CHECK(ex[0].context_tokens == std::vector<std::string>{"flights", "to", "lima", ",", "peru"});
  CHECK(ex[0].toponym_spans == std::vector<TokenSpan>{{2, 3}});
}

TEST_CASE("round trip of 100 records")
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lat(-90, 90), lng(-180, 180);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 100; ++i)
  {
    EvalRecord r;
    r.dataset_id = i % 2 ? "lgl" : "wiktor";
    r.doc_id = "doc" + std::to_string(i);
    size_t const n = 3 + rng() % 30;
    for (size_t k = 0; k < n; ++k)
      r.example.context_tokens.push_back("tok" + std::to_string(rng() % 50));
    size_t const a = rng() % (n - 1);
    r.example.target_span = {a, a + 1};
    r.example.toponym_spans = {r.example.target_span};
    if (a > 0)
      r.example.toponym_spans.insert(r.example.toponym_spans.begin(), TokenSpan{0, 1});
    r.example.gold = {lat(rng), lng(rng)};
    r.mention = TargetSurface(r.example);
    if (i % 3 == 0)
      r.entity_key = "Q" + std::to_string(i);
    records.push_back(std::move(r));
  }
  std::ostringstream out;
  WriteEval(out, records);
  TempFile f("roundtrip.jsonl", out.str());
  CHECK(LoadEval(f.path) == records);

  std::vector<TrainingExample> examples;
  for (auto const & r : records)
    examples.push_back(r.example);
  std::ostringstream tout;
  WriteTraining(tout, examples);
  TempFile g("roundtrip_train.jsonl", tout.str());
  CHECK(LoadTraining(g.path) == examples);
}

TEST_CASE("Santa Cruz sign flip")
{
  std::vector<EvalRecord> records{Record("santa_cruz_nm", {35, 106}), Record("lima", {-12.05, -77.04})};
  std::vector<CoordinatePatch> const patches{{"santa_cruz_nm", {35, -106}, LatLng{35, 106}}};
  PatchReport report;
  auto const out = ApplyPatches(records, patches, report);
  CHECK(out[0].example.gold == LatLng{35, -106});
  CHECK(out[1] == records[1]);
  CHECK(report.applied == 1);
  CHECK(report.mismatched == 0);
  CHECK(report.flagged.empty());
}

TEST_CASE("Canada unified to one coordinate")
{
  std::vector<EvalRecord> records{Record("canada", {60.0, -95.0}), Record("canada", {60.0, -96.0}),
                                  Record("canada", {45.4, -75.7})};
  LatLng const unified{56.0, -109.0};
  std::vector<CoordinatePatch> const patches{{"canada", unified, std::nullopt}};
  PatchReport report;
  auto const out = ApplyPatches(records, patches, report);
  for (auto const & r : out)
    CHECK(r.example.gold == unified);
  CHECK(report.applied == 3);

  // Applying the same patches again changes nothing.
  PatchReport again;
  CHECK(ApplyPatches(out, patches, again) == out);
}

TEST_CASE("empty patch set and mismatches")
{
  std::vector<EvalRecord> records{Record("a", {1, 2}), Record("b", {3, 4})};
  PatchReport report;
  CHECK(ApplyPatches(records, {}, report) == records);
  CHECK(report.applied == 0);

  std::vector<CoordinatePatch> const patches{{"b", {5, 6}, LatLng{3.5, 4}}};
  auto const out = ApplyPatches(records, patches, report);
  CHECK(out[1].example.gold == LatLng{5, 6});
  CHECK(report.applied == 1);
  CHECK(report.mismatched == 1);
  CHECK(report.flagged == std::vector<size_t>{1});
  CHECK(report.warnings.size() == 1);
}

TEST_CASE("patch file loading")
{
  TempFile f("patches.jsonl",
             "{\"entity_key\": \"santa_cruz_nm\", \"lat\": 35, \"lng\": -106, \"old_lat\": 35, \"old_lng\": 106}\n"
             "{\"entity_key\": \"canada\", \"lat\": 56, \"lng\": -109}\n");
  auto const p = LoadPatches(f.path);
  REQUIRE(p.size() == 2);
  CHECK(p[0].expected_old == LatLng{35, 106});
  CHECK_FALSE(p[1].expected_old.has_value());
  TempFile g("patches_bad.jsonl", "{\"entity_key\": \"x\", \"lat\": 1, \"lng\": 2, \"old_lat\": 1}\n");
  CHECK_THROWS_AS(LoadPatches(g.path), ParseError);
}

namespace
{
std::vector<std::string> Tokens(size_t n)
{
  std::vector<std::string> t;
  for (size_t i = 0; i < n; ++i)
    t.push_back("w" + std::to_string(i));
  return t;
}
}  // namespace

TEST_CASE("context window: single short sentence")
{
  auto const doc = Tokens(10);
  std::vector<TokenSpan> const sentences{{0, 10}};
  std::vector<TokenSpan> const toponyms{{3, 4}};
  auto const w = MakeContextWindow(doc, sentences, toponyms, {3, 4}, {1, 2}, 400);
  CHECK(w.example.context_tokens == doc);
  CHECK(w.offset == 0);
  CHECK_FALSE(w.truncated);
  CHECK(w.example.target_span == TokenSpan{3, 4});
}

TEST_CASE("context window: five sentences of 100 tokens")
{
  // Target in sentence 3. Growth: +s2 (200), +s4 (300), +s1 (400), s5 does
  // not fit. Result: sentences 1-4.
  auto const doc = Tokens(500);
  std::vector<TokenSpan> const sentences{{0, 100}, {100, 200}, {200, 300}, {300, 400}, {400, 500}};
  std::vector<TokenSpan> const toponyms{{50, 51}, {250, 252}, {450, 451}};
  auto const w = MakeContextWindow(doc, sentences, toponyms, {250, 252}, {1, 2}, 400);
  CHECK(w.offset == 0);
  CHECK(w.example.context_tokens.size() == 400);
  CHECK(w.example.context_tokens.front() == "w0");
  CHECK(w.example.context_tokens.back() == "w399");
  CHECK(w.example.target_span == TokenSpan{250, 252});
  CHECK(w.example.toponym_spans == std::vector<TokenSpan>{{50, 51}, {250, 252}});
  CHECK_NOTHROW(Validate(w.example));
}

TEST_CASE("context window: whole short document")
{
  auto const doc = Tokens(350);
  std::vector<TokenSpan> const sentences{{0, 120}, {120, 200}, {200, 350}};
  std::vector<TokenSpan> const toponyms{{130, 131}};
  auto const w = MakeContextWindow(doc, sentences, toponyms, {130, 131}, {1, 2}, 400);
  CHECK(w.example.context_tokens == doc);
  CHECK(w.offset == 0);
}

TEST_CASE("context window: oversized target sentence is truncated")
{
  auto const doc = Tokens(1000);
  std::vector<TokenSpan> const sentences{{0, 10}, {10, 990}, {990, 1000}};
  std::vector<TokenSpan> const toponyms{{500, 501}};
  auto const w = MakeContextWindow(doc, sentences, toponyms, {500, 501}, {1, 2}, 400);
  CHECK(w.truncated);
  CHECK(w.example.context_tokens.size() == 400);
  CHECK(w.offset >= 10);
  CHECK(w.offset + 400 <= 990);
  auto const & t = w.example.target_span;
  CHECK(w.example.context_tokens[t.start] == "w500");
  CHECK_NOTHROW(Validate(w.example));
}
