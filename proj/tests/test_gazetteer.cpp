#include "geocell/error.hpp"
#include "geocell/gazetteer.hpp"
#include "geocell/geodesy.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

using namespace geocell;

namespace
{
Candidate const kParisFrance{"Paris, France", {48.8566, 2.3522}, 2100000};
Candidate const kParisTexas{"Paris, Texas", {33.6609, -95.5555}, 25000};

struct TempFile
{
  std::string path;
  explicit TempFile(std::string const & name, std::string const & content)
      : path((std::filesystem::temp_directory_path() / ("geocell_gaz_" + name)).string())
  {
    std::ofstream(path) << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

// Exhaustive evaluation: smallest (objective, distance, name).
Candidate BruteForce(std::vector<Candidate> const & cands, LatLng p, double c)
{
  uint64_t maxPop = 0;
  for (auto const & x : cands)
    maxPop = std::max(maxPop, x.population);
  std::vector<std::tuple<double, double, std::string, size_t>> scored;
  for (size_t i = 0; i < cands.size(); ++i)
  {
    double const d = GreatCircleKm(p, cands[i].location);
    double const ratio = maxPop == 0 ? 0.0 : double(cands[i].population) / double(maxPop);
    scored.emplace_back(d * (1 - c * ratio), d, cands[i].name, i);
  }
  return cands[std::get<3>(*std::min_element(scored.begin(), scored.end()))];
}

std::vector<Candidate> RandomCandidates(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> lat(-80, 80), lng(-180, 180);
  size_t const n = 1 + rng() % 8;
  std::vector<Candidate> out;
  for (size_t i = 0; i < n; ++i)
    out.push_back({"cand" + std::to_string(rng() % 1000), {lat(rng), lng(rng)}, rng() % 5 == 0 ? 0 : rng() % 1000000});
  return out;
}
}  // namespace

TEST_CASE("Paris: population baseline picks France")
{
  Gazetteer g;
  g.Add("Paris", kParisTexas);
  g.Add("paris", kParisFrance);
  CHECK(PopBaseline(g, "PARIS") == kParisFrance);
  CHECK(g.MaxPopulation("paris") == 2100000);
  CHECK(g.Lookup("paris").size() == 2);
}

TEST_CASE("population baseline ties and errors")
{
  Gazetteer g;
  g.Add("springfield", {"Springfield, MO", {37.2, -93.3}, 1000});
  g.Add("springfield", {"Springfield, IL", {39.8, -89.6}, 1000});
  CHECK(PopBaseline(g, "springfield").name == "Springfield, IL");
  g.Add("lima", {"Lima", {-12.05, -77.04}, 9});
  CHECK(PopBaseline(g, "lima").name == "Lima");
  CHECK_THROWS_AS(PopBaseline(g, "atlantis"), NoCandidateError);
  CHECK_THROWS_AS(ConstrainedSelect(g, "atlantis", {0, 0}, 0.9), NoCandidateError);
  CHECK(g.Lookup("atlantis").empty());
}

TEST_CASE("constrained selection extremes")
{
  Gazetteer g;
  g.Add("paris", kParisFrance);
  g.Add("paris", kParisTexas);
  LatLng const dallas{32.78, -96.80};
  CHECK(ConstrainedSelect(g, "paris", dallas, 0.0) == kParisTexas);
  CHECK(ConstrainedSelect(g, "paris", dallas, 1.0) == kParisFrance);
  CHECK(ConstrainedSelect(g, "paris", dallas, 0.9) == kParisTexas);
  CHECK(ConstrainedSelect(g, "paris", {45.0, 0.0}, 0.9) == kParisFrance);
  CHECK_THROWS_AS(ConstrainedSelect(g, "paris", dallas, 1.5), InvalidArgument);
  CHECK_THROWS_AS(ConstrainedSelect(g, "paris", dallas, -0.1), InvalidArgument);
}

TEST_CASE("constrained selection, four candidates at c = 0.90")
{
  std::vector<Candidate> const cands{{"A", {10, 10}, 1000000},
                                     {"B", {12, 12}, 200000},
                                     {"C", {10.5, 10.2}, 1000},
                                     {"D", {-30, 100}, 900000}};
  Gazetteer g;
  for (auto const & c : cands)
    g.Add("x", c);
  // Objectives computed by hand (km): near C, A = 5.91 and C = 1.56; at
  // (10.4, 10.3), A = 5.53 and C = 15.58; at (11.9, 11.9), B = 12.76 and
  // A = 29.61.
  struct Case
  {
    LatLng p;
    char const * name;
  };
  for (Case const & k : {Case{{10.49, 10.21}, "C"}, Case{{10.4, 10.3}, "A"}, Case{{11.9, 11.9}, "B"}})
  {
    CHECK(ConstrainedSelect(g, "x", k.p, 0.9).name == k.name);
    CHECK(BruteForce(cands, k.p, 0.9).name == k.name);
  }
}

TEST_CASE("zero populations fall back to distance")
{
  Gazetteer g;
  g.Add("x", {"near", {1, 1}, 0});
  g.Add("x", {"far", {20, 20}, 0});
  CHECK(ConstrainedSelect(g, "x", {0, 0}, 0.9).name == "near");
}

TEST_CASE("random fixtures match exhaustive evaluation")
{
  std::mt19937_64 rng(211);
  std::uniform_real_distribution<double> lat(-80, 80), lng(-180, 180);
  for (int trial = 0; trial < 1000; ++trial)
  {
    auto const cands = RandomCandidates(rng);
    Gazetteer g;
    for (auto const & c : cands)
      g.Add("m", c);
    std::vector<Candidate> const stored = g.Lookup("m");
    LatLng const p{lat(rng), lng(rng)};
    for (double c : {0.0, 0.5, 0.9, 1.0})
      CHECK(ConstrainedSelect(g, "m", p, c) == BruteForce(stored, p, c));
  }
}

TEST_CASE("increasing a candidate's population never makes it lose")
{
  std::mt19937_64 rng(223);
  std::uniform_real_distribution<double> lat(-80, 80), lng(-180, 180);
  for (int trial = 0; trial < 300; ++trial)
  {
    auto cands = RandomCandidates(rng);
    LatLng const p{lat(rng), lng(rng)};
    Gazetteer g;
    for (auto const & c : cands)
      g.Add("m", c);
    Candidate const winner = ConstrainedSelect(g, "m", p, 0.9);
    Gazetteer boosted;
    for (auto c : g.Lookup("m"))
    {
      if (c == winner)
        c.population += 1 + rng() % 100000;
      boosted.Add("m", c);
    }
    CHECK(ConstrainedSelect(boosted, "m", p, 0.9).name == winner.name);
  }
}

TEST_CASE("duplicates keep the larger population")
{
  Gazetteer g;
  g.Add("lima", {"Lima", {-12.05, -77.04}, 10});
  g.Add("LIMA", {"Lima", {-12.05, -77.04}, 30});
  g.Add("lima", {"Lima", {-12.05, -77.04}, 20});
  g.Add("lima", {"Lima, Ohio", {40.74, -84.1}, 5});
  REQUIRE(g.Lookup("lima").size() == 2);
  CHECK(g.Lookup("lima")[0].population == 30);
}

TEST_CASE("loading and round trip")
{
  TempFile empty("empty.tsv", "");
  Gazetteer const none = LoadGazetteer(empty.path);
  CHECK(none.size() == 0);
  CHECK(none.Lookup("paris").empty());

  TempFile tsv("fixture.tsv",
               "mention\tname\tlat\tlng\tpopulation\n"
               "Paris\tParis, France\t48.8566\t2.3522\t2100000\n"
               "Paris\tParis, Texas\t33.6609\t-95.5555\t25000\n"
               "Lima\tLima\t-12.05\t-77.04\t9750000\n");
  Gazetteer const g = LoadGazetteer(tsv.path);
  CHECK(g.Lookup("paris").size() == 2);
  CHECK(PopBaseline(g, "paris") == kParisFrance);

  std::ostringstream out;
  WriteGazetteer(out, g);
  TempFile jsonl("fixture.jsonl", out.str());
  CHECK(LoadGazetteer(jsonl.path) == g);

  TempFile bad("bad.tsv", "Paris\tParis, France\t48.8566\t2.3522\n");
  try
  {
    LoadGazetteer(bad.path);
    FAIL("expected a parse error");
  }
  catch (ParseError const & e)
  {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
}
