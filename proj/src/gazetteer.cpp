#include "geocell/gazetteer.hpp"

#include "geocell/error.hpp"
#include "geocell/geodesy.hpp"
#include "geocell/tokenizer.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace geocell
{
namespace
{
std::vector<Candidate> const kNoCandidates;

std::vector<Candidate> const & CandidatesOrThrow(Gazetteer const & g, std::string const & mention)
{
  auto const & candidates = g.Lookup(mention);
  if (candidates.empty())
    throw NoCandidateError("no gazetteer candidates for '" + mention + "'");
  return candidates;
}

uint64_t ParsePopulation(std::string const & field)
{
  char * end = nullptr;
  double const v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || !std::isfinite(v) || v < 0)
    throw ParseError("bad population '" + field + "'");
  return static_cast<uint64_t>(std::llround(v));
}

double ParseDouble(std::string const & field, char const * what)
{
  char * end = nullptr;
  double const v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw ParseError(std::string("bad ") + what + " '" + field + "'");
  return v;
}
}  // namespace

void Gazetteer::Add(std::string const & mention, Candidate candidate)
{
  std::string const key = FoldCase(mention);
  auto & list = m_entries[key];
  bool merged = false;
  for (auto & existing : list)
  {
    if (existing.name == candidate.name && existing.location == candidate.location)
    {
      existing.population = std::max(existing.population, candidate.population);
      merged = true;
      break;
    }
  }
  if (!merged)
    list.push_back(std::move(candidate));
  uint64_t & maxPop = m_maxPopulation[key];
  for (auto const & c : list)
    maxPop = std::max(maxPop, c.population);
}

std::vector<Candidate> const & Gazetteer::Lookup(std::string const & mention) const
{
  auto const it = m_entries.find(FoldCase(mention));
  return it == m_entries.end() ? kNoCandidates : it->second;
}

bool Gazetteer::Contains(std::string const & mention) const
{
  return m_entries.contains(FoldCase(mention));
}

uint64_t Gazetteer::MaxPopulation(std::string const & mention) const
{
  auto const it = m_maxPopulation.find(FoldCase(mention));
  return it == m_maxPopulation.end() ? 0 : it->second;
}

Gazetteer LoadGazetteer(std::string const & path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open gazetteer '" + path + "'");
  Gazetteer g;
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line))
  {
    ++lineNo;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      continue;
    try
    {
      std::string mention;
      Candidate c;
      if (line[line.find_first_not_of(" \t")] == '{')
      {
        json const j = json::parse(line);
        mention = j.at("mention").get<std::string>();
        c.name = j.at("name").get<std::string>();
        c.location = Normalized({j.at("lat").get<double>(), j.at("lng").get<double>()});
        auto const & pop = j.at("population");
        if (!pop.is_number() || pop.get<double>() < 0)
          throw ParseError("population must be a non-negative number");
        c.population = pop.is_number_unsigned() ? pop.get<uint64_t>()
                                                : static_cast<uint64_t>(std::llround(pop.get<double>()));
      }
      else
      {
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, '\t'))
          fields.push_back(field);
        if (lineNo == 1 && !fields.empty() && FoldCase(fields[0]) == "mention")
          continue;
        if (fields.size() != 5)
          throw ParseError("expected 5 tab-separated columns, got " + std::to_string(fields.size()));
        mention = fields[0];
        c.name = fields[1];
        c.location = Normalized({ParseDouble(fields[2], "latitude"), ParseDouble(fields[3], "longitude")});
        c.population = ParsePopulation(fields[4]);
      }
      if (mention.empty())
        throw ParseError("empty mention");
      g.Add(mention, std::move(c));
    }
    catch (json::exception const & e)
    {
      throw ParseError(AtLine(path, lineNo) + e.what());
    }
    catch (Error const & e)
    {
      throw ParseError(AtLine(path, lineNo) + e.what());
    }
  }
  return g;
}

void WriteGazetteer(std::ostream & out, Gazetteer const & g)
{
  for (auto const & [mention, candidates] : g.entries())
  {
    for (auto const & c : candidates)
    {
      json const j = {{"mention", mention},
                      {"name", c.name},
                      {"lat", c.location.lat},
                      {"lng", c.location.lng},
                      {"population", c.population}};
      out << j.dump() << '\n';
    }
  }
}

Candidate const & PopBaseline(Gazetteer const & g, std::string const & mention)
{
  auto const & candidates = CandidatesOrThrow(g, mention);
  Candidate const * best = &candidates.front();
  for (auto const & c : candidates)
  {
    if (c.population > best->population || (c.population == best->population && c.name < best->name))
      best = &c;
  }
  return *best;
}

double DiscountedDistance(Candidate const & candidate, LatLng p, double c, uint64_t max_population)
{
  double const ratio = max_population == 0
                           ? 0.0
                           : static_cast<double>(candidate.population) / static_cast<double>(max_population);
  return GreatCircleKm(p, candidate.location) * (1 - c * ratio);
}

Candidate const & ConstrainedSelect(Gazetteer const & g, std::string const & mention, LatLng p, double c)
{
  if (!(c >= 0 && c <= 1))
    throw InvalidArgument("population bias must lie in [0, 1]");
  auto const & candidates = CandidatesOrThrow(g, mention);
  uint64_t const maxPop = g.MaxPopulation(mention);

  Candidate const * best = nullptr;
  double bestObjective = 0, bestDistance = 0;
  for (auto const & cand : candidates)
  {
    double const distance = GreatCircleKm(p, cand.location);
    double const objective = DiscountedDistance(cand, p, c, maxPop);
    bool better = best == nullptr || objective < bestObjective;
    if (!better && objective == bestObjective)
      better = distance < bestDistance || (distance == bestDistance && cand.name < best->name);
    if (better)
    {
      best = &cand;
      bestObjective = objective;
      bestDistance = distance;
    }
  }
  return *best;
}
}  // namespace geocell
