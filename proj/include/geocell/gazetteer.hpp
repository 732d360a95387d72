#pragma once

#include "geocell/cellgrid.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace geocell
{
struct Candidate
{
  std::string name;
  LatLng location;
  uint64_t population = 0;

  friend bool operator==(Candidate const &, Candidate const &) = default;
};

// Alias table from case-folded mention strings to candidate locations.
class Gazetteer
{
public:
  // Adds a candidate unless an identical (mention, name, location) entry
  // exists, in which case the larger population is kept.
  void Add(std::string const & mention, Candidate candidate);

  // Empty when the mention is unknown.
  std::vector<Candidate> const & Lookup(std::string const & mention) const;
  bool Contains(std::string const & mention) const;
  // Largest candidate population for the mention; 0 when unknown.
  uint64_t MaxPopulation(std::string const & mention) const;

  size_t size() const { return m_entries.size(); }
  std::map<std::string, std::vector<Candidate>> const & entries() const { return m_entries; }

  friend bool operator==(Gazetteer const &, Gazetteer const &) = default;

private:
  std::map<std::string, std::vector<Candidate>> m_entries;
  std::map<std::string, uint64_t> m_maxPopulation;
};

// JSONL lines {mention, name, lat, lng, population} or TSV rows with those
// columns in that order (an optional header row starting with "mention" is
// skipped). The format is chosen per line: lines starting with '{' are JSON.
Gazetteer LoadGazetteer(std::string const & path);
void WriteGazetteer(std::ostream & out, Gazetteer const & g);

// Most populous candidate; ties go to the lexicographically smallest name.
Candidate const & PopBaseline(Gazetteer const & g, std::string const & mention);

// argmin over candidates of dist(p, l) * (1 - c * pop(l) / pop(m)), where
// pop(m) is the mention's largest population. Ties go to the smaller
// distance, then the smaller name. When pop(m) is 0 the ratio is taken as 0.
Candidate const & ConstrainedSelect(Gazetteer const & g, std::string const & mention, LatLng p, double c);

// Population-discounted distance of a single candidate.
double DiscountedDistance(Candidate const & candidate, LatLng p, double c, uint64_t max_population);
}  // namespace geocell
