#pragma once

// Synthetic geocoding corpus: a fixed set of well-separated locations, each
// with its own disjoint vocabulary signature.

#include "geocell/corpus.hpp"

#include <random>
#include <string>
#include <vector>

namespace geocell::testing
{
struct SyntheticPlace
{
  std::string name;
  LatLng location;
};

// Twenty cities, pairwise at least ~900 km apart.
inline std::vector<SyntheticPlace> const & SyntheticPlaces()
{
  static std::vector<SyntheticPlace> const places{
      {"london", {51.5074, -0.1278}},     {"cairo", {30.0444, 31.2357}},
      {"lagos", {6.5244, 3.3792}},        {"nairobi", {-1.2921, 36.8219}},
      {"capetown", {-33.9249, 18.4241}},  {"moscow", {55.7558, 37.6173}},
      {"mumbai", {19.0760, 72.8777}},     {"beijing", {39.9042, 116.4074}},
      {"tokyo", {35.6762, 139.6503}},     {"jakarta", {-6.2088, 106.8456}},
      {"sydney", {-33.8688, 151.2093}},   {"auckland", {-36.8485, 174.7633}},
      {"honolulu", {21.3069, -157.8583}}, {"anchorage", {61.2181, -149.9003}},
      {"denver", {39.7392, -104.9903}},   {"newyork", {40.7128, -74.0060}},
      {"mexicocity", {19.4326, -99.1332}},{"lima", {-12.0464, -77.0428}},
      {"buenosaires", {-34.6037, -58.3816}}, {"reykjavik", {64.1466, -21.9426}},
  };
  return places;
}

inline constexpr size_t kSignatureSize = 30;

// Each example: the place name as the target toponym, a second
// place-specific toponym ("<name>region"), signature tokens of the place
// and shared filler words.
inline std::vector<TrainingExample> SyntheticCorpus(size_t n, uint64_t seed, size_t length = 24)
{
  auto const & places = SyntheticPlaces();
  std::mt19937_64 rng(seed);
  std::vector<std::string> const filler{"the", "of", "in", "a", "and", "to", "was", "near"};
  std::vector<TrainingExample> out;
  for (size_t i = 0; i < n; ++i)
  {
    size_t const k = i % places.size();
    TrainingExample ex;
    for (size_t t = 0; t < length; ++t)
    {
      if (rng() % 4 == 0)
        ex.context_tokens.push_back(filler[rng() % filler.size()]);
      else
        ex.context_tokens.push_back("p" + std::to_string(k) + "w" + std::to_string(rng() % kSignatureSize));
    }
    size_t const target = rng() % (length / 2);
    size_t const region = length / 2 + rng() % (length / 2);
    ex.context_tokens[target] = places[k].name;
    ex.context_tokens[region] = places[k].name + "region";
    ex.target_span = {target, target + 1};
    ex.toponym_spans = {ex.target_span, {region, region + 1}};
    ex.gold = places[k].location;
    out.push_back(std::move(ex));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}
}  // namespace geocell::testing
