#include "geocell/cellgrid.hpp"
#include "geocell/error.hpp"
#include "geocell/geodesy.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace geocell;

namespace
{
LatLng RandomPoint(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0), lng(-180.0, 180.0);
  return {std::asin(u(rng)) * 180.0 / M_PI, lng(rng)};
}
}  // namespace

TEST_CASE("NYC tokens")
{
  LatLng const nyc{40.7128, -74.0060};
  CHECK(CellToToken(CellFromLatLng(nyc, 8)) == "89c25");
  CHECK(CellToToken(CellFromLatLng(nyc, 5)) == "89c4");
  CHECK(Parent(CellFromLatLng(nyc, 8), 5) == CellFromLatLng(nyc, 5));
  CHECK(CellFromLatLng(nyc, 8).level() == 8);
}

TEST_CASE("origin at level 0 is the first face cell")
{
  CellId const c = CellFromLatLng({0.0, 0.0}, 0);
  CHECK(CellToToken(c) == "1");
  CHECK(c.face() == 0);
  CHECK(c.level() == 0);
}

TEST_CASE("reference encoder oracle")
{
  std::ifstream in(GEOCELL_TEST_DATA "/s2_oracle.tsv");
  REQUIRE(in);
  std::string line;
  size_t rows = 0, tokenMismatches = 0;
  double worstCenter = 0;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream fields(line);
    double lat, lng, clat, clng;
    int level;
    std::string token;
    fields >> lat >> lng >> level >> token >> clat >> clng;
    REQUIRE(fields);
    CellId const c = CellFromLatLng({lat, lng}, level);
    if (CellToToken(c) != token)
    {
      ++tokenMismatches;
      MESSAGE("mismatch at " << lat << ", " << lng << " level " << level << ": " << CellToToken(c)
                             << " vs " << token);
    }
    CHECK(TokenToCell(token) == c);
    LatLng const center = CellCenter(c);
    double dlng = std::fabs(center.lng - clng);
    dlng = std::min(dlng, 360.0 - dlng);
    worstCenter = std::max({worstCenter, std::fabs(center.lat - clat), std::abs(clat) > 89.999999 ? 0.0 : dlng});
    ++rows;
  }
  CHECK(rows >= 10000);
  CHECK(tokenMismatches == 0);
  CHECK(worstCenter < 1e-9);
}

TEST_CASE("token round trip")
{
  std::mt19937_64 rng(7);
  for (int n = 0; n < 2000; ++n)
  {
    LatLng const p = RandomPoint(rng);
    int const level = static_cast<int>(rng() % (kMaxLevel + 1));
    CellId const c = CellFromLatLng(p, level);
    CHECK(c.IsValid());
    std::string const token = CellToToken(c);
    CHECK(token.size() <= 16);
    CHECK(token.back() != '0');
    CHECK(TokenToCell(token) == c);
    CHECK(CellId::FromClassIndex(c.ClassIndex(), level) == c);
  }
}

TEST_CASE("malformed tokens")
{
  CHECK_THROWS_AS(TokenToCell(""), ParseError);
  CHECK_THROWS_AS(TokenToCell("89cg"), ParseError);
  CHECK_THROWS_AS(TokenToCell("0123456789abcdef0"), ParseError);
  CHECK_THROWS_AS(TokenToCell("X"), ParseError);
  // Level 13 cell: finer than supported.
  CHECK_THROWS_AS(TokenToCell("89c25a24"), ParseError);
  CHECK(TokenToCell("89C25") == TokenToCell("89c25"));
}

TEST_CASE("invalid levels")
{
  CHECK_THROWS_AS(CellFromLatLng({0, 0}, -1), InvalidArgument);
  CHECK_THROWS_AS(CellFromLatLng({0, 0}, 13), InvalidArgument);
  CHECK_THROWS_AS(CellFromLatLng({91, 0}, 3), InvalidArgument);
  CHECK_THROWS_AS(CellFromLatLng({NAN, 0}, 3), InvalidArgument);
  CellId const c = CellFromLatLng({10, 10}, 5);
  CHECK_THROWS_AS(Parent(c, 6), InvalidArgument);
  CHECK(Parent(c, 5) == c);
}

TEST_CASE("longitude wraps")
{
  CHECK(CellFromLatLng({10, 190}, 9) == CellFromLatLng({10, -170}, 9));
  CHECK(CellFromLatLng({10, 180}, 9) == CellFromLatLng({10, -180}, 9));
}

TEST_CASE("parent agrees with direct encoding")
{
  std::mt19937_64 rng(11);
  for (int n = 0; n < 1000; ++n)
  {
    LatLng const p = RandomPoint(rng);
    int const fine = static_cast<int>(rng() % (kMaxLevel + 1));
    int const coarse = static_cast<int>(rng() % (fine + 1));
    CHECK(Parent(CellFromLatLng(p, fine), coarse) == CellFromLatLng(p, coarse));
  }
}

TEST_CASE("cell centres lie in their cell")
{
  std::mt19937_64 rng(13);
  for (int n = 0; n < 1000; ++n)
  {
    LatLng const p = RandomPoint(rng);
    int const level = static_cast<int>(rng() % (kMaxLevel + 1));
    CellId const c = CellFromLatLng(p, level);
    CHECK(CellFromLatLng(CellCenter(c), level) == c);
  }
}

TEST_CASE("level-7 centre within 90 km of any point in the cell")
{
  std::mt19937_64 rng(17);
  double worst = 0;
  for (int n = 0; n < 20000; ++n)
  {
    LatLng const p = RandomPoint(rng);
    worst = std::max(worst, GreatCircleKm(p, CellCenter(CellFromLatLng(p, 7))));
  }
  CHECK(worst <= 90.0);
}

TEST_CASE("face centres")
{
  LatLng const expected[6] = {{0, 0}, {0, 90}, {90, 0}, {0, -180}, {0, -90}, {-90, 0}};
  for (int face = 0; face < 6; ++face)
  {
    LatLng const c = CellCenter(CellId::FromFacePos(face, 0, 0));
    CHECK(c.lat == doctest::Approx(expected[face].lat).epsilon(1e-12));
    if (std::fabs(expected[face].lat) < 90)
      CHECK(std::fabs(std::remainder(c.lng - expected[face].lng, 360.0)) < 1e-12);
  }
}

TEST_CASE("class indices are contiguous per level")
{
  for (int level = 0; level <= 3; ++level)
  {
    uint64_t const n = NumCells(level);
    for (uint64_t i = 0; i < n; ++i)
    {
      CellId const c = CellId::FromClassIndex(i, level);
      CHECK(c.level() == level);
      CHECK(c.ClassIndex() == i);
      CHECK(c.face() == static_cast<int>(i >> (2 * level)));
      if (level > 0)
        CHECK(Parent(c, level - 1).ClassIndex() == i >> 2);
    }
  }
  CHECK_THROWS_AS(CellId::FromClassIndex(NumCells(4), 4), InvalidArgument);
}

TEST_CASE("cell counts and areas")
{
  CHECK(NumCells(0) == 6);
  CHECK(NumCells(4) == 1536);
  CHECK(NumCells(5) == 6144);
  CHECK(NumCells(6) == 24576);
  CHECK(NumCells(7) == 98304);
  CHECK(NumCells(8) == 393216);
  CHECK(std::lround(AvgCellAreaKm2(4) / 1000.0) == 332);
  CHECK(std::lround(AvgCellAreaKm2(5) / 1000.0) == 83);
  CHECK(std::lround(AvgCellAreaKm2(6) / 1000.0) == 21);
  CHECK(std::lround(AvgCellAreaKm2(7) / 1000.0) == 5);
  CHECK(std::lround(AvgCellAreaKm2(8) / 1000.0) == 1);
  CHECK(AvgCellAreaKm2(7) == doctest::Approx(5188.655822753906).epsilon(1e-12));
  for (int level = 0; level < kLeafLevel; ++level)
    CHECK(NumCells(level + 1) == 4 * NumCells(level));
  CHECK_THROWS_AS(NumCells(31), InvalidArgument);
}
