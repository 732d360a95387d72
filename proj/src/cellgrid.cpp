#include "geocell/cellgrid.hpp"

#include "geocell/error.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>

namespace geocell
{
namespace
{
constexpr int kLookupBits = 4;
constexpr int kSwapMask = 0x01;
constexpr int kInvertMask = 0x02;
constexpr int kMaxSize = 1 << kLeafLevel;

// Hilbert sub-cell traversal per orientation: position -> (i bit, j bit).
constexpr int kPosToIJ[4][4] = {
    {0, 1, 3, 2},  // canonical order
    {0, 2, 3, 1},  // axes swapped
    {3, 2, 0, 1},  // bits inverted
    {3, 1, 0, 2},  // swapped & inverted
};
constexpr int kPosToOrientation[4] = {kSwapMask, 0, 0, kInvertMask | kSwapMask};

struct LookupTables
{
  std::array<uint16_t, 1 << (2 * kLookupBits + 2)> pos{};
  std::array<uint16_t, 1 << (2 * kLookupBits + 2)> ij{};

  LookupTables()
  {
    Fill(0, 0, 0, 0, 0, 0);
    Fill(0, 0, 0, kSwapMask, 0, kSwapMask);
    Fill(0, 0, 0, kInvertMask, 0, kInvertMask);
    Fill(0, 0, 0, kSwapMask | kInvertMask, 0, kSwapMask | kInvertMask);
  }

  void Fill(int level, int i, int j, int origOrientation, int p, int orientation)
  {
    if (level == kLookupBits)
    {
      int const cellIJ = (i << kLookupBits) + j;
      pos[(cellIJ << 2) + origOrientation] = static_cast<uint16_t>((p << 2) + orientation);
      ij[(p << 2) + origOrientation] = static_cast<uint16_t>((cellIJ << 2) + orientation);
      return;
    }
    ++level;
    i <<= 1;
    j <<= 1;
    p <<= 2;
    int const * r = kPosToIJ[orientation];
    for (int k = 0; k < 4; ++k)
    {
      Fill(level, i + (r[k] >> 1), j + (r[k] & 1), origOrientation, p + k,
           orientation ^ kPosToOrientation[k]);
    }
  }
};

LookupTables const & Tables()
{
  static LookupTables const tables;
  return tables;
}

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

uint64_t LsbForLevel(int level) { return uint64_t{1} << (2 * (kLeafLevel - level)); }

void CheckLevel(int level)
{
  if (level < 0 || level > kMaxLevel)
    throw InvalidArgument("cell level " + std::to_string(level) + " outside [0, " +
                          std::to_string(kMaxLevel) + "]");
}

double UVtoST(double u)
{
  if (u >= 0)
    return 0.5 * std::sqrt(1 + 3 * u);
  return 1 - 0.5 * std::sqrt(1 - 3 * u);
}

double STtoUV(double s)
{
  if (s >= 0.5)
    return (1.0 / 3.0) * (4 * s * s - 1);
  return (1.0 / 3.0) * (1 - 4 * (1 - s) * (1 - s));
}

int STtoIJ(double s)
{
  auto const v = static_cast<long long>(std::floor(kMaxSize * s));
  return static_cast<int>(std::max<long long>(0, std::min<long long>(kMaxSize - 1, v)));
}

struct Vec3
{
  double x, y, z;
};

// Largest absolute component; ties resolve the same way as the reference
// library (x only wins strictly, otherwise y beats z only strictly).
int LargestAbsComponent(Vec3 const & p)
{
  double const ax = std::fabs(p.x), ay = std::fabs(p.y), az = std::fabs(p.z);
  if (ax > ay)
    return ax > az ? 0 : 2;
  return ay > az ? 1 : 2;
}

void XYZtoFaceUV(Vec3 const & p, int & face, double & u, double & v)
{
  face = LargestAbsComponent(p);
  double const comp = face == 0 ? p.x : face == 1 ? p.y : p.z;
  if (comp < 0)
    face += 3;
  switch (face)
  {
  case 0: u = p.y / p.x; v = p.z / p.x; break;
  case 1: u = -p.x / p.y; v = p.z / p.y; break;
  case 2: u = -p.x / p.z; v = -p.y / p.z; break;
  case 3: u = p.z / p.x; v = p.y / p.x; break;
  case 4: u = p.z / p.y; v = -p.x / p.y; break;
  default: u = -p.y / p.z; v = -p.x / p.z; break;
  }
}

Vec3 FaceUVtoXYZ(int face, double u, double v)
{
  switch (face)
  {
  case 0: return {1, u, v};
  case 1: return {-u, 1, v};
  case 2: return {-u, -v, 1};
  case 3: return {-1, -v, -u};
  case 4: return {v, -1, -u};
  default: return {v, u, -1};
  }
}

uint64_t LeafFromFaceIJ(int face, int i, int j)
{
  auto const & lookup = Tables().pos;
  uint64_t n = static_cast<uint64_t>(face) << (kPosBits - 1);
  int bits = face & kSwapMask;
  constexpr int kMask = (1 << kLookupBits) - 1;
  for (int k = 7; k >= 0; --k)
  {
    bits += ((i >> (k * kLookupBits)) & kMask) << (kLookupBits + 2);
    bits += ((j >> (k * kLookupBits)) & kMask) << 2;
    bits = lookup[bits];
    n |= static_cast<uint64_t>(bits >> 2) << (k * 2 * kLookupBits);
    bits &= (kSwapMask | kInvertMask);
  }
  return n * 2 + 1;
}

void ToFaceIJ(uint64_t id, int & face, int & i, int & j)
{
  auto const & lookup = Tables().ij;
  face = static_cast<int>(id >> kPosBits);
  int bits = face & kSwapMask;
  i = 0;
  j = 0;
  for (int k = 7; k >= 0; --k)
  {
    int const nbits = (k == 7) ? (kLeafLevel - 7 * kLookupBits) : kLookupBits;
    bits += (static_cast<int>(id >> (k * 2 * kLookupBits + 1)) & ((1 << (2 * nbits)) - 1)) << 2;
    bits = lookup[bits];
    i += (bits >> (kLookupBits + 2)) << (k * kLookupBits);
    j += ((bits >> 2) & ((1 << kLookupBits) - 1)) << (k * kLookupBits);
    bits &= (kSwapMask | kInvertMask);
  }
}
}  // namespace

LatLng Normalized(LatLng p)
{
  if (!std::isfinite(p.lat) || !std::isfinite(p.lng))
    throw InvalidArgument("non-finite coordinate");
  if (p.lat < -90.0 || p.lat > 90.0)
    throw InvalidArgument("latitude " + std::to_string(p.lat) + " outside [-90, 90]");
  if (p.lng >= -180.0 && p.lng < 180.0)
    return p;
  double lng = std::fmod(p.lng + 180.0, 360.0);
  if (lng < 0)
    lng += 360.0;
  p.lng = lng - 180.0;
  return p;
}

CellId CellId::FromFacePos(int face, uint64_t pos, int level)
{
  CheckLevel(level);
  if (face < 0 || face >= kNumFaces || pos >= (uint64_t{1} << (2 * level)))
    throw InvalidArgument("face/position outside the level's range");
  uint64_t const lsb = LsbForLevel(level);
  return CellId((static_cast<uint64_t>(face) << kPosBits) | (pos << (2 * (kLeafLevel - level) + 1)) | lsb);
}

CellId CellId::FromClassIndex(uint64_t index, int level)
{
  CheckLevel(level);
  if (index >= NumCells(level))
    throw InvalidArgument("class index " + std::to_string(index) + " outside level " +
                          std::to_string(level));
  return CellId((index << (2 * (kLeafLevel - level) + 1)) | LsbForLevel(level));
}

int CellId::level() const
{
  return kLeafLevel - (std::countr_zero(m_id) >> 1);
}

uint64_t CellId::ClassIndex() const
{
  return m_id >> (2 * (kLeafLevel - level()) + 1);
}

bool CellId::IsValid() const
{
  if (m_id == 0 || face() >= kNumFaces)
    return false;
  if ((lsb() & 0x1555555555555555ULL) == 0)
    return false;
  return level() <= kMaxLevel;
}

CellId CellFromLatLng(LatLng p, int level)
{
  CheckLevel(level);
  p = Normalized(p);
  double const phi = p.lat * kDegToRad;
  double const theta = p.lng * kDegToRad;
  double const cosphi = std::cos(phi);
  Vec3 const xyz{std::cos(theta) * cosphi, std::sin(theta) * cosphi, std::sin(phi)};

  int face;
  double u, v;
  XYZtoFaceUV(xyz, face, u, v);
  uint64_t const leaf = LeafFromFaceIJ(face, STtoIJ(UVtoST(u)), STtoIJ(UVtoST(v)));
  return Parent(CellId(leaf), level);
}

std::string CellToToken(CellId c)
{
  if (c.id() == 0)
    return "X";
  static constexpr char kHex[] = "0123456789abcdef";
  std::string token(16, '0');
  uint64_t v = c.id();
  for (int k = 15; k >= 0; --k, v >>= 4)
    token[static_cast<size_t>(k)] = kHex[v & 0xf];
  token.erase(token.find_last_not_of('0') + 1);
  return token;
}

CellId TokenToCell(std::string_view token)
{
  if (token.empty() || token.size() > 16)
    throw ParseError("malformed cell token '" + std::string(token) + "'");
  uint64_t v = 0;
  for (char ch : token)
  {
    int digit;
    if (ch >= '0' && ch <= '9')
      digit = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      digit = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F')
      digit = ch - 'A' + 10;
    else
      throw ParseError("malformed cell token '" + std::string(token) + "'");
    v = (v << 4) | static_cast<uint64_t>(digit);
  }
  v <<= 4 * (16 - token.size());
  CellId const c(v);
  if (!c.IsValid())
    throw ParseError("cell token '" + std::string(token) + "' is not a valid level 0-" +
                     std::to_string(kMaxLevel) + " cell");
  return c;
}

CellId Parent(CellId c, int level)
{
  CheckLevel(level);
  if (level > c.level())
    throw InvalidArgument("parent level " + std::to_string(level) + " is finer than cell level " +
                          std::to_string(c.level()));
  uint64_t const lsb = LsbForLevel(level);
  return CellId((c.id() & (~lsb + 1)) | lsb);
}

LatLng CellCenter(CellId c)
{
  int face, i, j;
  ToFaceIJ(c.id(), face, i, j);
  int const size = 1 << (kLeafLevel - c.level());
  // Twice the cell-space coordinate of the centre, on the 2^31 grid.
  auto const si = 2 * static_cast<int64_t>(i & -size) + size;
  auto const ti = 2 * static_cast<int64_t>(j & -size) + size;
  constexpr double kMaxSiTi = static_cast<double>(int64_t{1} << (kLeafLevel + 1));
  Vec3 const xyz = FaceUVtoXYZ(face, STtoUV(static_cast<double>(si) / kMaxSiTi),
                               STtoUV(static_cast<double>(ti) / kMaxSiTi));
  double const lat = std::atan2(xyz.z, std::sqrt(xyz.x * xyz.x + xyz.y * xyz.y)) * kRadToDeg + 0.0;
  double lng = std::atan2(xyz.y, xyz.x) * kRadToDeg;
  if (lng >= 180.0)
    lng -= 360.0;
  return {lat, lng};
}

uint64_t NumCells(int level)
{
  if (level < 0 || level > kLeafLevel)
    throw InvalidArgument("level " + std::to_string(level) + " outside [0, 30]");
  return uint64_t{6} << (2 * level);
}

double AvgCellAreaKm2(int level)
{
  return static_cast<double>(kEarthAreaKm2) / static_cast<double>(NumCells(level));
}
}  // namespace geocell
