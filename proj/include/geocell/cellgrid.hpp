#pragma once

// Hierarchical cube-face Hilbert-curve cells, bit-compatible with the S2
// 64-bit cell id encoding for levels 0..12.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace geocell
{
struct LatLng
{
  double lat = 0.0;  // degrees, [-90, 90]
  double lng = 0.0;  // degrees, [-180, 180)

  friend bool operator==(LatLng const &, LatLng const &) = default;
};

// Clamps latitude and wraps longitude into [-180, 180).
LatLng Normalized(LatLng p);

inline constexpr int kMaxLevel = 12;
// Depth of the underlying discrete (i, j) grid on each face.
inline constexpr int kLeafLevel = 30;
inline constexpr int kFaceBits = 3;
inline constexpr int kNumFaces = 6;
inline constexpr int kPosBits = 2 * kLeafLevel + 1;
inline constexpr uint64_t kEarthAreaKm2 = 510065622;

class CellId
{
public:
  constexpr CellId() = default;
  constexpr explicit CellId(uint64_t id) : m_id(id) {}

  // Cell whose face and Hilbert position are given at the requested level.
  static CellId FromFacePos(int face, uint64_t pos, int level);
  // Inverse of ClassIndex(): the index-th cell at `level` along the curve.
  static CellId FromClassIndex(uint64_t index, int level);

  constexpr uint64_t id() const { return m_id; }
  int level() const;
  int face() const { return static_cast<int>(m_id >> kPosBits); }
  // Position of the cell among the 6 * 4^level cells of its level.
  uint64_t ClassIndex() const;
  uint64_t lsb() const { return m_id & (~m_id + 1); }

  // Nonzero id with face < 6, a single sentinel bit at an even offset and
  // a level no finer than kMaxLevel.
  bool IsValid() const;

  friend constexpr auto operator<=>(CellId const &, CellId const &) = default;

private:
  uint64_t m_id = 0;
};

CellId CellFromLatLng(LatLng p, int level);

std::string CellToToken(CellId c);
CellId TokenToCell(std::string_view token);

// Ancestor at `level`; `level` must not exceed c.level().
CellId Parent(CellId c, int level);

LatLng CellCenter(CellId c);

uint64_t NumCells(int level);
double AvgCellAreaKm2(int level);
}  // namespace geocell
