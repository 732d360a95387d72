#pragma once

#include "geocell/cellgrid.hpp"

namespace geocell
{
inline constexpr double kEarthRadiusKm = 6371.0;

// Haversine distance on a sphere of radius kEarthRadiusKm.
double GreatCircleKm(LatLng const & a, LatLng const & b);
}  // namespace geocell
