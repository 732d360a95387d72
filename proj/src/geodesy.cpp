#include "geocell/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geocell
{
double GreatCircleKm(LatLng const & a, LatLng const & b)
{
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  double const phi1 = a.lat * kDegToRad;
  double const phi2 = b.lat * kDegToRad;
  double const dphi = (b.lat - a.lat) * kDegToRad;
  double const dlambda = (b.lng - a.lng) * kDegToRad;
  double const sdphi = std::sin(dphi / 2);
  double const sdlambda = std::sin(dlambda / 2);
  double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlambda * sdlambda;
  h = std::clamp(h, 0.0, 1.0);
  return 2 * kEarthRadiusKm * std::asin(std::sqrt(h));
}
}  // namespace geocell
