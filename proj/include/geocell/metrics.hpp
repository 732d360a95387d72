#pragma once

#include "geocell/cellgrid.hpp"

#include <span>
#include <string>
#include <vector>

namespace geocell
{
inline constexpr double kAccuracyThresholdKm = 161.0;
// Largest error used to normalise the log-error curve.
inline constexpr double kMaxErrorKm = 20039.0;

struct EvalReport
{
  size_t n = 0;
  double accuracy_at_161 = 0;
  double mean_error_km = 0;
  double auc_log_error = 0;
  std::vector<double> errors;
};

double ErrorKm(LatLng const & pred, LatLng const & gold);

// Fraction of errors <= threshold_km.
double AccuracyAt(std::span<double const> errors, double threshold_km = kAccuracyThresholdKm);
double MeanError(std::span<double const> errors);
// Mean of ln(1 + e) / ln(1 + 20039) over the errors, i.e. the left Riemann
// sum of the sorted normalised log-error curve on n equal bins. Lower is
// better. Errors must lie in [0, 20039].
double AucLogError(std::span<double const> errors);

EvalReport Evaluate(std::vector<double> errors);

// Rows `rank_fraction,error_km,log_error_normalized` sorted by error.
void WriteErrorCurveCsv(std::span<double const> errors, std::string const & path);
}  // namespace geocell
