#include "geocell/metrics.hpp"

#include "geocell/atomic_file.hpp"
#include "geocell/error.hpp"
#include "geocell/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace geocell
{
namespace
{
void RequireNonEmpty(std::span<double const> errors, char const * metric)
{
  if (errors.empty())
    throw UndefinedMetricError(std::string(metric) + " is undefined for an empty error list");
}

double NormalisedLogError(double e)
{
  if (!(e >= 0) || e > kMaxErrorKm)
    throw InvalidArgument("error " + std::to_string(e) + " km outside [0, 20039]");
  return std::log1p(e) / std::log1p(kMaxErrorKm);
}
}  // namespace

double ErrorKm(LatLng const & pred, LatLng const & gold) { return GreatCircleKm(pred, gold); }

double AccuracyAt(std::span<double const> errors, double threshold_km)
{
  RequireNonEmpty(errors, "accuracy");
  auto const hits = std::count_if(errors.begin(), errors.end(), [threshold_km](double e) { return e <= threshold_km; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

double MeanError(std::span<double const> errors)
{
  RequireNonEmpty(errors, "mean error");
  for (double e : errors)
    if (!(e >= 0) || !std::isfinite(e))
      throw InvalidArgument("error " + std::to_string(e) + " km is negative or not finite");
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (double e : sorted)
    sum += e;
  return sum / static_cast<double>(sorted.size());
}

double AucLogError(std::span<double const> errors)
{
  RequireNonEmpty(errors, "AUC");
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0;
  for (double e : sorted)
    sum += NormalisedLogError(e);
  return sum / static_cast<double>(sorted.size());
}

EvalReport Evaluate(std::vector<double> errors)
{
  EvalReport r;
  r.n = errors.size();
  r.accuracy_at_161 = AccuracyAt(errors);
  r.mean_error_km = MeanError(errors);
  r.auc_log_error = AucLogError(errors);
  r.errors = std::move(errors);
  return r;
}

void WriteErrorCurveCsv(std::span<double const> errors, std::string const & path)
{
  RequireNonEmpty(errors, "error curve");
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  AtomicFile file(path);
  auto & out = file.stream();
  out << "rank_fraction,error_km,log_error_normalized\n";
  char buf[128];
  double const n = static_cast<double>(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i)
  {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", static_cast<double>(i + 1) / n, sorted[i],
                  NormalisedLogError(sorted[i]));
    out << buf;
  }
  file.Commit();
}
}  // namespace geocell
