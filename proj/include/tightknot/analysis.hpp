#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tightknot {

struct QuantizationResult {
  double A = 0.0;  // quantum
  double B = 0.0;  // offset, in [0, 1): centre of the flat stretch of the objective
  double variance = 0.0;  // at (A, B)
  double a_resolution = 0.0;  // of the final (refined) grid
  double b_resolution = 0.0;
  double grid_B = 0.0;  // where the grid minimum itself fell
  double grid_variance = 0.0;
};

struct SweepOptions {
  double a_min = 0.3;
  double a_max = 2.0;
  double a_resolution = 1e-3;
  double b_resolution = 1e-2;
  unsigned threads = 1;  // result does not depend on it
};

// Deviation of x from its nearest integer, in [-1/2, 1/2).
double centred_fraction(double x);

// Population variance of centred_fraction(w / A + B) over the values; the
// quantity minimised by the sweep. Periodic in B with period 1.
double quantization_objective(const std::vector<double>& writhes, double A, double B);

// Grid minimum of the objective over A in [a_min, a_max] and B in [0, 1),
// then one pass on a 10x finer grid spanning the neighbouring cells. Ties go
// to the smallest A, then the smallest B. B is then re-centred on the
// circular mean of w/A, which leaves the variance unchanged unless values wrap.
QuantizationResult quantization_sweep(const std::vector<double>& writhes,
                                      const SweepOptions& options = {});

// Signed distance from wr to the nearest multiple of quantum (half-integer
// multiples with offset_half), in [-quantum/2, quantum/2).
double residual_writhe(double wr, double quantum, bool offset_half);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

enum class FitModel { kLinear, kPower };
std::string_view to_string(FitModel m);

// Linear: y = coefficient * C + intercept.
// Power:  y = coefficient * C^exponent, fitted as a line in log-log space;
// the prefactor's error is propagated from the log-intercept.
struct FitResult {
  FitModel model = FitModel::kLinear;
  double coefficient = 0.0;
  double coefficient_error = 0.0;
  double second = 0.0;  // intercept (linear) or exponent (power)
  double second_error = 0.0;
  double rss = 0.0;     // in y units
  std::size_t points = 0;

  double predict(double c) const;
};

struct ScalingPoint {
  double crossing_number = 0.0;
  double ropelength = 0.0;
};

// Unweighted least squares over the given points; at least 3 distinct
// crossing numbers.
FitResult fit_scaling(const std::vector<ScalingPoint>& points, FitModel model);

// One point per crossing number: the group mean. Keeps large groups from
// dominating the fit.
std::vector<ScalingPoint> group_means(const std::vector<ScalingPoint>& points);

struct DistributionStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator
  double sd_over_mean = 0.0;
  double skewness = 0.0;  // biased, m3 / m2^1.5
  double kurtosis = 0.0;  // non-excess, m4 / m2^2
};

DistributionStats distribution_stats(const std::vector<double>& values);

// Standard deviation of U(0, 1): 1/sqrt(12).
double uniform_null_sd();

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<std::size_t> counts;
};

// `bins` equal bins over [lo, hi]; the top edge falls in the last bin and
// values outside the range are dropped.
Histogram histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi);

}  // namespace tightknot
