#include "tightknot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <thread>

#include "tightknot/errors.hpp"

namespace tightknot {

double centred_fraction(double x) { return x - std::floor(x + 0.5); }

double quantization_objective(const std::vector<double>& writhes, double A, double B) {
  const double n = static_cast<double>(writhes.size());
  double mean = 0.0;
  for (double w : writhes) mean += centred_fraction(w / A + B);
  mean /= n;
  double var = 0.0;
  for (double w : writhes) {
    const double d = centred_fraction(w / A + B) - mean;
    var += d * d;
  }
  return var / n;
}

namespace {

struct Cell {
  double A, B, value;
};

bool better(const Cell& c, const Cell& best) {
  if (c.value != best.value) return c.value < best.value;
  if (c.A != best.A) return c.A < best.A;
  return c.B < best.B;
}

// Evaluates every (A, B) of the grid, split across threads by A row, then
// reduces serially so the winner does not depend on the thread count.
Cell grid_min(const std::vector<double>& writhes, const std::vector<double>& as,
              const std::vector<double>& bs, unsigned threads) {
  std::vector<double> values(as.size() * bs.size());
  auto rows = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i)
      for (std::size_t j = 0; j < bs.size(); ++j)
        values[i * bs.size() + j] = quantization_objective(writhes, as[i], bs[j]);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(as.size())));
  if (threads == 1) {
    rows(0, as.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (as.size() + threads - 1) / threads;
    for (std::size_t first = 0; first < as.size(); first += chunk)
      pool.emplace_back(rows, first, std::min(as.size(), first + chunk));
    for (auto& t : pool) t.join();
  }
  Cell best{as[0], bs[0], values[0]};
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = 0; j < bs.size(); ++j) {
      const Cell c{as[i], bs[j], values[i * bs.size() + j]};
      if (better(c, best)) best = c;
    }
  return best;
}

double wrap_unit(double b) {
  b -= std::floor(b);
  return b >= 1.0 ? 0.0 : b;
}

}  // namespace

QuantizationResult quantization_sweep(const std::vector<double>& writhes,
                                      const SweepOptions& o) {
  if (writhes.size() < 3) throw Error(ErrorKind::kInvalidArgument, "sweep needs at least 3 values");
  for (double w : writhes)
    if (!std::isfinite(w)) throw Error(ErrorKind::kInvalidArgument, "non-finite writhe");
  if (!(o.a_min > 0.0) || !(o.a_max >= o.a_min))
    throw Error(ErrorKind::kInvalidArgument, "A range must be positive and ordered");
  if (!(o.a_resolution > 0.0) || !(o.b_resolution > 0.0) || o.b_resolution > 1.0)
    throw Error(ErrorKind::kInvalidArgument, "bad sweep resolution");

  std::vector<double> as;
  const auto na = static_cast<std::size_t>(std::floor((o.a_max - o.a_min) / o.a_resolution + 1e-9));
  for (std::size_t i = 0; i <= na; ++i) as.push_back(o.a_min + static_cast<double>(i) * o.a_resolution);
  std::vector<double> bs;
  const auto nb = static_cast<std::size_t>(std::llround(1.0 / o.b_resolution));
  for (std::size_t j = 0; j < std::max<std::size_t>(nb, 1); ++j)
    bs.push_back(static_cast<double>(j) * o.b_resolution);
  const Cell coarse = grid_min(writhes, as, bs, o.threads);

  // Refinement: 10x finer over the best cell and its neighbours.
  const double fa = o.a_resolution / 10.0;
  const double fb = o.b_resolution / 10.0;
  std::vector<double> ras;
  for (int k = -10; k <= 10; ++k) {
    const double a = coarse.A + k * fa;
    if (a >= o.a_min - 1e-12 && a <= o.a_max + 1e-12 && a > 0.0) ras.push_back(a);
  }
  std::vector<double> rbs;
  for (int k = -10; k <= 10; ++k) rbs.push_back(wrap_unit(coarse.B + k * fb));
  std::sort(rbs.begin(), rbs.end());
  rbs.erase(std::unique(rbs.begin(), rbs.end()), rbs.end());
  Cell fine = grid_min(writhes, ras, rbs, o.threads);
  if (better(coarse, fine)) fine = coarse;

  // The variance is flat in B until some value wraps, so the grid minimum
  // only pins B down to a plateau (and tends to sit where a stray tail value
  // wraps). Report the plateau's centre: the circular mean of w/A + B moved
  // to zero, on the fine B grid.
  double sx = 0.0, sy = 0.0;
  for (double w : writhes) {
    const double t = 2.0 * std::numbers::pi * (w / fine.A + fine.B);
    sx += std::cos(t);
    sy += std::sin(t);
  }
  double b = fine.B;
  if (std::hypot(sx, sy) > 1e-12 * static_cast<double>(writhes.size())) {
    b -= std::atan2(sy, sx) / (2.0 * std::numbers::pi);
    b = wrap_unit(std::round(wrap_unit(b) / fb) * fb);
  }
  QuantizationResult r;
  r.A = fine.A;
  r.B = b;
  r.variance = quantization_objective(writhes, r.A, r.B);
  r.a_resolution = fa;
  r.b_resolution = fb;
  r.grid_B = fine.B;
  r.grid_variance = fine.value;
  return r;
}

double residual_writhe(double wr, double quantum, bool offset_half) {
  if (!(quantum > 0.0)) throw Error(ErrorKind::kInvalidArgument, "quantum must be > 0");
  const double x = wr / quantum - (offset_half ? 0.5 : 0.0);
  return centred_fraction(x) * quantum;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "pearson: length mismatch");
  if (x.size() < 2) throw Error(ErrorKind::kInvalidArgument, "pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::kInvalidArgument, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string_view to_string(FitModel m) { return m == FitModel::kLinear ? "linear" : "power"; }

double FitResult::predict(double c) const {
  return model == FitModel::kLinear ? coefficient * c + second : coefficient * std::pow(c, second);
}

namespace {

struct Line {
  double slope, intercept, slope_se, intercept_se;
};

Line ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (slope * x[i] + intercept);
    rss += r * r;
  }
  const double s2 = rss / (n - 2.0);
  return {slope, intercept, std::sqrt(s2 / sxx), std::sqrt(s2 * (1.0 / n + mx * mx / sxx))};
}

}  // namespace

FitResult fit_scaling(const std::vector<ScalingPoint>& points, FitModel model) {
  std::vector<double> cs;
  for (const auto& p : points) {
    if (!std::isfinite(p.crossing_number) || !std::isfinite(p.ropelength))
      throw Error(ErrorKind::kInvalidArgument, "fit: non-finite point");
    cs.push_back(p.crossing_number);
  }
  std::sort(cs.begin(), cs.end());
  if (std::unique(cs.begin(), cs.end()) - cs.begin() < 3)
    throw Error(ErrorKind::kInvalidArgument, "fit needs at least 3 distinct crossing numbers");

  std::vector<double> x, y;
  for (const auto& p : points) {
    if (model == FitModel::kPower) {
      if (!(p.crossing_number > 0.0) || !(p.ropelength > 0.0))
        throw Error(ErrorKind::kInvalidArgument, "power fit needs positive data");
      x.push_back(std::log(p.crossing_number));
      y.push_back(std::log(p.ropelength));
    } else {
      x.push_back(p.crossing_number);
      y.push_back(p.ropelength);
    }
  }
  const Line l = ols(x, y);
  FitResult f;
  f.model = model;
  f.points = points.size();
  if (model == FitModel::kLinear) {
    f.coefficient = l.slope;
    f.coefficient_error = l.slope_se;
    f.second = l.intercept;
    f.second_error = l.intercept_se;
  } else {
    f.coefficient = std::exp(l.intercept);
    f.coefficient_error = f.coefficient * l.intercept_se;
    f.second = l.slope;
    f.second_error = l.slope_se;
  }
  for (const auto& p : points) {
    const double r = p.ropelength - f.predict(p.crossing_number);
    f.rss += r * r;
  }
  return f;
}

std::vector<ScalingPoint> group_means(const std::vector<ScalingPoint>& points) {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const auto& p : points) {
    auto& [sum, count] = acc[p.crossing_number];
    sum += p.ropelength;
    ++count;
  }
  std::vector<ScalingPoint> out;
  for (const auto& [c, sc] : acc) out.push_back({c, sc.first / static_cast<double>(sc.second)});
  return out;
}

DistributionStats distribution_stats(const std::vector<double>& values) {
  if (values.size() < 2) throw Error(ErrorKind::kInvalidArgument, "need at least 2 values");
  DistributionStats s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  if (m2 == 0.0) throw Error(ErrorKind::kInvalidArgument, "degenerate sample: zero spread");
  s.sd = std::sqrt(m2 / (n - 1.0));
  s.sd_over_mean = s.sd / s.mean;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  return s;
}

double uniform_null_sd() { return 1.0 / std::sqrt(12.0); }

Histogram histogram(const std::vector<double>& values, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw Error(ErrorKind::kInvalidArgument, "bad histogram range");
  Histogram h{lo, (hi - lo) / static_cast<double>(bins), std::vector<std::size_t>(bins, 0)};
  for (double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    auto k = static_cast<std::size_t>((v - lo) / h.width);
    ++h.counts[std::min(k, bins - 1)];
  }
  return h;
}

}  // namespace tightknot
