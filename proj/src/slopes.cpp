#include "sclab/slopes.hpp"

#include <algorithm>

namespace sclab {

namespace {

void least_squares(const std::vector<std::pair<double, double>>& pts, double& slope,
                   double& intercept, double& ci95) {
  const int n = static_cast<int>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, e] : pts) {
    const double x = std::log(h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  slope = (n * sxy - sx * sy) / denom;
  intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& [h, e] : pts) {
    const double r = std::log(e) - (slope * std::log(h) + intercept);
    ss += r * r;
  }
  const double sigma2 = n > 2 ? ss / double(n - 2) : 0.0;
  ci95 = 1.96 * std::sqrt(sigma2 * double(n) / denom);
}

}  // namespace

SlopeFit fit_slope(std::vector<std::pair<double, double>> pairs) {
  if (pairs.size() < 4)
    throw std::invalid_argument("fit_slope: need at least 4 ladder points");
  for (const auto& [h, e] : pairs) {
    if (!(h > 0) || !(e > 0))
      throw std::invalid_argument("fit_slope: h and error must be positive");
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  SlopeFit fit;
  fit.pairs = pairs;
  least_squares(pairs, fit.slope, fit.intercept, fit.ci95);

  // floor detection: error stops decreasing at the small-h end
  std::vector<std::pair<double, double>> kept = pairs;
  while (kept.size() > 2) {
    const auto& last = kept[kept.size() - 1];   // smallest h
    const auto& prev = kept[kept.size() - 2];
    if (last.second >= 0.98 * prev.second) {
      kept.pop_back();
      fit.floor_limited = true;
    } else {
      break;
    }
  }
  fit.used_points = static_cast<int>(kept.size());
  if (fit.floor_limited && kept.size() >= 3) {
    double ic, ci;
    least_squares(kept, fit.trimmed_slope, ic, ci);
  } else {
    fit.trimmed_slope = fit.slope;
  }
  return fit;
}

}  // namespace sclab
