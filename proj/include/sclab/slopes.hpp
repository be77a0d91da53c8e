#pragma once

#include "sclab/common.hpp"

#include <utility>
#include <vector>

namespace sclab {

/// Log-log least-squares fit of error-vs-h ladders.
struct SlopeFit {
  std::vector<std::pair<double, double>> pairs;  // (h, error), h descending
  double slope = 0.0;
  double intercept = 0.0;  // log error at log h = 0
  double ci95 = 0.0;       // 95% half-width on the slope
  bool floor_limited = false;
  int used_points = 0;     // points kept after floor trimming
  double trimmed_slope = 0.0;  // slope over the kept points

  bool slope_in(double lo, double hi) const {
    const double s = floor_limited ? trimmed_slope : slope;
    return s >= lo && s <= hi;
  }
};

/// Requires >= 4 ladder points with positive errors. Floor-limited ladders
/// (error no longer decreasing at the small-h end) are flagged and refitted
/// on the non-floor prefix.
SlopeFit fit_slope(std::vector<std::pair<double, double>> pairs);

}  // namespace sclab
