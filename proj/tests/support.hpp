#pragma once

// Shared helpers for the unit and acceptance tests: tolerances and seeded
// generators for random points, directions and profiles.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <mcurv/chart.hpp>
#include <mcurv/profiles.hpp>

namespace mcurv::test {

inline constexpr double kPi = 3.14159265358979323846;

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Interior point of the chart, away from bounded ends by `collar`.
inline Point random_point(const Chart& chart, std::mt19937_64& rng, double collar = 1e-2) {
  Point x{};
  for (int i = 0; i < chart.dim(); ++i) {
    const auto [lo, hi] = chart.trimmed_bounds(i, collar);
    x[i] = uniform(rng, lo, hi);
  }
  return x;
}

// Random bump profile with support well inside (lo_min, hi_max).
inline Profile random_bump(std::mt19937_64& rng, double lo_min, double hi_max) {
  const double span = hi_max - lo_min;
  const double lo = lo_min + uniform(rng, 0.0, 0.3) * span;
  const double hi = hi_max - uniform(rng, 0.0, 0.3) * span;
  const double peak = lo + uniform(rng, 0.3, 0.7) * (hi - lo);
  return bump_profile(lo, hi, peak, uniform(rng, 0.5, 2.0));
}

// Random raised cosine centered inside (lo_min, hi_max).
inline Profile random_raised_cosine(std::mt19937_64& rng, double lo_min, double hi_max) {
  const double center = uniform(rng, lo_min + 0.3 * (hi_max - lo_min), hi_max - 0.3 * (hi_max - lo_min));
  const double width = uniform(rng, 0.1, 0.25) * (hi_max - lo_min);
  return raised_cosine_profile(center, width, uniform(rng, 0.5, 2.0));
}

}  // namespace mcurv::test
