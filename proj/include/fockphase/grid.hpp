#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fockphase {

// Uniform phase grid on [-pi/2, pi/2], endpoints included. Points are filled
// from both ends so that points[n-1-i] == -points[i] bitwise; distributions
// built on the grid then inherit exact reflection symmetry.
struct PhiGrid {
  std::vector<double> points;
  double spacing = 0.0;

  static PhiGrid uniform(int count = 2048) {
    if (count < 2) throw std::invalid_argument("PhiGrid: count must be >= 2");
    PhiGrid g;
    g.spacing = std::numbers::pi / (count - 1);
    g.points.resize(static_cast<std::size_t>(count));
    for (int i = 0; 2 * i < count - 1; ++i) {
      const double p = -0.5 * std::numbers::pi + i * g.spacing;
      g.points[static_cast<std::size_t>(i)] = p;
      g.points[static_cast<std::size_t>(count - 1 - i)] = -p;
    }
    if (count % 2 == 1) g.points[static_cast<std::size_t>((count - 1) / 2)] = 0.0;
    return g;
  }

  int size() const { return static_cast<int>(points.size()); }
  double front() const { return points.front(); }
  double back() const { return points.back(); }

  // Nearest grid point to theta; exact midpoints resolve to the larger index
  // (the non-negative side for theta = 0 on even grids).
  int snap_index(double theta) const {
    if (!std::isfinite(theta)) throw std::invalid_argument("PhiGrid::snap_index: theta must be finite");
    if (theta < front() - 0.5 * spacing || theta > back() + 0.5 * spacing)
      throw std::invalid_argument("PhiGrid::snap_index: theta outside the grid");
    long long i = std::llround((theta - front()) / spacing);
    if (i < 0) i = 0;
    if (i > size() - 1) i = size() - 1;
    int best = static_cast<int>(i);
    for (int cand : {best - 1, best + 1}) {
      if (cand < 0 || cand >= size()) continue;
      const double dc = std::abs(points[static_cast<std::size_t>(cand)] - theta);
      const double db = std::abs(points[static_cast<std::size_t>(best)] - theta);
      if (dc < db || (dc == db && cand > best)) best = cand;
    }
    return best;
  }

  friend bool operator==(const PhiGrid& a, const PhiGrid& b) {
    return a.size() == b.size() && a.spacing == b.spacing && a.front() == b.front() &&
           a.back() == b.back();
  }
  friend bool operator!=(const PhiGrid& a, const PhiGrid& b) { return !(a == b); }
};

}  // namespace fockphase
