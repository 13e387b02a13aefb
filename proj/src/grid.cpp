// Copyright 2026 The distbne Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "distbne/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distbne {

double frobenius_dot(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw Error("frobenius_dot: shape mismatch " + std::to_string(a.rows) +
                "x" + std::to_string(a.cols) + " vs " +
                std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw Error("Grid needs at least two points");
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw Error("Grid points must be strictly increasing");
    }
  }
}

Grid Grid::uniform(double lower, double upper, int count) {
  if (count < 2) throw Error("Grid::uniform: count must be >= 2");
  if (!(lower < upper)) throw Error("Grid::uniform: requires lower < upper");
  std::vector<double> pts(count);
  const double step = (upper - lower) / (count - 1);
  for (int i = 0; i < count; ++i) pts[i] = lower + i * step;
  pts.back() = upper;
  return Grid(std::move(pts));
}

double Grid::coarseness() const {
  double widest = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    widest = std::max(widest, points_[i] - points_[i - 1]);
  }
  return 0.5 * widest;
}

Grid::Nearest Grid::nearest(double x) const {
  if (x <= points_.front()) return {0, points_.front()};
  if (x >= points_.back()) return {size() - 1, points_.back()};
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  const int hi = static_cast<int>(it - points_.begin());
  const int lo = hi - 1;
  // <= keeps exact midpoints on the lower index
  if (x - points_[lo] <= points_[hi] - x) return {lo, points_[lo]};
  return {hi, points_[hi]};
}

int Grid::floor_index(double x) const {
  if (x <= points_.front()) return 0;
  if (x >= points_.back()) return size() - 1;
  auto it = std::upper_bound(points_.begin(), points_.end(), x);
  return static_cast<int>(it - points_.begin()) - 1;
}

int Grid::ceil_index(double x) const {
  if (x <= points_.front()) return 0;
  if (x >= points_.back()) return size() - 1;
  auto it = std::lower_bound(points_.begin(), points_.end(), x);
  return static_cast<int>(it - points_.begin());
}

std::vector<double> discretize_density(
    const Grid& grid, const std::function<double(double)>& density) {
  std::vector<double> mass(grid.size());
  double total = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double d = density(grid[k]);
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error("discretize_density: density must be finite and >= 0");
    }
    mass[k] = d;
    total += d;
  }
  if (total <= 0.0) {
    throw Error("discretize_density: density vanishes on every grid point");
  }
  if (std::all_of(mass.begin(), mass.end(),
                  [&](double m) { return m == mass.front(); })) {
    std::fill(mass.begin(), mass.end(), 1.0 / grid.size());
    return mass;
  }
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace distbne
