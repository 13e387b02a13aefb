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

#ifndef DISTBNE_GRID_HPP_
#define DISTBNE_GRID_HPP_

#include <functional>
#include <span>
#include <vector>

#include "distbne/common.hpp"

namespace distbne {

// A finite, strictly increasing set of points discretizing a compact
// interval. The first and last points are the interval bounds.
class Grid {
 public:
  struct Nearest {
    int index;
    double value;
  };

  Grid() = default;
  explicit Grid(std::vector<double> points);

  // Equidistant points spanning [lower, upper].
  static Grid uniform(double lower, double upper, int count);

  int size() const { return static_cast<int>(points_.size()); }
  double lower() const { return points_.front(); }
  double upper() const { return points_.back(); }
  double operator[](int i) const { return points_[i]; }
  std::span<const double> points() const { return points_; }

  // Largest half-gap between adjacent points.
  double coarseness() const;

  // Closest grid point to x after clamping x into [lower, upper]. Ties go
  // to the lower index.
  Nearest nearest(double x) const;

  // Index of the largest point <= x (x clamped into the grid range).
  int floor_index(double x) const;
  // Index of the smallest point >= x (x clamped into the grid range).
  int ceil_index(double x) const;

  bool operator==(const Grid& other) const { return points_ == other.points_; }

 private:
  std::vector<double> points_;
};

// Probability vector proportional to density evaluated at the grid points.
std::vector<double> discretize_density(
    const Grid& grid, const std::function<double(double)>& density);

}  // namespace distbne

#endif  // DISTBNE_GRID_HPP_
