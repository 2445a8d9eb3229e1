#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "nl4s/errors.hpp"

namespace nl4s {

/// Periodic sampling lattice on [-L, L)^d with its dual lattice.
///
/// Physical samples sit at x_j = -L + j h with h = 2L/N. Fourier samples are
/// stored in FFT order: index i maps to the signed mode k = i for i < N/2 and
/// k = i - N otherwise, with physical wavenumber xi = pi k / L.
class Grid {
public:
  static constexpr int kMaxDim = 2;

  Grid(int dim, std::array<double, kMaxDim> extent, std::array<int, kMaxDim> points)
      : dim_(dim), extent_(extent), points_(points) {
    if (dim < 1 || dim > kMaxDim) {
      throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    for (int a = 0; a < dim; ++a) {
      if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a])) {
        throw ConfigError("grid extent must be positive and finite");
      }
      if (points_[a] < 8 || (points_[a] & (points_[a] - 1)) != 0) {
        throw ConfigError("grid points must be a power of two >= 8, got " +
                          std::to_string(points_[a]));
      }
    }
    for (int a = dim; a < kMaxDim; ++a) {
      extent_[a] = 1.0;
      points_[a] = 1;
    }
  }

  int dim() const { return dim_; }
  double extent(int axis = 0) const { return extent_[axis]; }
  int points(int axis = 0) const { return points_[axis]; }
  std::size_t size() const {
    return static_cast<std::size_t>(points_[0]) * static_cast<std::size_t>(points_[1]);
  }

  double spacing(int axis = 0) const { return 2.0 * extent_[axis] / points_[axis]; }

  /// Physical volume element h^d.
  double cell() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing(a);
    return v;
  }

  /// Dual volume element (pi/L)^d.
  double dual_cell() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= std::numbers::pi / extent_[a];
    return v;
  }

  double coordinate(int axis, int i) const { return -extent_[axis] + i * spacing(axis); }

  int mode(int axis, int i) const {
    const int n = points_[axis];
    return i < n / 2 ? i : i - n;
  }

  double wavenumber(int axis, int i) const {
    return std::numbers::pi * mode(axis, i) / extent_[axis];
  }

  /// Largest representable |xi| along an axis (the Nyquist magnitude).
  double nyquist(int axis = 0) const { return std::numbers::pi * (points_[axis] / 2) / extent_[axis]; }

  /// Same lattice shape with every extent multiplied by `factor`.
  Grid scaled(double factor) const {
    auto e = extent_;
    for (int a = 0; a < dim_; ++a) e[a] *= factor;
    return Grid(dim_, e, points_);
  }

  /// Row-major flat index; axis 0 is the slow index.
  std::size_t index(int i0, int i1 = 0) const {
    return static_cast<std::size_t>(i0) * static_cast<std::size_t>(points_[1]) +
           static_cast<std::size_t>(i1);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  int dim_;
  std::array<double, kMaxDim> extent_;
  std::array<int, kMaxDim> points_;
};

/// Uniform grid: same extent and point count on every axis.
inline Grid make_grid(int dim, double extent, int points) {
  return Grid(dim, {extent, extent}, {points, points});
}

}  // namespace nl4s
