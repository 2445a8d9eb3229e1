#pragma once

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "nl4s/errors.hpp"
#include "nl4s/fft.hpp"
#include "nl4s/grid.hpp"

namespace nl4s {

using cplx = std::complex<double>;
using Point = std::array<double, Grid::kMaxDim>;

enum class Space { physical, fourier };

inline std::string_view to_string(Space s) { return s == Space::physical ? "physical" : "fourier"; }

/// Complex samples on a grid, tagged with the representation they hold.
///
/// In Fourier space the samples approximate the continuum transform
/// u^(xi) = \int u(x) e^{-i x.xi} dx at the dual lattice points, so discrete
/// sums with the dual cell (and a (2 pi)^{-d} factor) reproduce continuum
/// integrals without extra bookkeeping.
class Field {
public:
  explicit Field(Grid grid, Space space = Space::physical)
      : grid_(grid), values_(grid.size()), space_(space) {}

  Field(Grid grid, std::vector<cplx> values, Space space)
      : grid_(grid), values_(std::move(values)), space_(space) {
    if (values_.size() != grid_.size()) {
      throw ConfigError("field length does not match grid size");
    }
  }

  /// Samples `f(x)` at every physical lattice point.
  template <class Fn>
  static Field sample(const Grid& grid, Fn&& f) {
    std::vector<cplx> v(grid.size());
    for (int i = 0; i < grid.points(0); ++i) {
      for (int j = 0; j < grid.points(1); ++j) {
        const Point x{grid.coordinate(0, i), grid.dim() > 1 ? grid.coordinate(1, j) : 0.0};
        v[grid.index(i, j)] = cplx(f(x));
      }
    }
    return Field(grid, std::move(v), Space::physical);
  }

  /// Fills Fourier samples from `fhat(xi)` evaluated on the dual lattice.
  template <class Fn>
  static Field sample_fourier(const Grid& grid, Fn&& fhat) {
    std::vector<cplx> v(grid.size());
    for (int i = 0; i < grid.points(0); ++i) {
      for (int j = 0; j < grid.points(1); ++j) {
        const Point xi{grid.wavenumber(0, i), grid.dim() > 1 ? grid.wavenumber(1, j) : 0.0};
        v[grid.index(i, j)] = cplx(fhat(xi));
      }
    }
    return Field(grid, std::move(v), Space::fourier);
  }

  const Grid& grid() const { return grid_; }
  Space space() const { return space_; }
  std::span<const cplx> values() const { return values_; }
  std::vector<cplx> take_values() && { return std::move(values_); }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

private:
  Grid grid_;
  std::vector<cplx> values_;
  Space space_;
};

namespace detail {

// (-1)^k per axis, applied so the DFT matches the continuum transform on
// [-L, L) rather than [0, 2L).
inline void apply_parity(const Grid& g, std::span<cplx> v, double scale) {
  for (int i = 0; i < g.points(0); ++i) {
    for (int j = 0; j < g.points(1); ++j) {
      const bool odd = ((i + j) & 1) != 0;
      v[g.index(i, j)] *= odd ? -scale : scale;
    }
  }
}

inline void forward_in_place(const Grid& g, std::span<cplx> v) {
  fft::execute(g, v, fft::Direction::forward);
  apply_parity(g, v, g.cell());
}

inline void backward_in_place(const Grid& g, std::span<cplx> v) {
  apply_parity(g, v, 1.0 / (g.cell() * static_cast<double>(g.size())));
  fft::execute(g, v, fft::Direction::backward);
}

}  // namespace detail

inline Field to_fourier(const Field& f) {
  if (f.space() != Space::physical) throw SpaceMismatch("to_fourier expects a physical-space field");
  std::vector<cplx> v(f.values().begin(), f.values().end());
  detail::forward_in_place(f.grid(), v);
  return Field(f.grid(), std::move(v), Space::fourier);
}

inline Field to_physical(const Field& f) {
  if (f.space() != Space::fourier) throw SpaceMismatch("to_physical expects a Fourier-space field");
  std::vector<cplx> v(f.values().begin(), f.values().end());
  detail::backward_in_place(f.grid(), v);
  return Field(f.grid(), std::move(v), Space::physical);
}

/// Returns `f` in the requested representation, transforming only if needed.
inline Field in_space(const Field& f, Space s) {
  if (f.space() == s) return f;
  return s == Space::fourier ? to_fourier(f) : to_physical(f);
}

/// Pointwise linear combination a*f + b*g in a common representation.
inline Field combine(cplx a, const Field& f, cplx b, const Field& g) {
  if (!(f.grid() == g.grid())) throw ConfigError("combine: grids differ");
  const Field gg = in_space(g, f.space());
  std::vector<cplx> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * f[i] + b * gg[i];
  return Field(f.grid(), std::move(v), f.space());
}

inline Field operator-(const Field& f, const Field& g) { return combine(1.0, f, -1.0, g); }
inline Field operator+(const Field& f, const Field& g) { return combine(1.0, f, 1.0, g); }

inline Field scale(const Field& f, cplx a) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  for (auto& z : v) z *= a;
  return Field(f.grid(), std::move(v), f.space());
}

}  // namespace nl4s
