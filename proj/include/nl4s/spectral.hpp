#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nl4s/errors.hpp"
#include "nl4s/field.hpp"

namespace nl4s {

/// Regularity exponent of an L^2-based Sobolev norm; `homogeneous` selects
/// |xi|^gamma over the Japanese bracket <xi>^gamma.
struct SobolevSpec {
  double gamma = 0.0;
  bool homogeneous = false;
};

/// Order k of the weighted space H^{k,k}.
struct WeightedSpec {
  int k = 0;
};

/// Relative zero-mode mass above which negative-order homogeneous norms are
/// refused.
inline constexpr double kZeroModeTolerance = 1e-8;
/// Largest admissible fraction of L^2 mass in the top third of the spectrum.
inline constexpr double kAliasTolerance = 1e-8;

inline double norm2(const Point& xi) { return xi[0] * xi[0] + xi[1] * xi[1]; }
inline double japanese(const Point& xi) { return std::sqrt(1.0 + norm2(xi)); }

namespace detail {

inline double two_pi_pow(int d) { return std::pow(2.0 * std::numbers::pi, d); }

template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn) {
  for (int i = 0; i < g.points(0); ++i) {
    for (int j = 0; j < g.points(1); ++j) {
      const Point xi{g.wavenumber(0, i), g.dim() > 1 ? g.wavenumber(1, j) : 0.0};
      fn(g.index(i, j), xi, i, j);
    }
  }
}

/// Mass carried by the zero mode of a Fourier-space field.
inline double zero_mode_mass(const Field& fh) {
  return std::norm(fh[0]) * fh.grid().dual_cell() / two_pi_pow(fh.grid().dim());
}

}  // namespace detail

/// (2 pi)^{-d} \int weight(xi) |u^(xi)|^2 dxi evaluated on the dual lattice.
template <class Weight>
double spectral_integral(const Field& f, Weight&& weight) {
  const Field fh = in_space(f, Space::fourier);
  double acc = 0.0;
  detail::for_each_mode(fh.grid(), [&](std::size_t idx, const Point& xi, int, int) {
    acc += weight(xi) * std::norm(fh[idx]);
  });
  return acc * fh.grid().dual_cell() / detail::two_pi_pow(fh.grid().dim());
}

/// Discrete L^2 norm, valid in either representation.
inline double l2_norm(const Field& f) {
  double acc = 0.0;
  for (const auto& z : f.values()) acc += std::norm(z);
  const Grid& g = f.grid();
  const double measure =
      f.space() == Space::physical ? g.cell() : g.dual_cell() / detail::two_pi_pow(g.dim());
  return std::sqrt(acc * measure);
}

/// Riemann sum of |f|^q over the periodic box; q = infinity gives max |f|.
inline double lq_norm(const Field& f, double q) {
  if (!(q >= 1.0)) throw ConfigError("lq_norm: q must be >= 1");
  const Field u = in_space(f, Space::physical);
  if (std::isinf(q)) {
    double m = 0.0;
    for (const auto& z : u.values()) m = std::max(m, std::abs(z));
    return m;
  }
  double acc = 0.0;
  for (const auto& z : u.values()) acc += std::pow(std::abs(z), q);
  return std::pow(acc * u.grid().cell(), 1.0 / q);
}

/// Pointwise multiplication of u^ by m(xi), returned in the caller's space.
///
/// A non-finite symbol at xi = 0 is tolerated only when the zero mode carries
/// negligible mass; that mode is then dropped.
template <class Symbol>
Field apply_multiplier(const Field& f, Symbol&& m) {
  Field fh = in_space(f, Space::fourier);
  const double total = std::pow(l2_norm(fh), 2);
  std::vector<cplx> v = std::move(fh).take_values();
  const Grid& g = f.grid();
  detail::for_each_mode(g, [&](std::size_t idx, const Point& xi, int i, int j) {
    const cplx mult = m(xi);
    if (std::isfinite(mult.real()) && std::isfinite(mult.imag())) {
      v[idx] *= mult;
      return;
    }
    if (i == 0 && j == 0) {
      const double zm = std::norm(v[idx]) * g.dual_cell() / detail::two_pi_pow(g.dim());
      if (zm <= kZeroModeTolerance * total) {
        v[idx] = 0.0;
        return;
      }
      throw ZeroModeObstruction("zero-mode obstruction: multiplier is singular at xi = 0 "
                                "and the field has non-negligible mean");
    }
    throw ConfigError("multiplier produced a non-finite value away from xi = 0");
  });
  Field out(g, std::move(v), Space::fourier);
  return f.space() == Space::fourier ? out : to_physical(out);
}

/// ||u||_{H^gamma} or ||u||_{\dot H^gamma} via Parseval on the dual lattice.
inline double sobolev_norm(const Field& f, SobolevSpec s) {
  if (!std::isfinite(s.gamma)) throw ConfigError("sobolev_norm: gamma must be finite");
  const Field fh = in_space(f, Space::fourier);
  if (!s.homogeneous) {
    return std::sqrt(spectral_integral(fh, [g = s.gamma](const Point& xi) {
      return std::pow(1.0 + norm2(xi), g);
    }));
  }
  if (s.gamma == 0.0) return l2_norm(fh);
  if (s.gamma < 0.0) {
    const double total = std::pow(l2_norm(fh), 2);
    if (detail::zero_mode_mass(fh) > kZeroModeTolerance * total) {
      throw ZeroModeObstruction(
          "zero-mode obstruction: homogeneous norm of negative order is undefined for a "
          "field with non-negligible mean (|u^(0)|^2 exceeds 1e-8 of the L^2 mass)");
    }
  }
  return std::sqrt(spectral_integral(fh, [g = s.gamma](const Point& xi) {
    const double r2 = norm2(xi);
    return r2 == 0.0 ? 0.0 : std::pow(r2, g);
  }));
}

/// Spectral derivative D^alpha.
inline Field derivative(const Field& f, int a0, int a1 = 0) {
  return apply_multiplier(f, [a0, a1](const Point& xi) {
    return std::pow(cplx(0.0, xi[0]), a0) * std::pow(cplx(0.0, xi[1]), a1);
  });
}

inline Field laplacian(const Field& f) {
  return apply_multiplier(f, [](const Point& xi) { return cplx(-norm2(xi)); });
}

/// sum_{|alpha| <= k} || <x>^{k-|alpha|} D^alpha u ||_{L^2}.
inline double weighted_norm(const Field& f, WeightedSpec w) {
  if (w.k < 0) throw ConfigError("weighted_norm: k must be nonnegative");
  const Field fh = in_space(f, Space::fourier);
  const Grid& g = f.grid();
  const int max1 = g.dim() > 1 ? w.k : 0;
  double total = 0.0;
  for (int a0 = 0; a0 <= w.k; ++a0) {
    for (int a1 = 0; a1 <= max1 && a0 + a1 <= w.k; ++a1) {
      const Field d = to_physical(derivative(fh, a0, a1));
      const int power = w.k - a0 - a1;
      double acc = 0.0;
      for (int i = 0; i < g.points(0); ++i) {
        for (int j = 0; j < g.points(1); ++j) {
          const double x0 = g.coordinate(0, i);
          const double x1 = g.dim() > 1 ? g.coordinate(1, j) : 0.0;
          const double bracket = std::pow(1.0 + x0 * x0 + x1 * x1, power);
          acc += bracket * std::norm(d[g.index(i, j)]);
        }
      }
      total += std::sqrt(acc * g.cell());
    }
  }
  return total;
}

namespace detail {

inline double alias_fraction_of(const Grid& g, std::span<const cplx> fh) {
  double top = 0.0;
  double all = 0.0;
  for (int i = 0; i < g.points(0); ++i) {
    const bool high0 = 3 * std::abs(g.mode(0, i)) > g.points(0);
    for (int j = 0; j < g.points(1); ++j) {
      const double e = std::norm(fh[g.index(i, j)]);
      all += e;
      if (high0 || (g.dim() > 1 && 3 * std::abs(g.mode(1, j)) > g.points(1))) top += e;
    }
  }
  return all > 0.0 ? top / all : 0.0;
}

}  // namespace detail

/// Fraction of L^2 mass carried by modes with |k| > N/3 on any axis.
inline double alias_fraction(const Field& f) {
  const Field fh = in_space(f, Space::fourier);
  return detail::alias_fraction_of(fh.grid(), fh.values());
}

/// Shell-averaged spectrum in `bands` equal bins of max_a |k_a| / (N_a/2).
inline std::vector<double> band_spectrum(const Field& f, int bands = 12) {
  const Field fh = in_space(f, Space::fourier);
  const Grid& g = fh.grid();
  std::vector<double> out(bands, 0.0);
  double all = 0.0;
  for (int i = 0; i < g.points(0); ++i) {
    for (int j = 0; j < g.points(1); ++j) {
      double r = 2.0 * std::abs(g.mode(0, i)) / g.points(0);
      if (g.dim() > 1) r = std::max(r, 2.0 * std::abs(g.mode(1, j)) / g.points(1));
      const int b = std::min(bands - 1, static_cast<int>(r * bands));
      const double e = std::norm(fh[g.index(i, j)]);
      out[b] += e;
      all += e;
    }
  }
  if (all > 0.0) {
    for (auto& e : out) e /= all;
  }
  return out;
}

inline std::string spectrum_report(const Field& f) {
  std::ostringstream os;
  os << "band mass fractions (low to high):";
  for (double e : band_spectrum(f)) os << ' ' << e;
  return os.str();
}

/// Throws NumericalGuardError when the top third of the spectrum carries more
/// than `tolerance` of the mass.
inline void check_alias_guard(const Field& f, double tolerance = kAliasTolerance) {
  const double frac = alias_fraction(f);
  if (!(frac < tolerance)) {
    std::ostringstream os;
    os << "aliasing guard: top-third spectral mass fraction " << frac << " exceeds "
       << tolerance << "; " << spectrum_report(f);
    throw NumericalGuardError(os.str());
  }
}

/// Continuum Fourier transform of the sampled field at an arbitrary
/// wavevector (trapezoid rule over the box). Agrees with the lattice values of
/// `to_fourier` at dual lattice points.
inline cplx fourier_at(const Field& f, const Point& xi) {
  const Field u = in_space(f, Space::physical);
  const Grid& g = u.grid();
  cplx acc = 0.0;
  for (int i = 0; i < g.points(0); ++i) {
    const double x0 = g.coordinate(0, i);
    for (int j = 0; j < g.points(1); ++j) {
      const double x1 = g.dim() > 1 ? g.coordinate(1, j) : 0.0;
      acc += u[g.index(i, j)] * std::polar(1.0, -(xi[0] * x0 + xi[1] * x1));
    }
  }
  return acc * g.cell();
}

}  // namespace nl4s
