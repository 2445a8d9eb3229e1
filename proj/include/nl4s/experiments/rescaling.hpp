#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nl4s/errors.hpp"
#include "nl4s/field.hpp"
#include "nl4s/regimes.hpp"
#include "nl4s/spectral.hpp"

namespace nl4s::experiments {

/// u(x) = lambda^{-4/(nu-1)} phi(x / ell) with ell = lambda / delta, the
/// dilation behind the small-dispersion rescaling. Transforms satisfy
/// u^(xi) = lambda^{-4/(nu-1)} ell^d phi^(ell xi).
struct Dilation {
  int dim = 1;
  double nu = 3.0;
  double delta = 1.0;
  double lambda = 1.0;

  double amplitude() const { return std::pow(lambda, -4.0 / (nu - 1.0)); }
  /// Spatial stretch ell = lambda / delta; frequencies shrink by the same factor.
  double ell() const { return lambda / delta; }
};

/// Budget eps = lambda^{Gamma_c - gamma} delta^{gamma - d/2}.
inline double budget(int d, double nu, double gamma, double delta, double lambda) {
  const double gc = 0.5 * d - 4.0 / (nu - 1.0);
  return std::pow(lambda, gc - gamma) * std::pow(delta, gamma - 0.5 * d);
}

/// theta = (d/2 - gamma) / (Gamma_c - gamma), defined for gamma < Gamma_c.
inline double budget_theta(int d, double nu, double gamma) {
  const double gc = 0.5 * d - 4.0 / (nu - 1.0);
  if (!(gamma < gc)) throw ConfigError("theta needs gamma < Gamma_c");
  return (0.5 * d - gamma) / (gc - gamma);
}

/// lambda = eps^{1/(Gamma_c - gamma)} delta^theta; eps = 1 gives lambda = delta^theta.
inline double budget_lambda(int d, double nu, double gamma, double delta, double eps = 1.0) {
  const double gc = 0.5 * d - 4.0 / (nu - 1.0);
  return std::pow(eps, 1.0 / (gc - gamma)) * std::pow(delta, budget_theta(d, nu, gamma));
}

/// H^gamma (or homogeneous) norm of the dilated field computed from phi's
/// lattice transform through the multiplier identity, without resampling.
inline double dilated_norm(const Field& phi, const Dilation& dl, SobolevSpec s) {
  const Field ph = in_space(phi, Space::fourier);
  if (s.homogeneous && s.gamma < 0.0 &&
      detail::zero_mode_mass(ph) > kZeroModeTolerance * std::pow(l2_norm(ph), 2)) {
    throw ZeroModeObstruction("zero-mode obstruction: homogeneous norm of negative order of a "
                              "field with non-negligible mean");
  }
  const double ell = dl.ell();
  const int d = phi.grid().dim();
  const double shrink = 1.0 / ell;  // u-frequency = phi-frequency / ell
  const double acc = spectral_integral(ph, [&](const Point& eta) {
    const double r2 = norm2(eta) * shrink * shrink;
    if (s.homogeneous) return r2 == 0.0 ? 0.0 : std::pow(r2, s.gamma);
    return std::pow(1.0 + r2, s.gamma);
  });
  // |u^|^2 d xi = A^2 ell^{2d} |phi^|^2 ell^{-d} d eta
  return dl.amplitude() * std::pow(ell, 0.5 * d) * std::sqrt(acc);
}

/// Physical samples of the dilated field on the co-scaled grid (extent
/// multiplied by ell, same point count): an index-for-index copy of phi.
inline Field dilate_on_coscaled_grid(const Field& phi, const Dilation& dl) {
  const Field u = in_space(phi, Space::physical);
  const Grid g = u.grid().scaled(dl.ell());
  std::vector<cplx> v(u.values().begin(), u.values().end());
  for (auto& z : v) z *= dl.amplitude();
  return Field(g, std::move(v), Space::physical);
}

/// Continuum (2 pi)^{-1} \int w(xi) |f^(xi)|^2 d xi in d = 1 by adaptive
/// Gauss-Kronrod on dyadic panels refined towards xi = 0 down to `inner`.
inline double continuum_spectral_integral(const std::function<double(double)>& weight,
                                          const std::function<cplx(double)>& fhat, double inner,
                                          double outer) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double xi) { return weight(xi) * std::norm(fhat(xi)); };
  std::vector<double> breaks{0.0};
  for (double b = inner; b < outer; b *= 2.0) breaks.push_back(b);
  breaks.push_back(outer);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      acc += gauss_kronrod<double, 31>::integrate(
          [&](double x) { return integrand(sgn * x); }, breaks[i], breaks[i + 1], 8, 1e-12);
    }
  }
  return acc / (2.0 * std::numbers::pi);
}

/// Dilated H^gamma norm from a continuous transform phi^(eta) (d = 1), used
/// where the lattice cannot resolve the |xi| <~ 1/ell region.
inline double dilated_norm_continuum(const std::function<cplx(double)>& phi_hat,
                                     const Dilation& dl, SobolevSpec s, double outer) {
  if (dl.dim != 1) throw ConfigError("continuum dilated norm is implemented for d = 1");
  const double ell = dl.ell();
  auto weight = [&](double eta) {
    const double r2 = eta * eta / (ell * ell);
    if (s.homogeneous) return r2 == 0.0 ? 0.0 : std::pow(r2, s.gamma);
    return std::pow(1.0 + r2, s.gamma);
  };
  const double inner = std::min(ell, outer) / 16.0;
  const double acc = continuum_spectral_integral(weight, phi_hat, inner, outer);
  return dl.amplitude() * std::sqrt(ell) * std::sqrt(acc);
}

}  // namespace nl4s::experiments
