#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/hermite.hpp>
#include <json.hpp>

#include "nl4s/errors.hpp"
#include "nl4s/field.hpp"
#include "nl4s/spectral.hpp"

namespace nl4s::experiments {

/// Analytic initial profile families.
///   gaussian          amp * exp(-|x|^2 / (2 width^2))
///   moment-vanishing  transform amp * (i xi)^m exp(-xi^2), d = 1 only
///   scaled            a * gaussian(amp, width)
struct Profile {
  std::string family = "gaussian";
  double amp = 1.0;
  double width = 1.0;
  int m = 2;
  double a = 1.0;

  void validate(int dim) const {
    if (family != "gaussian" && family != "moment-vanishing" && family != "scaled") {
      throw ConfigError("unknown profile family '" + family + "'");
    }
    if (!(width > 0.0)) throw ConfigError("profile width must be > 0");
    if (family == "moment-vanishing") {
      if (dim != 1) throw ConfigError("moment-vanishing profiles are only constructed in d = 1");
      if (m < 0) throw ConfigError("moment order m must be >= 0");
    }
    if (family == "scaled" && !(a >= 0.5 && a <= 2.0)) {
      throw ConfigError("scaled profile amplitude a must lie in [1/2, 2]");
    }
  }

  /// Guarantees a transform vanishing like |xi|^kappa at the origin.
  static Profile moment_vanishing_for(double kappa, double amp = 1.0) {
    Profile p;
    p.family = "moment-vanishing";
    p.amp = amp;
    p.m = std::max(0, static_cast<int>(std::ceil(kappa - 1e-12)));
    return p;
  }

  double factor() const { return family == "scaled" ? a * amp : amp; }

  cplx physical(const Point& x, int dim) const {
    if (family == "moment-vanishing") {
      // d^m/dx^m of exp(-x^2/4)/(2 sqrt(pi)) = (-1/2)^m H_m(x/2) exp(-x^2/4)/(2 sqrt(pi))
      const double y = 0.5 * x[0];
      const double c = std::pow(-0.5, m) / (2.0 * std::sqrt(std::numbers::pi));
      return amp * c * boost::math::hermite(static_cast<unsigned>(m), y) * std::exp(-y * y);
    }
    const double r2 = x[0] * x[0] + (dim > 1 ? x[1] * x[1] : 0.0);
    return factor() * std::exp(-0.5 * r2 / (width * width));
  }

  cplx fourier(const Point& xi, int dim) const {
    if (family == "moment-vanishing") {
      return amp * std::pow(cplx(0.0, xi[0]), m) * std::exp(-xi[0] * xi[0]);
    }
    const double r2 = xi[0] * xi[0] + (dim > 1 ? xi[1] * xi[1] : 0.0);
    const double norm = std::pow(2.0 * std::numbers::pi * width * width, 0.5 * dim);
    return factor() * norm * std::exp(-0.5 * width * width * r2);
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"family", family}, {"amp", amp}};
    if (family == "moment-vanishing") {
      j["m"] = m;
    } else {
      j["width"] = width;
    }
    if (family == "scaled") j["a"] = a;
    return j;
  }
};

/// phi0 on `grid`. Moment-vanishing profiles are filled in Fourier space so
/// the zero mode is exactly zero.
inline Field build_phi0(const Profile& p, const Grid& grid) {
  p.validate(grid.dim());
  if (p.family == "moment-vanishing") {
    return to_physical(
        Field::sample_fourier(grid, [&](const Point& xi) { return p.fourier(xi, grid.dim()); }));
  }
  return Field::sample(grid, [&](const Point& x) { return p.physical(x, grid.dim()); });
}

/// prefactor * phi0(scale * x), built directly on `grid`.
inline Field build_dilated(const Profile& p, const Grid& grid, double scale, double prefactor) {
  p.validate(grid.dim());
  const int d = grid.dim();
  if (p.family == "moment-vanishing") {
    const double jac = prefactor / std::pow(scale, d);
    return to_physical(Field::sample_fourier(grid, [&](const Point& xi) {
      return jac * p.fourier({xi[0] / scale, xi[1] / scale}, d);
    }));
  }
  return Field::sample(grid, [&](const Point& x) {
    return prefactor * p.physical({scale * x[0], scale * x[1]}, d);
  });
}

/// Parses "gaussian", "gaussian:amp=2,width=0.5", "moment-vanishing:m=2,amp=8",
/// "scaled:a=1.15".
inline Profile parse_profile(const std::string& spec) {
  Profile p;
  const auto colon = spec.find(':');
  p.family = spec.substr(0, colon);
  if (colon == std::string::npos) return p;
  std::string rest = spec.substr(colon + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    auto comma = rest.find(',', pos);
    if (comma == std::string::npos) comma = rest.size();
    const std::string item = rest.substr(pos, comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("profile parameter '" + item + "' needs key=value");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw ConfigError("profile parameter '" + item + "' is not numeric");
    }
    if (key == "amp") {
      p.amp = value;
    } else if (key == "width") {
      p.width = value;
    } else if (key == "m") {
      p.m = static_cast<int>(value);
    } else if (key == "a") {
      p.a = value;
    } else {
      throw ConfigError("unknown profile parameter '" + key + "'");
    }
    pos = comma + 1;
  }
  return p;
}

}  // namespace nl4s::experiments
