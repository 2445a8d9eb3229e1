#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nl4s/errors.hpp"

namespace nl4s::experiments {

/// Least-squares line through (log x, log y).
struct SlopeFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;

  double predict_log(double log_x) const { return intercept + slope * log_x; }

  nlohmann::json to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [lx, ly] : points) pts.push_back({lx, ly});
    return {{"slope", slope}, {"intercept", intercept}, {"r2", r2}, {"points", pts}};
  }
};

inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("fit_loglog: x and y differ in length");
  if (x.size() < 3) throw ConfigError("fit_loglog: at least three points are required");
  SlopeFit f;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw NumericalGuardError("fit_loglog: non-positive or non-finite value at point " +
                                std::to_string(i));
    }
    f.points.emplace_back(std::log(x[i]), std::log(y[i]));
  }
  const double n = static_cast<double>(f.points.size());
  double sx = 0, sy = 0;
  for (const auto& [lx, ly] : f.points) {
    sx += lx;
    sy += ly;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [lx, ly] : f.points) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
    syy += (ly - my) * (ly - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_loglog: x values are all equal");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (const auto& [lx, ly] : f.points) {
    const double r = ly - f.predict_log(lx);
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

}  // namespace nl4s::experiments
