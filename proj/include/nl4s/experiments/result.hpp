#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nl4s/experiments/fit.hpp"
#include "nl4s/field_io.hpp"
#include "nl4s/grid.hpp"

namespace nl4s::experiments {

/// One acceptance rule evaluated by a study.
struct Check {
  std::string rule;
  bool pass = false;
  double measured = 0.0;
  std::string expected;
};

struct NamedFit {
  std::string name;
  SlopeFit fit;
  /// Target slope, when the law predicts one.
  std::optional<double> target;
};

struct StudyResult {
  std::string study;
  nlohmann::json config = nlohmann::json::object();
  std::string config_hash;
  std::vector<nlohmann::json> records;
  std::vector<NamedFit> fits;
  std::vector<Check> checks;
  /// Scalars worth surfacing in the summary (fitted constants, floors, ...).
  nlohmann::json reported = nlohmann::json::object();

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  void check(std::string rule, bool ok, double measured, std::string expected) {
    checks.push_back({std::move(rule), ok, measured, std::move(expected)});
  }

  const Check& check_named(const std::string& rule) const {
    for (const auto& c : checks) {
      if (c.rule == rule) return c;
    }
    throw std::out_of_range("no check named " + rule);
  }

  const NamedFit& fit_named(const std::string& name) const {
    for (const auto& f : fits) {
      if (f.name == name) return f;
    }
    throw std::out_of_range("no fit named " + name);
  }

  nlohmann::json summary() const {
    nlohmann::json j{{"study", study}, {"config_hash", config_hash}, {"pass", pass()}};
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      j["checks"].push_back(
          {{"rule", c.rule}, {"pass", c.pass}, {"measured", c.measured}, {"expected", c.expected}});
    }
    j["fits"] = nlohmann::json::object();
    for (const auto& f : fits) {
      auto fj = f.fit.to_json();
      fj.erase("points");
      if (f.target) fj["target"] = *f.target;
      j["fits"][f.name] = fj;
    }
    j["reported"] = reported;
    return j;
  }
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Hash of the canonical (sorted-key) dump of a resolved configuration.
inline std::string config_hash(const std::string& study, const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(study + "|" + config.dump())));
  return buf;
}

/// Stamps every record with the provenance fields.
inline void stamp_provenance(StudyResult& r, const Grid& grid, double dt, int seed) {
  r.config_hash = config_hash(r.study, r.config);
  for (auto& rec : r.records) {
    rec["study"] = r.study;
    rec["config_hash"] = r.config_hash;
    rec["seed"] = seed;
    if (!rec.contains("grid")) rec["grid"] = io::grid_json(grid);
    if (!rec.contains("dt")) rec["dt"] = dt;
  }
}

}  // namespace nl4s::experiments
