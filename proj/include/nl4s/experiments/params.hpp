#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "nl4s/errors.hpp"
#include "nl4s/exact.hpp"
#include "nl4s/experiments/profiles.hpp"

namespace nl4s::experiments {

/// Flat study parameters with defaults. Every value read is remembered so the
/// resolved configuration (explicit and defaulted keys alike) can be embedded
/// in records and replayed.
class Params {
public:
  Params() : given_(nlohmann::json::object()) {}
  explicit Params(nlohmann::json given) : given_(std::move(given)) {
    if (!given_.is_object()) throw ConfigError("study parameters must be a key-value object");
  }

  double num(const std::string& key, double def) const {
    const auto& v = lookup(key, def);
    if (!v.is_number()) throw ConfigError("parameter '" + key + "' must be numeric");
    return v.get<double>();
  }

  int integer(const std::string& key, int def) const {
    const double v = num(key, def);
    if (v != static_cast<double>(static_cast<int>(v))) {
      throw ConfigError("parameter '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool def) const {
    const auto& v = lookup(key, def);
    if (!v.is_boolean()) throw ConfigError("parameter '" + key + "' must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& def) const {
    const auto& v = lookup(key, def);
    if (!v.is_string()) throw ConfigError("parameter '" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> nums(const std::string& key, const std::vector<double>& def) const {
    const auto& v = lookup(key, def);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError("parameter '" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError("parameter '" + key + "' must be a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Profile profile(const std::string& key, const std::string& def) const {
    return parse_profile(text(key, def));
  }

  bool has(const std::string& key) const { return given_.contains(key); }

  /// Rejects keys the study never asked for.
  void reject_unknown(const std::string& study) const {
    for (const auto& [k, v] : given_.items()) {
      if (!resolved_.contains(k)) {
        throw ConfigError("study '" + study + "' has no parameter '" + k + "'");
      }
    }
  }

  const nlohmann::json& resolved() const { return resolved_; }
  const nlohmann::json& given() const { return given_; }

private:
  template <class T>
  const nlohmann::json& lookup(const std::string& key, const T& def) const {
    if (given_.contains(key)) {
      resolved_[key] = given_.at(key);
    } else {
      resolved_[key] = def;
    }
    return resolved_.at(key);
  }

  nlohmann::json given_;
  mutable nlohmann::json resolved_ = nlohmann::json::object();
};

/// Converts a config-file scalar: "a, b, c" lists, p/q fractions, numbers,
/// booleans, otherwise text.
inline nlohmann::json parse_value(const std::string& raw) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  const std::string s = trim(raw);
  if (s.find(',') != std::string::npos && s.find(':') == std::string::npos) {
    nlohmann::json arr = nlohmann::json::array();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(parse_value(item));
    return arr;
  }
  if (s == "true" || s == "false") return s == "true";
  try {
    return Real::parse(s).value();
  } catch (const ConfigError&) {
    return s;
  }
}

/// One study invocation: a name plus its parameters.
struct StudyPoint {
  std::string study;
  nlohmann::json params = nlohmann::json::object();
};

/// Run plan read from an INI-style file:
///
///   [study]
///   name = small-dispersion
///   workers = 2
///   [params]
///   deltas = 0.2, 0.1, 0.05
///   [sweep]
///   nu = 3, 5
///
/// Each [sweep] key lists values; the plan is their cartesian product applied
/// over [params], in key order with the last key varying fastest.
struct RunPlan {
  std::vector<StudyPoint> points;
  int workers = 1;
};

inline RunPlan expand_plan(const std::string& study, const nlohmann::json& base,
                           const std::map<std::string, nlohmann::json>& sweep) {
  RunPlan plan;
  std::vector<nlohmann::json> acc{base};
  for (const auto& [key, values] : sweep) {
    const nlohmann::json vals = values.is_array() ? values : nlohmann::json::array({values});
    std::vector<nlohmann::json> next;
    for (const auto& partial : acc) {
      for (const auto& v : vals) {
        auto p = partial;
        p[key] = v;
        next.push_back(std::move(p));
      }
    }
    acc = std::move(next);
  }
  for (auto& p : acc) plan.points.push_back({study, std::move(p)});
  return plan;
}

inline RunPlan read_plan(std::istream& is, const std::string& default_study = "") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  std::string study = default_study;
  int workers = 1;
  nlohmann::json base = nlohmann::json::object();
  std::map<std::string, nlohmann::json> sweep;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' must live inside a [section]");
    }
    if (section == "study") {
      for (const auto& [k, v] : body) {
        if (k == "name") {
          study = v.data();
        } else if (k == "workers") {
          workers = static_cast<int>(parse_value(v.data()).get<double>());
        } else {
          throw ConfigError("unknown key '" + k + "' in [study]");
        }
      }
    } else if (section == "params") {
      for (const auto& [k, v] : body) base[k] = parse_value(v.data());
    } else if (section == "sweep") {
      for (const auto& [k, v] : body) sweep[k] = parse_value(v.data());
    } else {
      throw ConfigError("unknown config section [" + section + "]");
    }
  }
  if (study.empty()) throw ConfigError("config names no study ([study] name = ...)");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  RunPlan plan = expand_plan(study, base, sweep);
  plan.workers = workers;
  return plan;
}

inline RunPlan load_plan(const std::filesystem::path& path, const std::string& default_study = "") {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  return read_plan(is, default_study);
}

}  // namespace nl4s::experiments
