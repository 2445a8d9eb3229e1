#pragma once

#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nl4s/errors.hpp"
#include "nl4s/experiments/result.hpp"

namespace nl4s::experiments {

/// Flattens nested objects into dotted keys; arrays of scalars become
/// semicolon-joined text.
inline void flatten(const nlohmann::json& j, const std::string& prefix,
                    std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  if (j.is_array()) {
    std::string s;
    for (const auto& e : j) {
      if (!s.empty()) s += ';';
      s += e.is_string() ? e.get<std::string>() : e.dump();
    }
    out[prefix] = s;
    return;
  }
  out[prefix] = j.is_string() ? j.get<std::string>() : j.dump();
}

/// RFC 4180 quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<nlohmann::json>& rows) {
  std::vector<std::map<std::string, std::string>> flat;
  std::set<std::string> keys;
  for (const auto& r : rows) {
    flat.emplace_back();
    flatten(r, "", flat.back());
    for (const auto& [k, v] : flat.back()) keys.insert(k);
  }
  bool first = true;
  for (const auto& k : keys) {
    os << (first ? "" : ",") << csv_field(k);
    first = false;
  }
  os << '\n';
  for (const auto& f : flat) {
    first = true;
    for (const auto& k : keys) {
      const auto it = f.find(k);
      os << (first ? "" : ",") << (it == f.end() ? "" : csv_field(it->second));
      first = false;
    }
    os << '\n';
  }
}

/// Serializes appends to one output stream.
class JsonlWriter {
public:
  explicit JsonlWriter(std::ostream& os) : os_(os) {}
  void write(const nlohmann::json& j) {
    std::lock_guard<std::mutex> lock(mu_);
    os_ << j.dump() << '\n';
  }

private:
  std::ostream& os_;
  std::mutex mu_;
};

/// x, y and fitted y for every fit, in log-log coordinates mapped back.
inline void write_fit_csv(std::ostream& os, const StudyResult& r) {
  os << "study,config_hash,fit,x,y,y_fit,slope,intercept,r2\n";
  for (const auto& f : r.fits) {
    for (const auto& [lx, ly] : f.fit.points) {
      os << csv_field(r.study) << ',' << r.config_hash << ',' << csv_field(f.name) << ','
         << nlohmann::json(std::exp(lx)).dump() << ',' << nlohmann::json(std::exp(ly)).dump()
         << ',' << nlohmann::json(std::exp(f.fit.predict_log(lx))).dump() << ','
         << nlohmann::json(f.fit.slope).dump() << ',' << nlohmann::json(f.fit.intercept).dump()
         << ',' << nlohmann::json(f.fit.r2).dump() << '\n';
    }
  }
}

}  // namespace nl4s::experiments
