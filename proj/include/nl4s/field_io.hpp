#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nl4s/errors.hpp"
#include "nl4s/field.hpp"

namespace nl4s::io {

// Binary field layout, little-endian throughout:
//   [0,8)   magic "NL4SFLD\0"
//   [8,12)  u32 format version
//   [12,16) u32 dim
//   [16,20) u32 points axis 0
//   [20,24) u32 points axis 1 (1 when dim == 1)
//   [24,32) f64 extent axis 0
//   [32,40) f64 extent axis 1 (1.0 when dim == 1)
//   [40,44) u32 space (0 physical, 1 fourier)
//   [44,64) reserved, zero
// followed by size() interleaved (re, im) f64 pairs.
inline constexpr std::array<char, 8> kMagic{'N', 'L', '4', 'S', 'F', 'L', 'D', '\0'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 64;

static_assert(std::endian::native == std::endian::little,
              "binary field format assumes a little-endian host");

namespace detail {

template <class T>
void put(std::array<unsigned char, kHeaderBytes>& h, std::size_t at, T v) {
  std::memcpy(h.data() + at, &v, sizeof(T));
}

template <class T>
T get(const std::array<unsigned char, kHeaderBytes>& h, std::size_t at) {
  T v;
  std::memcpy(&v, h.data() + at, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_binary(std::ostream& os, const Field& f) {
  std::array<unsigned char, kHeaderBytes> h{};
  std::memcpy(h.data(), kMagic.data(), kMagic.size());
  const Grid& g = f.grid();
  detail::put<std::uint32_t>(h, 8, kVersion);
  detail::put<std::uint32_t>(h, 12, static_cast<std::uint32_t>(g.dim()));
  detail::put<std::uint32_t>(h, 16, static_cast<std::uint32_t>(g.points(0)));
  detail::put<std::uint32_t>(h, 20, static_cast<std::uint32_t>(g.points(1)));
  detail::put<double>(h, 24, g.extent(0));
  detail::put<double>(h, 32, g.extent(1));
  detail::put<std::uint32_t>(h, 40, f.space() == Space::physical ? 0u : 1u);
  os.write(reinterpret_cast<const char*>(h.data()), h.size());
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("write_binary: stream error");
}

inline Field read_binary(std::istream& is) {
  std::array<unsigned char, kHeaderBytes> h{};
  is.read(reinterpret_cast<char*>(h.data()), h.size());
  if (!is || std::memcmp(h.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ConfigError("read_binary: not a field file (bad magic)");
  }
  if (detail::get<std::uint32_t>(h, 8) != kVersion) {
    throw ConfigError("read_binary: unsupported format version");
  }
  const int dim = static_cast<int>(detail::get<std::uint32_t>(h, 12));
  const int n0 = static_cast<int>(detail::get<std::uint32_t>(h, 16));
  const int n1 = static_cast<int>(detail::get<std::uint32_t>(h, 20));
  const Grid g(dim, {detail::get<double>(h, 24), detail::get<double>(h, 32)},
               {n0, dim > 1 ? n1 : n0});
  const Space s = detail::get<std::uint32_t>(h, 40) == 0 ? Space::physical : Space::fourier;
  std::vector<cplx> v(g.size());
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
  if (!is) throw ConfigError("read_binary: truncated sample block");
  return Field(g, std::move(v), s);
}

inline void save_binary(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  write_binary(os, f);
}

inline Field load_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  return read_binary(is);
}

inline nlohmann::json grid_json(const Grid& g) {
  nlohmann::json j;
  j["dim"] = g.dim();
  j["extent"] = nlohmann::json::array();
  j["points"] = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) {
    j["extent"].push_back(g.extent(a));
    j["points"].push_back(g.points(a));
  }
  return j;
}

inline Grid grid_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  const auto& e = j.at("extent");
  const auto& p = j.at("points");
  if (static_cast<int>(e.size()) != dim || static_cast<int>(p.size()) != dim) {
    throw ConfigError("grid json: extent/points length must equal dim");
  }
  return Grid(dim, {e[0].get<double>(), dim > 1 ? e[1].get<double>() : 1.0},
              {p[0].get<int>(), dim > 1 ? p[1].get<int>() : p[0].get<int>()});
}

/// JSON container: {"grid": {...}, "space": "...", "data": [re0, im0, re1, ...]}.
inline nlohmann::json to_json(const Field& f) {
  nlohmann::json j;
  j["grid"] = grid_json(f.grid());
  j["space"] = std::string(to_string(f.space()));
  std::vector<double> data;
  data.reserve(2 * f.size());
  for (const auto& z : f.values()) {
    data.push_back(z.real());
    data.push_back(z.imag());
  }
  j["data"] = std::move(data);
  return j;
}

inline Field field_from_json(const nlohmann::json& j) {
  const Grid g = grid_from_json(j.at("grid"));
  const auto& data = j.at("data");
  if (data.size() != 2 * g.size()) throw ConfigError("field json: data length mismatch");
  std::vector<cplx> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = cplx(data[2 * i].get<double>(), data[2 * i + 1].get<double>());
  }
  const auto space = j.at("space").get<std::string>();
  if (space != "physical" && space != "fourier") throw ConfigError("field json: bad space flag");
  return Field(g, std::move(v), space == "physical" ? Space::physical : Space::fourier);
}

/// Loads either format, chosen by extension (.json) or magic bytes.
inline Field load_field(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    return field_from_json(nlohmann::json::parse(is));
  }
  return load_binary(path);
}

}  // namespace nl4s::io
