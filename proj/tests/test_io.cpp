#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "nl4s/experiments/records.hpp"
#include "nl4s/field_io.hpp"
#include "nl4s/spectral.hpp"

using namespace nl4s;

namespace {

Field random_field(const Grid& g, Space s, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  std::vector<cplx> v(g.size());
  for (auto& z : v) z = {n(rng), n(rng)};
  return Field(g, std::move(v), s);
}

bool bitwise_equal(const Field& a, const Field& b) {
  return a.grid() == b.grid() && a.space() == b.space() && a.size() == b.size() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(cplx)) == 0;
}

}  // namespace

TEST(BinaryIo, RoundTripIsBitwise) {
  for (int dim : {1, 2}) {
    for (Space s : {Space::physical, Space::fourier}) {
      const Field f = random_field(Grid(dim, {3.5, 7.25}, {32, 16}), s, 11);
      std::stringstream ss;
      io::write_binary(ss, f);
      EXPECT_EQ(ss.str().size(), io::kHeaderBytes + f.size() * 16);
      const Field g = io::read_binary(ss);
      EXPECT_TRUE(bitwise_equal(f, g));
      EXPECT_EQ(sobolev_norm(f, {1.0, false}), sobolev_norm(g, {1.0, false}));
    }
  }
}

TEST(BinaryIo, HeaderLayout) {
  const Field f = random_field(make_grid(1, 16.0, 64), Space::fourier, 2);
  std::stringstream ss;
  io::write_binary(ss, f);
  const std::string b = ss.str();
  EXPECT_EQ(b.substr(0, 7), "NL4SFLD");
  std::uint32_t u;
  double e;
  std::memcpy(&u, b.data() + 12, 4);
  EXPECT_EQ(u, 1u);
  std::memcpy(&u, b.data() + 16, 4);
  EXPECT_EQ(u, 64u);
  std::memcpy(&e, b.data() + 24, 8);
  EXPECT_EQ(e, 16.0);
  std::memcpy(&u, b.data() + 40, 4);
  EXPECT_EQ(u, 1u);
  double re;
  std::memcpy(&re, b.data() + 64, 8);
  EXPECT_EQ(re, f[0].real());
}

TEST(BinaryIo, RejectsCorruptInput) {
  std::stringstream bad("not a field at all, definitely longer than sixty-four bytes of header......");
  EXPECT_THROW(io::read_binary(bad), ConfigError);
  const Field f = random_field(make_grid(1, 1.0, 16), Space::physical, 3);
  std::stringstream ss;
  io::write_binary(ss, f);
  std::string s = ss.str();
  std::stringstream truncated(s.substr(0, s.size() - 8));
  EXPECT_THROW(io::read_binary(truncated), ConfigError);
}

TEST(JsonIo, RoundTripAndFileDispatch) {
  const Field f = random_field(make_grid(2, 2.0, 8), Space::physical, 5);
  const Field g = io::field_from_json(io::to_json(f));
  EXPECT_TRUE(bitwise_equal(f, g));

  const auto dir = std::filesystem::temp_directory_path() / "nl4s_io_test";
  std::filesystem::create_directories(dir);
  io::save_binary(dir / "f.bin", f);
  EXPECT_TRUE(bitwise_equal(io::load_field(dir / "f.bin"), f));
  {
    std::ofstream os(dir / "f.json");
    os << io::to_json(f).dump();
  }
  EXPECT_TRUE(bitwise_equal(io::load_field(dir / "f.json"), f));
  EXPECT_THROW(io::load_field(dir / "missing.bin"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Records, CsvQuotingAndFlattening) {
  EXPECT_EQ(experiments::csv_field("plain"), "plain");
  EXPECT_EQ(experiments::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(experiments::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::ostringstream os;
  experiments::write_csv(os, {{{"a", 1}, {"grid", {{"points", {256}}}}}, {{"b", "x,y"}, {"a", 2.5}}});
  EXPECT_EQ(os.str(), "a,b,grid.points\n1,,256\n2.5,\"x,y\",\n");
}

TEST(Records, JsonlOneObjectPerLine) {
  std::ostringstream os;
  experiments::JsonlWriter w(os);
  w.write({{"t", 0.5}});
  w.write({{"s", "line\nbreak"}});
  const std::string s = os.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  std::istringstream is(s);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(nlohmann::json::parse(line)["t"], 0.5);
}
