#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "specpart/errors.hpp"
#include "specpart/io.hpp"
#include "specpart/region.hpp"

using namespace specpart;

namespace {

DomainMask square_mask(double h) {
  const auto g = GridSpec::window(2, {0, 0}, {1, 1}, h);
  return build_mask(Region::rect({0, 0}, {1, 1}), g, "square");
}

}  // namespace

TEST_CASE("field dump round trip is bit exact") {
  const DomainMask m = square_mask(0.25);
  Field f(m);
  double v = 0.1;
  for (const auto p : m.points()) f.set(p, v *= -1.7);
  const auto bytes = io::encode_field(f);
  REQUIRE(bytes.size() == 16 + 8 * m.grid().size());
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "SPFD");
  CHECK(bytes[4] == 2);
  CHECK(bytes[8] == 5);
  CHECK(bytes[12] == 5);

  const auto d = io::decode_field(bytes);
  CHECK(d.dim == 2);
  CHECK(d.count[0] == 5);
  CHECK(d.count[1] == 5);
  for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(d.values[i] == f[i]);

  const auto path = std::filesystem::temp_directory_path() / "specpart_io_test" / "f.spfd";
  io::write_field(path, f);
  CHECK(io::read_field(path).values == d.values);
  std::filesystem::remove_all(path.parent_path());
}

TEST_CASE("field dump of 1.0 has the little-endian IEEE pattern") {
  const auto g = GridSpec::window(1, {0, 0}, {1, 0}, 0.5);
  const DomainMask m = build_mask(Region::rect({0, 0}, {1, 0}), g, "interval");
  Field f(m);
  f.set(1, 1.0);
  const auto b = io::encode_field(f);
  REQUIRE(b.size() == 16 + 3 * 8);
  CHECK(b[8] == 3);
  CHECK(b[12] == 1);
  const std::vector<std::uint8_t> one{0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
  CHECK(std::vector<std::uint8_t>(b.begin() + 24, b.begin() + 32) == one);
}

TEST_CASE("decode rejects malformed dumps") {
  std::vector<std::uint8_t> junk{'S', 'P', 'F', 'X', 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(io::decode_field(junk), ValidationError);
  junk[3] = 'D';
  junk[4] = 1;
  junk[8] = 2;
  junk[12] = 1;
  CHECK_THROWS_AS(io::decode_field(junk), ValidationError);
}

TEST_CASE("csv writers") {
  std::vector<Eigenpair> pairs(2);
  pairs[0].lambda = 2.0;
  pairs[0].residual = 1e-12;
  pairs[1].lambda = 0.1;
  pairs[1].residual = 0.0;
  std::ostringstream os;
  io::write_eigen_csv(os, pairs);
  CHECK(os.str() == "index,lambda,residual\n1,2,1e-12\n2,0.1,0\n");

  PerssonSweep s;
  s.entries = {{1.0, 0.5, true}, {2.5, 0.75, false}};
  std::ostringstream ss;
  io::write_sweep_csv(ss, s);
  CHECK(ss.str() == "r,lambda,monotone_ok\n1,0.5,true\n2.5,0.75,false\n");
}

TEST_CASE("format_double round trips") {
  for (const double x : {0.1, 1.0 / 3.0, 5.0, 1e-300, -2.5e17}) {
    CHECK(std::stod(io::format_double(x)) == x);
  }
  CHECK(io::format_double(5.0) == "5");
}

TEST_CASE("pgm labels cells from the top row down") {
  const auto g = GridSpec::window(2, {0, 0}, {1, 1}, 0.25);
  const DomainMask lower = build_mask(Region::rect({0, 0}, {1, 0.5}), g, "lower");
  const DomainMask upper = build_mask(Region::rect({0, 0.5}, {1, 1}), g, "upper");
  std::vector<DomainMask> cells{lower, upper};
  std::ostringstream os;
  io::write_pgm(os, g, cells);
  const std::string s = os.str();
  const std::string header = "P5\n5 5\n2\n";
  REQUIRE(s.size() == header.size() + 25);
  CHECK(s.substr(0, header.size()) == header);
  const std::string px = s.substr(header.size());
  // row 0 of the image is y = 1 (window boundary), row 1 is y = 0.75
  CHECK(px[0 * 5 + 2] == 0);
  CHECK(px[1 * 5 + 2] == 2);
  CHECK(px[3 * 5 + 2] == 1);
  CHECK(px[4 * 5 + 2] == 0);

  const auto other = GridSpec::window(2, {0, 0}, {1, 1}, 0.5);
  std::ostringstream bad;
  CHECK_THROWS_AS(io::write_pgm(bad, other, cells), GridMismatch);
}

TEST_CASE("content hash matches git blob ids") {
  CHECK(io::content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(io::content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}
