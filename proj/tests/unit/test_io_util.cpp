#include <doctest.h>

#include <cstdlib>
#include <string>
#include <string_view>

#include "dupweight/error.hpp"
#include "dupweight/io_util.hpp"
#include "support/fixtures.hpp"

using namespace dupweight;

TEST_CASE("format_double round-trips bit-exactly") {
  const double values[] = {0.0,
                           1.0,
                           -1.0,
                           0.1,
                           1.0 / 3.0,
                           0.13427734375,
                           -99.0 * 2.302585092994045684,
                           1e-300,
                           1.7976931348623157e308,
                           4.9406564584124654e-324};
  for (double v : values) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    // Identical doubles must always produce identical bytes.
    CHECK(format_double(v) == s);
  }
}

TEST_CASE("format_double prefers the shorter representation") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.25) == "-0.25");
}

TEST_CASE("write_file and read_file round-trip arbitrary bytes") {
  fx::TempDir dir;
  const std::string path = dir.file("raw.bin");
  const std::string payload("a\0b\nno-trailing-newline", 23);
  write_file(path, payload);
  CHECK(read_file(path) == payload);

  write_file(path, "");  // truncates
  CHECK(read_file(path).empty());

  CHECK_THROWS_AS(read_file(dir.file("absent")), DataError);
}

TEST_CASE("ensure_dir creates nested directories idempotently") {
  fx::TempDir dir;
  const std::string nested = dir.file("a/b/c");
  ensure_dir(nested);
  CHECK(file_exists(nested));
  ensure_dir(nested);  // second call is a no-op
  CHECK(file_exists(nested));
}

TEST_CASE("path_join and basename_of") {
  CHECK(path_join("dir", "f.txt") == "dir/f.txt");
  CHECK(path_join("dir/", "f.txt") == "dir/f.txt");
  CHECK(path_join("", "f.txt") == "f.txt");
  CHECK(basename_of("a/b/c.txt") == "c.txt");
  CHECK(basename_of("c.txt") == "c.txt");
}

TEST_CASE("StringMap supports heterogeneous string_view lookups") {
  StringMap<int> m;
  m.emplace("alpha", 1);
  m.emplace("beta", 2);
  const std::string_view key = "alpha";
  auto it = m.find(key);  // no std::string temporary required
  REQUIRE(it != m.end());
  CHECK(it->second == 1);
  CHECK(m.find(std::string_view("gamma")) == m.end());
}
