#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ma/error.hpp"
#include "ma/text_format.hpp"

using namespace ma;

TEST_CASE("format_double round-trips exactly") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5000; ++i) {
    const double value = std::uniform_real_distribution<double>(-1e9, 1e9)(rng);
    CHECK(parse_double(format_double(value)) == value);
  }
  CHECK(parse_double(format_double(0.0)) == 0.0);
  CHECK(parse_double(format_double(1e-300)) == 1e-300);
  CHECK(parse_double(format_double(std::numeric_limits<double>::max())) ==
        std::numeric_limits<double>::max());
}

TEST_CASE("parse_double rejects garbage") {
  CHECK_THROWS_AS(parse_double("abc"), InputError);
  CHECK_THROWS_AS(parse_double("1.5x"), InputError);
  CHECK_THROWS_AS(parse_double(""), InputError);
}

TEST_CASE("parse_int is strict") {
  CHECK(parse_int("-42") == -42);
  CHECK_THROWS_AS(parse_int("12.5"), InputError);
  CHECK_THROWS_AS(parse_int(""), InputError);
}

TEST_CASE("field escaping round-trips awkward strings") {
  for (const char* raw : {"plain", "with space", "tab\there", "percent%sign",
                          "new\nline", "", "%20 already"}) {
    const std::string escaped = escape_field(raw);
    CHECK(escaped.find(' ') == std::string::npos);
    CHECK(escaped.find('\n') == std::string::npos);
    CHECK(unescape_field(escaped) == raw);
  }
  CHECK_THROWS_AS(unescape_field("%2"), InputError);
  CHECK_THROWS_AS(unescape_field("%zz"), InputError);
}

TEST_CASE("split_tokens skips runs of whitespace") {
  const auto tokens = split_tokens("  a\tbb   c ");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0] == "a");
  CHECK(tokens[1] == "bb");
  CHECK(tokens[2] == "c");
  CHECK(split_tokens("").empty());
}
