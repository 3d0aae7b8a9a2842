#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "mixnet/csv.hpp"
#include "mixnet/errors.hpp"

using mixnet::csv_escape;
using mixnet::format_double;
using mixnet::parse_csv;
using mixnet::RawTable;

static RawTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

TEST_CASE("plain table parses with header") {
  RawTable t = parse("a,b\n1,2\n3,4\n");
  CHECK(t.n_cols() == 2);
  CHECK(t.n_rows() == 2);
  CHECK(t.names[0] == "a");
  CHECK(t.columns[1][1] == "4");
}

TEST_CASE("quoted fields with commas, quotes, and newlines") {
  RawTable t = parse("name,note\n\"x,y\",\"he said \"\"hi\"\"\"\n\"line\nbreak\",z\n");
  CHECK(t.columns[0][0] == "x,y");
  CHECK(t.columns[1][0] == "he said \"hi\"");
  CHECK(t.columns[0][1] == "line\nbreak");
}

TEST_CASE("CRLF endings and missing trailing newline are accepted") {
  RawTable t = parse("a,b\r\n1,2\r\n3,4");
  CHECK(t.n_rows() == 2);
  CHECK(t.columns[0][1] == "3");
}

TEST_CASE("ragged rows are rejected") {
  CHECK_THROWS_AS(parse("a,b\n1\n"), mixnet::DataError);
  CHECK_THROWS_AS(parse("a,b\n1,2,3\n"), mixnet::DataError);
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 1.0 / 3.0, 3.141592653589793,
                   1e-300, -2.2250738585072014e-308, 12345678.9012345}) {
    std::string s = format_double(v);
    double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("format_double prefers short forms") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-3.0) == "-3");
}

TEST_CASE("csv_escape quotes only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("q\"q") == "\"q\"\"q\"");
  CHECK(csv_escape("nl\n") == "\"nl\n\"");
}

TEST_CASE("escape and parse round-trip arbitrary fields") {
  std::string tricky = "a,\"b\"\nc";
  std::string doc = "h\n" + csv_escape(tricky) + "\n";
  RawTable t = parse(doc);
  CHECK(t.columns[0][0] == tricky);
}
