#include <doctest.h>

#include "metroscale/csv.hpp"
#include "metroscale/errors.hpp"

using namespace metroscale;

TEST_CASE("csv parses header and rows") {
    const auto t = csv::read_string("a,b,c\n1,2,3\n4,5,6\n");
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][2] == "6");
    CHECK(*t.column("b") == 1);
    CHECK(!t.column("zzz"));
}

TEST_CASE("csv quoted fields with embedded separators and quotes") {
    const auto t = csv::read_string("a,b\n\"x,y\",\"he said \"\"hi\"\"\"\n");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == "x,y");
    CHECK(t.rows[0][1] == "he said \"hi\"");
}

TEST_CASE("csv ragged row reports line number") {
    try {
        csv::read_string("a,b\n1,2\n3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("csv round trip through a file") {
    csv::Table t;
    t.header = {"id", "note"};
    t.rows = {{"1", "plain"}, {"2", "with,comma"}};
    const std::string path = "csv_roundtrip_test.csv";
    csv::write_file(path, t);
    const auto back = csv::read_file(path);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    std::remove(path.c_str());
}

TEST_CASE("parse_number accepts scientific notation, rejects junk") {
    CHECK(csv::parse_number("1.5e3") == doctest::Approx(1500.0));
    CHECK(csv::parse_number("-2") == doctest::Approx(-2.0));
    CHECK_THROWS_AS(csv::parse_number("12abc"), ParseError);
    CHECK_THROWS_AS(csv::parse_number(""), ParseError);
}
