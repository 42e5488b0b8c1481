#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "esmda/csv.hpp"
#include "esmda/errors.hpp"

namespace {

std::filesystem::path temp_file(const std::string& name,
                                const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << contents;
    return path;
}

} // namespace

TEST_CASE("format/parse round-trips doubles exactly") {
    const std::vector<double> values = {
        0.0,       1.0,           -1.0,     0.1,
        1.0 / 3.0, 1e-300,        1e300,    3.141592653589793,
        -2.5e-8,   36.787944117144247};
    for (const double v : values) {
        const std::string text = esmda::csv::format_value(v);
        CAPTURE(text);
        CHECK(esmda::csv::parse_value(text, "test") == v);
    }
    // Negative zero keeps its sign through the round trip.
    const std::string nz = esmda::csv::format_value(-0.0);
    CHECK(std::signbit(esmda::csv::parse_value(nz, "test")));
}

TEST_CASE("parse_value rejects junk and non-finite text") {
    CHECK_THROWS_AS(esmda::csv::parse_value("", "t"), esmda::ConfigError);
    CHECK_THROWS_AS(esmda::csv::parse_value("1.5x", "t"), esmda::ConfigError);
    CHECK_THROWS_AS(esmda::csv::parse_value("1,5", "t"), esmda::ConfigError);
    CHECK_THROWS_AS(esmda::csv::parse_value("inf", "t"), esmda::ConfigError);
    CHECK_THROWS_AS(esmda::csv::parse_value("nan", "t"), esmda::ConfigError);
}

TEST_CASE("write_row uses commas and LF") {
    std::ostringstream out;
    const double row[] = {1.5, -2.0, 0.25};
    esmda::csv::write_row(out, row, 3);
    CHECK(out.str() == "1.5,-2,0.25\n");
}

TEST_CASE("read_table detects a header line") {
    std::istringstream in("a,b\n1,2\n3,4\n");
    const auto t = esmda::csv::read_table(in, "mem");
    REQUIRE(t.header.size() == 2);
    CHECK(t.header[0] == "a");
    CHECK(t.header[1] == "b");
    REQUIRE(t.values.rows() == 2);
    REQUIRE(t.values.cols() == 2);
    CHECK(t.values(0, 0) == 1.0);
    CHECK(t.values(1, 1) == 4.0);
}

TEST_CASE("read_table without header") {
    std::istringstream in("1,2\n3,4\n");
    const auto t = esmda::csv::read_table(in, "mem");
    CHECK(t.header.empty());
    REQUIRE(t.values.rows() == 2);
    CHECK(t.values(1, 0) == 3.0);
}

TEST_CASE("read_table tolerates CRLF and blank lines") {
    std::istringstream in("x\r\n\r\n1.5\r\n-2\r\n");
    const auto t = esmda::csv::read_table(in, "mem");
    REQUIRE(t.header.size() == 1);
    CHECK(t.header[0] == "x");
    REQUIRE(t.values.rows() == 2);
    CHECK(t.values(0, 0) == 1.5);
    CHECK(t.values(1, 0) == -2.0);
}

TEST_CASE("read_table rejects ragged rows, naming the line") {
    std::istringstream in("1,2\n3\n");
    CHECK_THROWS_WITH_AS(esmda::csv::read_table(in, "mem"),
                         doctest::Contains("line 2"), esmda::ConfigError);
}

TEST_CASE("file helpers") {
    const auto path = temp_file("esmda_csv_test.csv", "h0,h1\n1,2\n3,4\n");
    const auto t = esmda::csv::read_table_file(path);
    CHECK(t.values.rows() == 2);
    const auto flat = esmda::csv::read_vector_file(path);
    REQUIRE(flat.size() == 4);
    CHECK(flat[0] == 1.0);
    CHECK(flat[3] == 4.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(esmda::csv::read_table_file(path), esmda::ConfigError);
}
