#include <doctest.h>

#include "pcaret/csv.hpp"
#include "pcaret/errors.hpp"

using namespace pcaret;

TEST_CASE("plain rows split on commas and newlines") {
    auto recs = parse_csv("a,b,c\n1,2,3\n");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].fields == std::vector<std::string>{"a", "b", "c"});
    CHECK(recs[1].fields == std::vector<std::string>{"1", "2", "3"});
    CHECK(recs[1].line == 2);
}

TEST_CASE("quoted fields keep commas, escaped quotes and newlines") {
    auto recs = parse_csv("x,y\n\"a,b\",\"he said \"\"hi\"\"\"\n\"line1\nline2\",z\n");
    REQUIRE(recs.size() == 3);
    CHECK(recs[1].fields[0] == "a,b");
    CHECK(recs[1].fields[1] == "he said \"hi\"");
    CHECK(recs[2].fields[0] == "line1\nline2");
}

TEST_CASE("crlf and missing trailing newline") {
    auto recs = parse_csv("a,b\r\n1,2");
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].fields == std::vector<std::string>{"1", "2"});
}

TEST_CASE("blank lines are skipped") {
    auto recs = parse_csv("a\n\n\nb\n");
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].fields[0] == "b");
    CHECK(recs[1].line == 4);
}

TEST_CASE("unterminated quote is an error") {
    CHECK_THROWS_AS(parse_csv("a,\"open\n"), DataError);
}

TEST_CASE("escape round trip") {
    std::vector<std::string> fields{"plain", "with,comma", "with\"quote", "with\nnewline"};
    auto joined = csv_join(fields);
    auto recs = parse_csv(joined + "\n");
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].fields == fields);
}
