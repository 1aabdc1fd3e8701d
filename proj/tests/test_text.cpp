#include <doctest.h>

#include "mnemo/text.hpp"

using namespace mnemo;

TEST_CASE("tokenize splits on whitespace and hyphens, strips punctuation") {
  auto t = tokenize("An ex-champion horse, turned stiff!");
  CHECK(t == std::vector<std::string>{"an", "ex", "champion", "horse",
                                      "turned", "stiff"});
}

TEST_CASE("tokenize drops empty pieces and lowercases") {
  CHECK(tokenize("  Hello,   WORLD...  ") ==
        std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("- -- -").empty());
}

TEST_CASE("utf8_decode counts scalar values, not bytes") {
  CHECK(utf8_decode("hɛn").size() == 3);
  CHECK(utf8_decode("aʊɔɪ").size() == 4);
  CHECK(utf8_decode("abc").size() == 3);
  CHECK(utf8_decode("").empty());
}

TEST_CASE("fill_template replaces all occurrences") {
  CHECK(fill_template("{x} and {x} or {y}", "x", "A") == "A and A or {y}");
}

TEST_CASE("fnv1a64_hex is stable") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == fnv1a64_hex("a"));
  CHECK(fnv1a64_hex("a") != fnv1a64_hex("b"));
}

TEST_CASE("split_lines handles crlf and trailing newline") {
  auto ls = split_lines("a\r\nb\nc\n");
  CHECK(ls == std::vector<std::string>{"a", "b", "c"});
}
