#include <doctest.h>

#include <cmath>

#include "mnemo/lexicon.hpp"
#include "test_support.hpp"

using namespace mnemo;

namespace {

LexiconPaths paths_in(testutil::TempDir& td) {
  LexiconPaths p;
  p.imageability_primary = td.file("glasgow.csv",
                                   "word,rating\n"
                                   "both,5.2\n"
                                   "tree,6.2\n"
                                   "belie,4.5\n");
  p.imageability_secondary = td.file("secondary.csv",
                                     "word,rating\n"
                                     "both,0.8\n"
                                     "mid,0.5\n");
  p.aoa = td.file("aoa.csv",
                  "word,rating\n"
                  "tree,6.8\n"
                  "the,1.8\n");
  p.stopwords = td.file("stop.txt", "the\na\nan\n");
  p.lemmas = td.file("lemmas.tsv", "belies\tbelie\nate\teat\n");
  p.embeddings = td.file("emb.txt",
                         "3 2\n"
                         "tree 1 0\n"
                         "bush 0 1\n"
                         "belie 1 1\n");
  return p;
}

} // namespace

TEST_CASE("primary imageability source wins; secondary is rescaled") {
  testutil::TempDir td;
  auto lex = LexiconBundle::load(paths_in(td));
  CHECK(lex.imageability("both") == doctest::Approx(5.2));
  // midpoint of [0,1] maps to midpoint of [1,7]
  CHECK(lex.imageability("mid") == doctest::Approx(4.0));
}

TEST_CASE("imageability: absent word floors at 1, lemma routing works") {
  testutil::TempDir td;
  auto lex = LexiconBundle::load(paths_in(td));
  CHECK(lex.imageability("zzzz") == doctest::Approx(1.0));
  CHECK(lex.imageability("tree") == doctest::Approx(6.2));
  CHECK(lex.imageability("belies") == doctest::Approx(4.5)); // via lemma
  CHECK(lex.imageability("TREE") == doctest::Approx(6.2));   // case-folded
}

TEST_CASE("aoa: absent is absent, stopwords still returned") {
  testutil::TempDir td;
  auto lex = LexiconBundle::load(paths_in(td));
  CHECK_FALSE(lex.aoa("zzzz").has_value());
  CHECK(lex.aoa("tree").value() == doctest::Approx(6.8));
  CHECK(lex.aoa("the").value() == doctest::Approx(1.8)); // caller excludes
}

TEST_CASE("stopwords are case-insensitive") {
  testutil::TempDir td;
  auto lex = LexiconBundle::load(paths_in(td));
  CHECK(lex.is_stopword("the"));
  CHECK(lex.is_stopword("A"));
  CHECK_FALSE(lex.is_stopword("leaf"));
}

TEST_CASE("lemmatize: table lookup with identity fallback") {
  testutil::TempDir td;
  auto lex = LexiconBundle::load(paths_in(td));
  CHECK(lex.lemmatize("belies") == "belie");
  CHECK(lex.lemmatize("ATE") == "eat");
  CHECK(lex.lemmatize("leaf") == "leaf");
  // idempotent on its own outputs
  CHECK(lex.lemmatize(lex.lemmatize("belies")) == "belie");
}

TEST_CASE("embed: lemma routing and OOV absence") {
  testutil::TempDir td;
  auto lex = LexiconBundle::load(paths_in(td));
  CHECK(lex.embed("tree").value() == std::vector<double>{1, 0});
  CHECK(lex.embed("belies").value() == std::vector<double>{1, 1});
  CHECK_FALSE(lex.embed("zzzz").has_value());
}

TEST_CASE("cosine basics") {
  std::vector<double> x{1, 0}, y{0, 1}, d{1, 1};
  CHECK(LexiconBundle::cosine(x, x) == doctest::Approx(1.0));
  CHECK(LexiconBundle::cosine(x, y) == doctest::Approx(0.0));
  CHECK(LexiconBundle::cosine(d, x) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(LexiconBundle::cosine(d, x) == LexiconBundle::cosine(x, d));
  CHECK_THROWS_AS(LexiconBundle::cosine({1, 0}, {1, 0, 0}), Error);
  CHECK_THROWS_AS(LexiconBundle::cosine({0, 0}, {1, 0}), Error);
}

TEST_CASE("cosine stays within [-1,1] on random vectors") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int it = 0; it < 200; ++it) {
    std::vector<double> a(4), b(4);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    bool za = true, zb = true;
    for (double v : a) za = za && v == 0;
    for (double v : b) zb = zb && v == 0;
    if (za || zb) continue;
    double c = LexiconBundle::cosine(a, b);
    CHECK(std::abs(c) <= 1.0 + 1e-12);
    CHECK(c == doctest::Approx(LexiconBundle::cosine(b, a)));
  }
}

TEST_CASE("load_bundle is idempotent") {
  testutil::TempDir td;
  auto p = paths_in(td);
  CHECK(LexiconBundle::load(p).serialize() ==
        LexiconBundle::load(p).serialize());
}

TEST_CASE("load errors: missing file, empty embeddings, bad rows") {
  testutil::TempDir td;
  auto p = paths_in(td);
  p.aoa = td.dir() + "/nope.csv";
  CHECK_THROWS_AS(LexiconBundle::load(p), ConfigError);

  p = paths_in(td);
  p.embeddings = td.file("empty_emb.txt", "0 300\n");
  CHECK_THROWS_WITH_AS(LexiconBundle::load(p),
                       doctest::Contains("no vectors loaded"), ParseError);

  p = paths_in(td);
  p.embeddings = td.file("bad_emb.txt", "a 1 0\nb 1 0 0\n");
  CHECK_THROWS_WITH_AS(LexiconBundle::load(p),
                       doctest::Contains("dimension mismatch"), ParseError);

  p = paths_in(td);
  p.aoa = td.file("bad_aoa.csv", "word,rating\nx,notanumber\n");
  CHECK_THROWS_WITH_AS(LexiconBundle::load(p), doctest::Contains(":2"),
                       ParseError);
}
