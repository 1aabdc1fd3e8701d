#include <doctest.h>

#include "mnemo/keyword_pipeline.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mnemo;

namespace {

PhoneticDictionary dict() {
  return PhoneticDictionary::load(
      testutil::data_dir() + "/cmudict.sample.txt",
      testutil::data_dir() + "/arpabet_to_ipa.tsv");
}

KeywordSet kset(std::vector<std::string> kws) {
  KeywordSet s;
  s.keywords = std::move(kws);
  return s;
}

} // namespace

TEST_CASE("parse_keyword_response") {
  CHECK(parse_keyword_response("Keywords: a, peas") ==
        std::vector<std::string>{"a", "peas"});
  CHECK(parse_keyword_response("Keywords: bee , lie") ==
        std::vector<std::string>{"bee", "lie"});
  // the LAST marker line wins when examples are echoed
  CHECK(parse_keyword_response(
            "Keywords: a, leaf, he, ate\nsome text\nKeywords: do, please") ==
        std::vector<std::string>{"do", "please"});
  CHECK_THROWS_AS(parse_keyword_response("no marker here"), ParseError);
  CHECK_THROWS_AS(parse_keyword_response("Keywords: a,, b"), ParseError);
}

TEST_CASE("score_imageability over the fixture lexicon") {
  auto lex = testutil::fixture_lexicon();
  // "a" is a stopword; leaf=6.0, ate->eat=4.0
  CHECK(score_imageability(kset({"a", "leaf", "ate"}), lex) ==
        doctest::Approx(5.0));
  CHECK(score_imageability(kset({"zzzz", "qqqq"}), lex) ==
        doctest::Approx(1.0)); // absent words floor at 1
  CHECK(score_imageability(kset({"a", "the"}), lex) ==
        doctest::Approx(1.0)); // all stopwords
  CHECK(score_imageability(kset({"leaf"}), lex) == doctest::Approx(6.0));
}

TEST_CASE("score_orthographic matches the oracle") {
  auto d = dict();
  TargetWord t = TargetWord::make("alleviate", std::nullopt, d);
  long got = score_orthographic(kset({"a", "leaf", "he", "ate"}), t);
  CHECK(static_cast<size_t>(got) ==
        oracle::levenshtein("aleafheate", "alleviate"));
  TargetWord ate = TargetWord::make("ate", std::nullopt, d);
  CHECK(score_orthographic(kset({"ate"}), ate) == 0);
  TargetWord upper = TargetWord::make("Ate", std::nullopt, d);
  CHECK(score_orthographic(kset({"ate"}), upper) == 0); // case-folded target
}

TEST_CASE("score_semantic: max cosine, OOV floor, target OOV error") {
  auto lex = testutil::fixture_lexicon();
  auto d = dict();
  TargetWord t = TargetWord::make("alleviate", std::nullopt, d);
  CHECK(score_semantic(kset({"alleviate", "leaf"}), t, lex) ==
        doctest::Approx(1.0));
  CHECK(score_semantic(kset({"leaf", "he"}), t, lex) == doctest::Approx(0.3));
  CHECK(score_semantic(kset({"zzzz", "qqqq"}), t, lex) ==
        doctest::Approx(-1.0));
  // lemma routing: "ate" resolves to the "eat" vector
  CHECK(score_semantic(kset({"ate"}), t, lex) == doctest::Approx(0.25));
  TargetWord oov = TargetWord::make("hen", std::nullopt, d);
  CHECK_THROWS_AS(score_semantic(kset({"leaf"}), oov, lex), Error);
}

TEST_CASE("rank_keyword_sets: aggregates and ordering") {
  std::vector<KeywordSet> sets(3);
  sets[0].keywords = {"x"};
  sets[0].raw_scores = {5.0, 2, 0.9}; // best img, best sem
  sets[1].keywords = {"y"};
  sets[1].raw_scores = {3.0, 1, 0.5};
  sets[2].keywords = {"z"};
  sets[2].raw_scores = {1.0, 5, 0.1};
  auto ranked = rank_keyword_sets(sets, 1);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked.front().keywords == std::vector<std::string>{"x"});
  // x: ranks (1, 2, 1); z is worst on everything
  CHECK(ranked.front().ranks.img == 1);
  CHECK(ranked.front().ranks.orth == 2);
  CHECK(ranked.front().ranks.sem == 1);
  CHECK(ranked.front().aggregate ==
        doctest::Approx(std::cbrt(2.0)));
  CHECK(ranked.back().keywords == std::vector<std::string>{"z"});
  CHECK(ranked.back().aggregate == doctest::Approx(3.0)); // (3*3*3)^(1/3)
  for (const auto& s : ranked) {
    CHECK(s.aggregate >= 1.0 - 1e-12);
    CHECK(s.aggregate <= 3.0 + 1e-12); // log-sum evaluation wobbles in ulps
  }
}

TEST_CASE("rank_keyword_sets: identical raw scores break ties by seed") {
  std::vector<KeywordSet> sets(2);
  sets[0].keywords = {"first"};
  sets[1].keywords = {"second"};
  sets[0].raw_scores = sets[1].raw_scores = {2.0, 3, 0.5};
  auto a = rank_keyword_sets(sets, 7);
  auto b = rank_keyword_sets(sets, 7);
  CHECK(a.front().keywords == b.front().keywords); // fixed per seed
  bool flipped = false;
  for (std::uint64_t s = 0; s < 64 && !flipped; ++s)
    flipped = rank_keyword_sets(sets, s).front().keywords !=
              a.front().keywords;
  CHECK(flipped);
}

TEST_CASE("rank ordering invariant under monotone transform of one criterion") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0, 10);
  for (int it = 0; it < 50; ++it) {
    size_t n = 2 + rng() % 6;
    std::vector<KeywordSet> sets(n);
    for (size_t i = 0; i < n; ++i) {
      sets[i].keywords = {"k" + std::to_string(i)};
      sets[i].raw_scores = {u(rng), static_cast<long>(rng() % 10), u(rng)};
    }
    auto base = rank_keyword_sets(sets, 99);
    auto transformed = sets;
    for (auto& s : transformed)
      s.raw_scores.img = 3.0 * s.raw_scores.img + 1.0;
    auto after = rank_keyword_sets(transformed, 99);
    for (size_t i = 0; i < n; ++i)
      CHECK(base[i].keywords == after[i].keywords);
  }
}

TEST_CASE("overgenerate: 2L+1 calls, dedup, parse-failure tolerance") {
  auto lex = testutil::fixture_lexicon();
  auto d = dict();
  auto target = TargetWord::make("alleviate", std::nullopt, d);
  REQUIRE(target.syllables() == 4);

  MockBackend backend;
  backend.on_complete = [](const GenerationRequest& req) -> std::string {
    int i = req.seed_hint.value_or(0);
    if (i == 3) return "no marker";
    if (i % 2 == 0) return "Keywords: a, leaf, he, ate";
    return "Keywords: a, levy, ate";
  };
  GatewayConfig cfg;
  cfg.mask_prompt_template = "{masked_cue}";
  Gateway gw(backend, cfg);
  KeywordPipeline kp(lex, d, gw, "Target: {target}\n");
  auto sets = kp.overgenerate(target);
  CHECK(backend.complete_calls == 9); // 2L+1
  REQUIRE(sets.size() == 2);          // deduplicated
  CHECK(sets[0].keywords == std::vector<std::string>{"a", "leaf", "he", "ate"});
  CHECK(sets[1].keywords == std::vector<std::string>{"a", "levy", "ate"});
}

TEST_CASE("overgenerate: error when nothing parses") {
  auto lex = testutil::fixture_lexicon();
  auto d = dict();
  auto target = TargetWord::make("bee", std::nullopt, d);
  MockBackend backend;
  backend.on_complete = [](const GenerationRequest&) {
    return std::string("gibberish");
  };
  GatewayConfig cfg;
  Gateway gw(backend, cfg);
  KeywordPipeline kp(lex, d, gw, "T: {target}");
  CHECK_THROWS_AS(kp.overgenerate(target), BackendError);
}

TEST_CASE("full keyword stage is deterministic under a fixed seed") {
  auto lex = testutil::fixture_lexicon();
  auto d = dict();
  auto target = TargetWord::make("alleviate", std::nullopt, d);
  MockBackend backend;
  backend.on_complete = [](const GenerationRequest& req) -> std::string {
    switch (req.seed_hint.value_or(0) % 3) {
      case 0: return "Keywords: a, leaf, he, ate";
      case 1: return "Keywords: all, eve, he, ate";
      default: return "Keywords: a, levy, ate";
    }
  };
  GatewayConfig cfg;
  Gateway gw(backend, cfg);
  KeywordPipeline kp(lex, d, gw, "T: {target}");
  auto first = kp.run(target, 7);
  auto second = kp.run(target, 7);
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i)
    CHECK(first[i].keywords == second[i].keywords);
  CHECK(first.front().keywords ==
        std::vector<std::string>{"a", "leaf", "he", "ate"});
}
