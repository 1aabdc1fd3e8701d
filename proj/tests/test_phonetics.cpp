#include <doctest.h>

#include <map>
#include <random>

#include "mnemo/phonetics.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mnemo;

namespace {
PhoneticDictionary dict() {
  return PhoneticDictionary::load(
      testutil::data_dir() + "/cmudict.sample.txt",
      testutil::data_dir() + "/arpabet_to_ipa.tsv");
}
} // namespace

TEST_CASE("levenshtein spot values") {
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("kitten", "sitting") ==
        oracle::levenshtein("kitten", "sitting"));
  CHECK(levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("levenshtein agrees with the recursive oracle, short strings") {
  auto strings = oracle::all_strings("abc", 4);
  for (const auto& a : strings)
    for (const auto& b : strings)
      REQUIRE(levenshtein(a, b) == oracle::levenshtein(a, b));
}

TEST_CASE("levenshtein is a metric on random strings") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> len(0, 12), ch(0, 3);
  auto random_string = [&] {
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + ch(rng)));
    return s;
  };
  for (int it = 0; it < 300; ++it) {
    std::string a = random_string(), b = random_string(), c = random_string();
    size_t ab = levenshtein(a, b);
    CHECK(ab == levenshtein(b, a));
    CHECK((ab == 0) == (a == b));
    CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));
  }
}

TEST_CASE("levenshtein counts code points, not bytes") {
  CHECK(levenshtein("hɛn", "ɛn") == 1);
  CHECK(levenshtein("hɛn", "hɛn") == 0);
}

TEST_CASE("pronounce: dictionary entries and syllable counts") {
  auto d = dict();
  CHECK(d.pronounce("alleviate").syllable_count == 4);
  CHECK(d.pronounce("duplicity").syllable_count == 4);
  CHECK(d.pronounce("bee").syllable_count == 1);
  CHECK(d.pronounce("alleviate").confidence ==
        Pronunciation::Confidence::dictionary);
  CHECK(d.pronounce("Bee,").word == "bee"); // punctuation stripped
}

TEST_CASE("pronounce: fallback for out-of-dictionary words") {
  auto d = dict();
  auto p = d.pronounce("blorft");
  CHECK(p.confidence == Pronunciation::Confidence::fallback);
  CHECK(p.syllable_count >= 1);
  CHECK_FALSE(p.ipa.empty());
}

TEST_CASE("pronounce: rejects empty and non-alphabetic input") {
  auto d = dict();
  CHECK_THROWS_AS(d.pronounce(""), Error);
  CHECK_THROWS_AS(d.pronounce("1234"), Error);
  CHECK_THROWS_AS(d.pronounce("..."), Error);
}

TEST_CASE("pronounce: syllable count >= 1 for arbitrary alphabetic words") {
  auto d = dict();
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> len(1, 10), ch(0, 25);
  for (int it = 0; it < 200; ++it) {
    std::string w;
    int n = len(rng);
    for (int i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + ch(rng)));
    auto p = d.pronounce(w);
    CHECK(p.syllable_count >= 1);
    size_t stress = 0;
    for (const auto& ph : p.phones)
      if (std::isdigit(static_cast<unsigned char>(ph.back()))) ++stress;
    CHECK(p.syllable_count == stress);
    CHECK((p.phones.empty() || !p.ipa.empty()));
  }
}

TEST_CASE("to_ipa: mapping and stress stripping") {
  auto d = dict();
  CHECK(d.to_ipa({"HH", "EH1", "N"}) == "hɛn");
  CHECK(d.to_ipa({"M", "IH1", "T"}) == "mɪt");
  CHECK(d.to_ipa({}) == "");
  CHECK_THROWS_AS(d.to_ipa({"QX"}), Error);
}

TEST_CASE("phonetic_similarity: identity and degenerate cases") {
  auto d = dict();
  // keyword concatenation with identical IPA to the target
  CHECK(d.phonetic_similarity({"ate"}, "ate") == doctest::Approx(1.0));
  double sim = d.phonetic_similarity({"a", "leaf", "he", "ate"}, "alleviate");
  CHECK(sim >= 0.0);
  CHECK(sim <= 1.0);
}

TEST_CASE("phonetic similarity of the two keyword sets for 'enmity'") {
  // The LLM-style set and the human-style set; both distances recorded
  // under this artifact's transcription rules, no equality asserted.
  auto d = dict();
  std::string target_ipa = d.pronounce("enmity").ipa;
  CHECK(target_ipa == "ɛnmɪti");
  std::string llm;
  for (auto* w : {"hen", "mitt", "tee"}) llm += d.pronounce(w).ipa;
  std::string human;
  for (auto* w : {"n", "mitt", "hi"}) human += d.pronounce(w).ipa;
  size_t d_llm = levenshtein(llm, target_ipa);
  size_t d_human = levenshtein(human, target_ipa);
  // the oracle works on chars, so project code points onto ASCII first
  std::map<char32_t, char> codes;
  auto project = [&](const std::string& s) {
    std::string out;
    for (char32_t cp : mnemo::utf8_decode(s)) {
      if (!codes.count(cp)) codes[cp] = static_cast<char>('A' + codes.size());
      out += codes[cp];
    }
    return out;
  };
  CHECK(d_llm == oracle::levenshtein(project(llm), project(target_ipa)));
  CHECK(d_human == oracle::levenshtein(project(human), project(target_ipa)));
  CHECK(d_llm > 0);
  CHECK(d_human > 0);
}

TEST_CASE("normalized_similarity bounds") {
  auto d = dict();
  std::string n = d.pronounce("hen").ipa;
  CHECK(normalized_similarity("", n) == doctest::Approx(0.0));
  CHECK(normalized_similarity(n, n) == doctest::Approx(1.0));
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> len(0, 8), ch(0, 2);
  for (int it = 0; it < 200; ++it) {
    std::string a, b;
    for (int i = 0, m = len(rng); i < m; ++i)
      a.push_back(static_cast<char>('a' + ch(rng)));
    for (int i = 0, m = len(rng); i < m; ++i)
      b.push_back(static_cast<char>('a' + ch(rng)));
    double s = normalized_similarity(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("syllable_ratio") {
  CHECK(syllable_ratio(4, 4) == doctest::Approx(1.0));
  CHECK(syllable_ratio(3, 4) == doctest::Approx(0.75)); // duplicity case
  CHECK(syllable_ratio(4, 3) == doctest::Approx(0.75)); // symmetric penalty
  CHECK(syllable_ratio(7, 7) == doctest::Approx(1.0));
  CHECK_THROWS_AS(syllable_ratio(0, 3), Error);
  for (size_t m = 1; m <= 8; ++m)
    for (size_t l = 1; l <= 8; ++l) {
      double r = syllable_ratio(m, l);
      CHECK(r > 0.0);
      CHECK(r <= 1.0);
    }
}

TEST_CASE("dictionary parsing: comments and variant entries") {
  testutil::TempDir td;
  auto path = td.file("dict.txt",
                      ";;; comment\n"
                      "HEN  HH EH1 N\n"
                      "HEN(2)  HH IH1 N\n");
  auto d = PhoneticDictionary::load(path, testutil::data_dir() +
                                              "/arpabet_to_ipa.tsv");
  CHECK(d.pronounce("hen").ipa == "hɛn"); // first entry wins
}
