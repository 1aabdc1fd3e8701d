#ifndef MNEMO_KEYWORD_PIPELINE_HPP
#define MNEMO_KEYWORD_PIPELINE_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mnemo/error.hpp"
#include "mnemo/lexicon.hpp"
#include "mnemo/llm_gateway.hpp"
#include "mnemo/phonetics.hpp"
#include "mnemo/ranking.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

struct TargetWord {
  std::string surface;
  std::optional<std::string> meaning;
  Pronunciation pronunciation;

  size_t syllables() const { return pronunciation.syllable_count; }

  static TargetWord make(std::string surface,
                         std::optional<std::string> meaning,
                         const PhoneticDictionary& dict) {
    TargetWord t;
    if (surface.empty()) throw Error("TargetWord: empty surface");
    t.pronunciation = dict.pronounce(surface);
    t.surface = to_lower(surface);
    t.meaning = std::move(meaning);
    return t;
  }
};

struct KeywordScores {
  double img = 0;
  long orth = 0;
  double sem = 0;
};

struct KeywordRanks {
  int img = 0;
  int orth = 0;
  int sem = 0;
};

struct KeywordSet {
  std::vector<std::string> keywords;
  // syllable spans (l_m, l'_m); unvalidated metadata, absent in practice
  std::optional<std::vector<std::pair<int, int>>> alignment;
  KeywordScores raw_scores;
  KeywordRanks ranks;
  double aggregate = 0;

  std::string concat() const {
    std::string out;
    for (const auto& k : keywords) out += k;
    return out;
  }
};

// Extracts the keyword list from a raw model response. The LAST "Keywords:"
// line wins since models sometimes echo the in-context examples first.
inline std::vector<std::string> parse_keyword_response(const std::string& raw) {
  std::optional<std::string> payload;
  for (const auto& line : split_lines(raw)) {
    std::string t = trim(line);
    if (to_lower(t).rfind("keywords:", 0) == 0) payload = t.substr(9);
  }
  if (!payload) throw ParseError("no \"Keywords:\" line in response");
  std::vector<std::string> keywords;
  for (const auto& piece : split(*payload, ',')) {
    std::string k = to_lower(strip_punct(trim(piece)));
    if (k.empty()) throw ParseError("empty keyword in: " + *payload);
    keywords.push_back(k);
  }
  if (keywords.empty()) throw ParseError("no keywords in: " + *payload);
  return keywords;
}

// Mean imageability over non-stopword keywords; the scale floor when every
// keyword is a stopword.
inline double score_imageability(const KeywordSet& set,
                                 const LexiconBundle& lex) {
  if (set.keywords.empty()) throw Error("score_imageability: empty set");
  double sum = 0;
  size_t n = 0;
  for (const auto& k : set.keywords) {
    if (lex.is_stopword(k)) continue;
    sum += lex.imageability(k);
    ++n;
  }
  return n == 0 ? 1.0 : sum / static_cast<double>(n);
}

// Edit distance between the bare keyword concatenation and the target.
// Lower is better.
inline long score_orthographic(const KeywordSet& set, const TargetWord& target) {
  return static_cast<long>(
      levenshtein(set.concat(), to_lower(target.surface)));
}

// Max cosine between any keyword embedding and the target embedding.
// Keywords without vectors contribute -1 and can only win when all are absent.
inline double score_semantic(const KeywordSet& set, const TargetWord& target,
                             const LexiconBundle& lex) {
  auto tv = lex.embed(target.surface);
  if (!tv)
    throw Error("score_semantic: target \"" + target.surface +
                "\" missing from embeddings");
  double best = -1.0;
  for (const auto& k : set.keywords) {
    auto kv = lex.embed(k);
    if (!kv) continue;
    best = std::max(best, LexiconBundle::cosine(*kv, *tv));
  }
  return best;
}

// Dense per-criterion ranks, cube-root-of-product aggregate, best first.
inline std::vector<KeywordSet> rank_keyword_sets(std::vector<KeywordSet> sets,
                                                 std::uint64_t rng_seed) {
  if (sets.empty()) throw Error("rank_keyword_sets: no candidates");
  std::vector<double> img, orth, sem;
  for (const auto& s : sets) {
    img.push_back(s.raw_scores.img);
    orth.push_back(static_cast<double>(s.raw_scores.orth));
    sem.push_back(s.raw_scores.sem);
  }
  auto r_img = dense_ranks(img, /*higher_is_better=*/true);
  auto r_orth = dense_ranks(orth, /*higher_is_better=*/false);
  auto r_sem = dense_ranks(sem, /*higher_is_better=*/true);
  std::vector<double> aggregates(sets.size());
  for (size_t i = 0; i < sets.size(); ++i) {
    sets[i].ranks = {r_img[i], r_orth[i], r_sem[i]};
    aggregates[i] = geometric_mean({r_img[i], r_orth[i], r_sem[i]});
    sets[i].aggregate = aggregates[i];
  }
  std::vector<KeywordSet> ordered;
  ordered.reserve(sets.size());
  for (size_t i : order_by_aggregate(aggregates, rng_seed))
    ordered.push_back(std::move(sets[i]));
  return ordered;
}

class KeywordPipeline {
public:
  KeywordPipeline(const LexiconBundle& lex, const PhoneticDictionary& dict,
                  Gateway& gateway, std::string prompt_template)
      : lex_(lex), dict_(dict), gateway_(gateway),
        prompt_template_(std::move(prompt_template)) {}

  std::string build_prompt(const TargetWord& target) const {
    return fill_template(prompt_template_, "target", target.surface);
  }

  // Up to 2L+1 sampling calls (or count_cap when nonzero); parse failures
  // drop the candidate, identical sets are deduplicated.
  std::vector<KeywordSet> overgenerate(const TargetWord& target,
                                       size_t count_cap = 0) {
    size_t cap = count_cap ? count_cap : 2 * target.syllables() + 1;
    std::string prompt = build_prompt(target);
    std::vector<KeywordSet> sets;
    for (const auto& raw : gateway_.complete_many(prompt, cap)) {
      std::vector<std::string> kws;
      try {
        kws = parse_keyword_response(raw);
      } catch (const ParseError& e) {
        std::cerr << "warning: keyword candidate dropped: " << e.what()
                  << '\n';
        continue;
      }
      bool dup = false;
      for (const auto& s : sets)
        if (s.keywords == kws) dup = true;
      if (!dup) sets.push_back(KeywordSet{std::move(kws), {}, {}, {}, 0});
    }
    if (sets.empty())
      throw BackendError("keyword overgeneration produced no parseable sets");
    return sets;
  }

  void score(KeywordSet& set, const TargetWord& target) const {
    set.raw_scores.img = score_imageability(set, lex_);
    set.raw_scores.orth = score_orthographic(set, target);
    set.raw_scores.sem = score_semantic(set, target, lex_);
  }

  // Full stage: overgenerate, score, rank. Best set is front().
  std::vector<KeywordSet> run(const TargetWord& target, std::uint64_t seed,
                              size_t count_cap = 0) {
    auto sets = overgenerate(target, count_cap);
    for (auto& s : sets) score(s, target);
    return rank_keyword_sets(std::move(sets), seed);
  }

private:
  const LexiconBundle& lex_;
  const PhoneticDictionary& dict_;
  Gateway& gateway_;
  std::string prompt_template_;
};

} // namespace mnemo

#endif
