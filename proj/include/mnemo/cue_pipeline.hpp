#ifndef MNEMO_CUE_PIPELINE_HPP
#define MNEMO_CUE_PIPELINE_HPP

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mnemo/error.hpp"
#include "mnemo/keyword_pipeline.hpp"
#include "mnemo/lexicon.hpp"
#include "mnemo/llm_gateway.hpp"
#include "mnemo/ranking.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

struct CueConstraints {
  bool contains_target = false;
  bool contains_all_keywords = false;
  bool keywords_in_order = false;

  bool all() const {
    return contains_target && contains_all_keywords && keywords_in_order;
  }
};

struct CueScores {
  double cont = 0;
  double aoa = 0;
};

struct CueRanks {
  int cont = 0;
  int aoa = 0;
};

struct VerbalCue {
  std::string text;
  std::vector<std::string> tokens;
  CueConstraints constraint;
  CueScores raw_scores;
  CueRanks ranks;
  double aggregate = 0;

  static VerbalCue from_text(std::string text) {
    VerbalCue c;
    c.tokens = tokenize(text);
    c.text = std::move(text);
    return c;
  }
};

// The LAST "Summary:" line is the cue (responses carry a Story line first).
inline std::optional<std::string> parse_cue_response(const std::string& raw) {
  std::optional<std::string> cue;
  for (const auto& line : split_lines(raw)) {
    std::string t = trim(line);
    if (to_lower(t).rfind("summary:", 0) == 0) {
      std::string body = trim(t.substr(8));
      if (!body.empty()) cue = body;
    }
  }
  return cue;
}

// True when `needle` appears in `haystack` as an in-order subsequence.
// Greedy leftmost matching is a complete decision procedure here.
inline bool is_subsequence(const std::vector<std::string>& needle,
                           const std::vector<std::string>& haystack) {
  size_t i = 0;
  for (const auto& tok : haystack) {
    if (i < needle.size() && tok == needle[i]) ++i;
  }
  return i == needle.size();
}

inline CueConstraints check_constraints(const VerbalCue& cue,
                                        const TargetWord& target,
                                        const KeywordSet& keywords,
                                        const LexiconBundle& lex) {
  CueConstraints c;
  const std::string target_lemma = lex.lemmatize(target.surface);
  for (const auto& tok : cue.tokens) {
    if (tok == target.surface || lex.lemmatize(tok) == target_lemma) {
      c.contains_target = true;
      break;
    }
  }
  // count-aware containment: repeated keywords need repeated tokens
  std::vector<std::string> remaining = cue.tokens;
  c.contains_all_keywords = true;
  for (const auto& k : keywords.keywords) {
    auto it = std::find(remaining.begin(), remaining.end(), k);
    if (it == remaining.end()) {
      c.contains_all_keywords = false;
      break;
    }
    remaining.erase(it);
  }
  c.keywords_in_order = is_subsequence(keywords.keywords, cue.tokens);
  return c;
}

// Replaces the first token matching the target (exact or lemma-level) with
// [MASK], preserving surrounding punctuation. Empty result when no token
// matches.
inline std::optional<std::string> mask_target(const std::string& text,
                                              const TargetWord& target,
                                              const LexiconBundle& lex) {
  const std::string target_lemma = lex.lemmatize(target.surface);
  size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    size_t chunk_end = i;
    while (chunk_end < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[chunk_end])))
      ++chunk_end;
    // hyphen pieces within the chunk
    size_t piece_start = i;
    for (size_t j = i; j <= chunk_end; ++j) {
      if (j == chunk_end || text[j] == '-') {
        std::string piece = text.substr(piece_start, j - piece_start);
        // trim outer punctuation but keep its offsets
        size_t b = 0, e = piece.size();
        while (b < e &&
               std::ispunct(static_cast<unsigned char>(piece[b])))
          ++b;
        while (e > b &&
               std::ispunct(static_cast<unsigned char>(piece[e - 1])))
          --e;
        std::string word = to_lower(piece.substr(b, e - b));
        if (!word.empty() && (word == target.surface ||
                              lex.lemmatize(word) == target_lemma)) {
          std::string out = text;
          out.replace(piece_start + b, e - b, "[MASK]");
          return out;
        }
        piece_start = j + 1;
      }
    }
    i = chunk_end;
  }
  return std::nullopt;
}

// f_cont: mean cosine between each masked-prediction embedding and the
// target embedding; predictions without vectors contribute 0.
inline double score_context_completeness(const VerbalCue& cue,
                                         const TargetWord& target,
                                         Gateway& gateway,
                                         const LexiconBundle& lex) {
  auto tv = lex.embed(target.surface);
  if (!tv)
    throw Error("score_context_completeness: target \"" + target.surface +
                "\" missing from embeddings");
  auto masked = mask_target(cue.text, target, lex);
  if (!masked)
    throw Error("score_context_completeness: target not found in cue");
  MaskPredictions preds = gateway.masked_top5(*masked);
  double sum = 0;
  for (const auto& c : preds.candidates) {
    auto cv = lex.embed(c);
    if (cv) sum += LexiconBundle::cosine(*cv, *tv);
  }
  return sum / static_cast<double>(preds.candidates.size());
}

// f_AoA: summed (not averaged) so longer cues score worse. Stopwords and
// out-of-table words are skipped; lookups are lemma-level.
inline double score_aoa(const VerbalCue& cue, const LexiconBundle& lex) {
  double sum = 0;
  for (const auto& tok : cue.tokens) {
    if (lex.is_stopword(tok)) continue;
    if (auto v = lex.aoa(tok)) sum += *v;
  }
  return sum;
}

inline std::vector<VerbalCue> rank_cues(std::vector<VerbalCue> cues,
                                        std::uint64_t rng_seed) {
  if (cues.empty()) throw NoValidCueError("rank_cues: no surviving cues");
  std::vector<double> cont, aoa;
  for (const auto& c : cues) {
    cont.push_back(c.raw_scores.cont);
    aoa.push_back(c.raw_scores.aoa);
  }
  auto r_cont = dense_ranks(cont, /*higher_is_better=*/true);
  auto r_aoa = dense_ranks(aoa, /*higher_is_better=*/false);
  std::vector<double> aggregates(cues.size());
  for (size_t i = 0; i < cues.size(); ++i) {
    cues[i].ranks = {r_cont[i], r_aoa[i]};
    aggregates[i] = geometric_mean({r_cont[i], r_aoa[i]});
    cues[i].aggregate = aggregates[i];
  }
  std::vector<VerbalCue> ordered;
  ordered.reserve(cues.size());
  for (size_t i : order_by_aggregate(aggregates, rng_seed))
    ordered.push_back(std::move(cues[i]));
  return ordered;
}

class CuePipeline {
public:
  CuePipeline(const LexiconBundle& lex, Gateway& gateway,
              std::string prompt_template)
      : lex_(lex), gateway_(gateway),
        prompt_template_(std::move(prompt_template)) {}

  std::string build_prompt(const TargetWord& target,
                           const KeywordSet& keywords) const {
    if (!target.meaning)
      throw Error("cue generation requires the target word's meaning");
    std::string joined;
    for (size_t i = 0; i < keywords.keywords.size(); ++i) {
      if (i) joined += ", ";
      joined += keywords.keywords[i];
    }
    std::string p = fill_template(prompt_template_, "target", target.surface);
    p = fill_template(p, "meaning", *target.meaning);
    return fill_template(p, "keywords", joined);
  }

  std::vector<VerbalCue> overgenerate(const TargetWord& target,
                                      const KeywordSet& keywords,
                                      size_t count_cap = 5) {
    std::string prompt = build_prompt(target, keywords);
    std::vector<VerbalCue> cues;
    for (const auto& raw : gateway_.complete_many(prompt, count_cap)) {
      auto text = parse_cue_response(raw);
      if (!text) {
        std::cerr << "warning: cue candidate dropped: no \"Summary:\" line\n";
        continue;
      }
      bool dup = false;
      for (const auto& c : cues)
        if (c.text == *text) dup = true;
      if (!dup) cues.push_back(VerbalCue::from_text(std::move(*text)));
    }
    if (cues.empty())
      throw BackendError("cue overgeneration produced no parseable cues");
    return cues;
  }

  // Constraint-checks every candidate; only cues with all flags true
  // survive to scoring.
  std::vector<VerbalCue> filter(std::vector<VerbalCue> cues,
                                const TargetWord& target,
                                const KeywordSet& keywords) const {
    std::vector<VerbalCue> survivors;
    for (auto& c : cues) {
      c.constraint = check_constraints(c, target, keywords, lex_);
      if (c.constraint.all()) survivors.push_back(std::move(c));
    }
    return survivors;
  }

  void score(VerbalCue& cue, const TargetWord& target) {
    cue.raw_scores.cont =
        score_context_completeness(cue, target, gateway_, lex_);
    cue.raw_scores.aoa = score_aoa(cue, lex_);
  }

  // Full stage. retry_rounds extra overgeneration rounds run when every
  // candidate fails the constraint filter.
  std::vector<VerbalCue> run(const TargetWord& target,
                             const KeywordSet& keywords, std::uint64_t seed,
                             size_t count_cap = 5, int retry_rounds = 1) {
    std::vector<VerbalCue> survivors;
    for (int round = 0; round <= retry_rounds; ++round) {
      survivors = filter(overgenerate(target, keywords, count_cap), target,
                         keywords);
      if (!survivors.empty()) break;
    }
    if (survivors.empty())
      throw NoValidCueError("no cue satisfied the containment/order "
                            "constraints for \"" +
                            target.surface + "\"");
    for (auto& c : survivors) score(c, target);
    return rank_cues(std::move(survivors), seed);
  }

private:
  const LexiconBundle& lex_;
  Gateway& gateway_;
  std::string prompt_template_;
};

} // namespace mnemo

#endif
