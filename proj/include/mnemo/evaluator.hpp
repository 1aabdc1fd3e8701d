#ifndef MNEMO_EVALUATOR_HPP
#define MNEMO_EVALUATOR_HPP

#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mnemo/cue_pipeline.hpp"
#include "mnemo/error.hpp"
#include "mnemo/keyword_pipeline.hpp"
#include "mnemo/lexicon.hpp"
#include "mnemo/llm_gateway.hpp"
#include "mnemo/phonetics.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

struct MnemonicRecord {
  std::string target;
  std::optional<std::string> meaning;
  std::vector<std::string> keywords;
  std::string cue;
  std::string source; // e.g. "generated" / "reference"

  static MnemonicRecord from_json(const nlohmann::json& j) {
    MnemonicRecord r;
    r.target = to_lower(j.at("target").get<std::string>());
    if (j.contains("meaning") && !j["meaning"].is_null())
      r.meaning = j["meaning"].get<std::string>();
    r.keywords = j.at("keywords").get<std::vector<std::string>>();
    for (auto& k : r.keywords) k = to_lower(k);
    r.cue = j.at("cue").get<std::string>();
    r.source = j.value("source", std::string("unlabeled"));
    if (r.target.empty() || r.cue.empty() || r.keywords.empty())
      throw ParseError("record needs nonempty target, cue and keywords");
    return r;
  }
};

struct KeywordMetricRow {
  std::optional<double> syllable_ratio;
  std::optional<double> phonetic_sim;
  std::optional<double> imageability_norm;
  std::optional<double> orthographic_sim_norm;
  std::optional<double> semantic_sim_norm;
  bool used_fallback_pronunciation = false;
  std::vector<std::string> failures;
};

// Table-1-style keyword metrics, each normalized onto [0,1].
inline KeywordMetricRow keyword_metrics(const MnemonicRecord& rec,
                                        const LexiconBundle& lex,
                                        const PhoneticDictionary& dict) {
  KeywordMetricRow row;
  KeywordSet set;
  set.keywords = rec.keywords;
  TargetWord target;
  try {
    target = TargetWord::make(rec.target, rec.meaning, dict);
    if (target.pronunciation.confidence == Pronunciation::Confidence::fallback)
      row.used_fallback_pronunciation = true;
    row.syllable_ratio =
        syllable_ratio(rec.keywords.size(), target.syllables());
    for (const auto& k : rec.keywords) {
      if (dict.pronounce(k).confidence == Pronunciation::Confidence::fallback)
        row.used_fallback_pronunciation = true;
    }
    row.phonetic_sim = dict.phonetic_similarity(rec.keywords, rec.target);
  } catch (const std::exception& e) {
    row.failures.push_back(std::string("pronunciation: ") + e.what());
    target.surface = rec.target; // orthography and lexicon still usable
  }
  row.imageability_norm = (score_imageability(set, lex) - 1.0) / 6.0;
  {
    std::string concat = set.concat();
    size_t d = levenshtein(concat, rec.target);
    size_t m = std::max(utf8_decode(concat).size(),
                        utf8_decode(rec.target).size());
    row.orthographic_sim_norm =
        m == 0 ? 1.0 : 1.0 - static_cast<double>(d) / static_cast<double>(m);
  }
  try {
    row.semantic_sim_norm = std::max(score_semantic(set, target, lex), 0.0);
  } catch (const std::exception& e) {
    row.failures.push_back(std::string("semantic: ") + e.what());
  }
  return row;
}

// PPL = exp(-mean token logprob) of the cue under the scoring model. The
// exact scored string is the raw cue text; no normalization is applied.
inline double cue_perplexity(const MnemonicRecord& rec, Gateway& gateway) {
  TokenLogprobs lp = gateway.token_logprobs(rec.cue);
  if (lp.logprobs.empty())
    throw BackendError("cue_perplexity: backend returned no scored tokens");
  double sum = 0;
  for (double x : lp.logprobs) sum += x;
  return std::exp(-sum / static_cast<double>(lp.logprobs.size()));
}

// Pluggable sentence-imageability scorer. The real metric needs external
// image-generation infrastructure; without it we fall back to a word-level
// lexicon proxy (mean imageability of content words, scaled onto [0,1]).
using ExternalScorer = std::function<double(const std::string& text)>;

struct ImageabilityProxyResult {
  double score = 0;
  bool external = false; // false means lexicon proxy
};

inline ImageabilityProxyResult cue_imageability_proxy(
    const MnemonicRecord& rec, const LexiconBundle& lex,
    const ExternalScorer& scorer = nullptr) {
  if (scorer) {
    try {
      return {scorer(rec.cue), true};
    } catch (const std::exception& e) {
      std::cerr << "warning: external imageability scorer failed (" << e.what()
                << "); using lexicon proxy\n";
    }
  }
  double sum = 0;
  size_t n = 0;
  for (const auto& tok : tokenize(rec.cue)) {
    if (lex.is_stopword(tok)) continue;
    sum += lex.imageability(tok);
    ++n;
  }
  if (n == 0) return {0.0, false};
  return {(sum / static_cast<double>(n) - 1.0) / 6.0, false};
}

struct ReportOptions {
  bool keyword_metrics = true;
  bool cue_metrics = true;
  bool perplexity = true; // needs a logprob-capable gateway
  std::uint64_t seed = 0;
  ExternalScorer imageability_scorer = nullptr;
};

// Batch evaluation over a JSONL dataset of mnemonic records. Row-level
// failures are collected per metric, never fatal; means skip missing values.
class Evaluator {
public:
  Evaluator(const LexiconBundle& lex, const PhoneticDictionary& dict,
            Gateway* gateway)
      : lex_(lex), dict_(dict), gateway_(gateway) {}

  nlohmann::ordered_json run_report(const std::string& dataset_path,
                                    const ReportOptions& opt) {
    std::vector<MnemonicRecord> records;
    size_t line_no = 0;
    std::vector<std::string> row_errors;
    for (const auto& line : split_lines(read_file(dataset_path))) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        records.push_back(MnemonicRecord::from_json(nlohmann::json::parse(line)));
      } catch (const std::exception& e) {
        row_errors.push_back("line " + std::to_string(line_no) + ": " +
                             e.what());
      }
    }
    if (records.empty())
      throw ParseError(dataset_path + ": no valid records" +
                       (row_errors.empty() ? "" : " (" + row_errors[0] + ")"));

    nlohmann::ordered_json per_record = nlohmann::ordered_json::array();
    std::map<std::string, std::map<std::string, std::pair<double, size_t>>>
        sums; // source -> metric -> (sum, count)
    size_t fallback_count = 0;

    auto add = [&](const std::string& source, const std::string& metric,
                   std::optional<double> v, nlohmann::ordered_json& row) {
      if (v) {
        row[metric] = *v;
        auto& agg = sums[source][metric];
        agg.first += *v;
        agg.second += 1;
      } else {
        row[metric] = nullptr;
      }
    };

    for (const auto& rec : records) {
      nlohmann::ordered_json row;
      row["target"] = rec.target;
      row["source"] = rec.source;
      row["scored_cue"] = rec.cue; // exact string scored, recorded verbatim
      std::vector<std::string> failures;
      if (opt.keyword_metrics) {
        KeywordMetricRow km = keyword_metrics(rec, lex_, dict_);
        if (km.used_fallback_pronunciation) {
          ++fallback_count;
          row["fallback_pronunciation"] = true;
        }
        add(rec.source, "syllable_ratio", km.syllable_ratio, row);
        add(rec.source, "phonetic_sim", km.phonetic_sim, row);
        add(rec.source, "imageability", km.imageability_norm, row);
        add(rec.source, "orthographic_sim", km.orthographic_sim_norm, row);
        add(rec.source, "semantic_sim", km.semantic_sim_norm, row);
        failures.insert(failures.end(), km.failures.begin(),
                        km.failures.end());
      }
      if (opt.cue_metrics) {
        std::optional<double> ppl;
        if (opt.perplexity && gateway_) {
          try {
            ppl = cue_perplexity(rec, *gateway_);
          } catch (const std::exception& e) {
            failures.push_back(std::string("ppl: ") + e.what());
          }
        }
        add(rec.source, "ppl", ppl, row);
        auto img = cue_imageability_proxy(rec, lex_, opt.imageability_scorer);
        add(rec.source, "cue_imageability", img.score, row);
        row["cue_imageability_kind"] = img.external ? "external" : "proxy";
      }
      if (!failures.empty()) row["failures"] = failures;
      per_record.push_back(std::move(row));
    }

    nlohmann::ordered_json means;
    for (const auto& [source, table] : sums) {
      nlohmann::ordered_json m;
      for (const auto& [metric, agg] : table)
        m[metric] = agg.first / static_cast<double>(agg.second);
      means[source] = std::move(m);
    }

    nlohmann::ordered_json report;
    report["meta"] = {
        {"dataset", dataset_path},
        {"records", records.size()},
        {"generation_model",
         gateway_ ? gateway_->config().generation_model : ""},
        {"scoring_model", gateway_ ? gateway_->config().scoring_model : ""},
        {"lexicon_hash", lex_.content_hash()},
        {"seed", opt.seed},
        {"fallback_pronunciations", fallback_count},
        {"row_errors", row_errors}};
    report["per_record"] = std::move(per_record);
    report["per_source_means"] = std::move(means);
    return report;
  }

  // Flat CSV of the per-record rows.
  static std::string report_to_csv(const nlohmann::ordered_json& report) {
    std::vector<std::string> cols;
    for (const auto& row : report.at("per_record"))
      for (auto it = row.begin(); it != row.end(); ++it)
        if (std::find(cols.begin(), cols.end(), it.key()) == cols.end() &&
            it.key() != "failures")
          cols.push_back(it.key());
    std::ostringstream os;
    os.precision(17);
    for (size_t i = 0; i < cols.size(); ++i)
      os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& row : report.at("per_record")) {
      for (size_t i = 0; i < cols.size(); ++i) {
        if (i) os << ',';
        if (!row.contains(cols[i]) || row[cols[i]].is_null()) continue;
        const auto& v = row[cols[i]];
        if (v.is_string()) {
          std::string s = v.get<std::string>();
          bool quote = s.find_first_of(",\"\n") != std::string::npos;
          if (quote) {
            std::string esc;
            for (char c : s) {
              if (c == '"') esc += '"';
              esc += c;
            }
            os << '"' << esc << '"';
          } else {
            os << s;
          }
        } else {
          os << v.dump();
        }
      }
      os << '\n';
    }
    return os.str();
  }

private:
  const LexiconBundle& lex_;
  const PhoneticDictionary& dict_;
  Gateway* gateway_;
};

} // namespace mnemo

#endif
