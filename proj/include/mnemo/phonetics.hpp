#ifndef MNEMO_PHONETICS_HPP
#define MNEMO_PHONETICS_HPP

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

struct Pronunciation {
  enum class Confidence { dictionary, fallback };
  std::string word;
  std::vector<std::string> phones; // ARPABET, stress digits on vowels
  size_t syllable_count = 0;
  std::string ipa; // stress markers stripped
  Confidence confidence = Confidence::dictionary;
};

// Unit-cost edit distance over Unicode scalar values.
inline size_t levenshtein(std::string_view a, std::string_view b) {
  const auto ua = utf8_decode(a);
  const auto ub = utf8_decode(b);
  std::vector<size_t> prev(ub.size() + 1), cur(ub.size() + 1);
  for (size_t j = 0; j <= ub.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= ua.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= ub.size(); ++j) {
      size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[ub.size()];
}

// 1 - D_lev / max(len); both arguments are IPA strings.
inline double normalized_similarity(std::string_view a, std::string_view b) {
  size_t la = utf8_decode(a).size();
  size_t lb = utf8_decode(b).size();
  size_t m = std::max(la, lb);
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(m);
}

// min/max symmetrized so the value stays in [0,1] whichever side is larger.
inline double syllable_ratio(size_t keyword_count, size_t syllables) {
  if (keyword_count == 0 || syllables == 0)
    throw Error("syllable_ratio: counts must be >= 1");
  auto lo = static_cast<double>(std::min(keyword_count, syllables));
  auto hi = static_cast<double>(std::max(keyword_count, syllables));
  return lo / hi;
}

namespace detail {

struct G2pRule {
  const char* graphemes;
  const char* phones; // space-separated, vowels carry no digit yet
  bool vowel;
};

// Letter-to-phone fallback for words missing from the dictionary.
// Longest-match, applied left to right; stress 1 goes on the first vowel.
inline const std::vector<G2pRule>& g2p_rules() {
  static const std::vector<G2pRule> rules = {
      {"tion", "SH AH N", true}, {"ough", "OW", true}, {"igh", "AY", true},
      {"ch", "CH", false}, {"sh", "SH", false}, {"th", "TH", false},
      {"ph", "F", false},  {"wh", "W", false},  {"ck", "K", false},
      {"ng", "NG", false}, {"qu", "K W", false},
      {"ee", "IY", true},  {"ea", "IY", true},  {"oo", "UW", true},
      {"ai", "EY", true},  {"ay", "EY", true},  {"oa", "OW", true},
      {"ou", "AW", true},  {"ow", "OW", true},  {"oi", "OY", true},
      {"oy", "OY", true},  {"au", "AO", true},  {"aw", "AO", true},
      {"a", "AE", true},   {"e", "EH", true},   {"i", "IH", true},
      {"o", "AA", true},   {"u", "AH", true},
      {"b", "B", false},   {"c", "K", false},   {"d", "D", false},
      {"f", "F", false},   {"g", "G", false},   {"h", "HH", false},
      {"j", "JH", false},  {"k", "K", false},   {"l", "L", false},
      {"m", "M", false},   {"n", "N", false},   {"p", "P", false},
      {"r", "R", false},   {"s", "S", false},   {"t", "T", false},
      {"v", "V", false},   {"w", "W", false},   {"x", "K S", false},
      {"z", "Z", false},
  };
  return rules;
}

inline bool is_vowel_phone(std::string_view phone) {
  return !phone.empty() && std::isdigit(static_cast<unsigned char>(phone.back()));
}

} // namespace detail

class PhoneticDictionary {
public:
  // dict_path: CMUdict-format file; ipa_map_path: TSV "arpabet<TAB>ipa".
  static PhoneticDictionary load(const std::string& dict_path,
                                 const std::string& ipa_map_path) {
    PhoneticDictionary d;
    d.load_ipa_map(ipa_map_path);
    if (!dict_path.empty()) d.load_dict(dict_path);
    return d;
  }

  Pronunciation pronounce(std::string_view raw) const {
    std::string word = to_lower(strip_punct(raw));
    bool alpha = false;
    for (unsigned char c : word)
      if (std::isalpha(c)) alpha = true;
    if (word.empty() || !alpha)
      throw Error("pronounce: word is empty or non-alphabetic: \"" +
                  std::string(raw) + "\"");

    Pronunciation p;
    p.word = word;
    auto it = entries_.find(word);
    if (it != entries_.end()) {
      p.phones = it->second;
      p.confidence = Pronunciation::Confidence::dictionary;
    } else {
      p.phones = fallback_phones(word);
      p.confidence = Pronunciation::Confidence::fallback;
    }
    p.syllable_count = 0;
    for (const auto& ph : p.phones)
      if (detail::is_vowel_phone(ph)) ++p.syllable_count;
    p.ipa = to_ipa(p.phones);
    return p;
  }

  std::string to_ipa(const std::vector<std::string>& phones) const {
    std::string out;
    for (const auto& ph : phones) {
      std::string base = ph;
      while (!base.empty() &&
             std::isdigit(static_cast<unsigned char>(base.back())))
        base.pop_back();
      auto it = ipa_map_.find(base);
      if (it == ipa_map_.end())
        throw Error("to_ipa: unknown ARPABET symbol \"" + ph + "\"");
      out += it->second;
    }
    return out;
  }

  // IPA-space similarity between a keyword concatenation and the target.
  double phonetic_similarity(const std::vector<std::string>& keywords,
                             std::string_view target) const {
    std::string concat;
    for (const auto& k : keywords) concat += pronounce(k).ipa;
    return normalized_similarity(concat, pronounce(target).ipa);
  }

  bool contains(std::string_view word) const {
    return entries_.count(to_lower(word)) > 0;
  }

private:
  static std::vector<std::string> fallback_phones(const std::string& word) {
    std::string w = word;
    // silent final 'e' when another vowel precedes it
    if (w.size() > 2 && w.back() == 'e' &&
        w.find_first_of("aeiouy") < w.size() - 1)
      w.pop_back();
    std::vector<std::string> phones;
    size_t vowels = 0;
    size_t i = 0;
    bool prev_vowel = false;
    while (i < w.size()) {
      char c = w[i];
      if (c == 'y') {
        // consonant word-initially, vowel elsewhere
        if (i == 0) {
          phones.push_back("Y");
          prev_vowel = false;
        } else if (!prev_vowel) {
          phones.push_back(vowels == 0 ? "IY1" : "IY0");
          ++vowels;
          prev_vowel = true;
        }
        ++i;
        continue;
      }
      bool matched = false;
      for (const auto& r : detail::g2p_rules()) {
        size_t n = std::char_traits<char>::length(r.graphemes);
        if (w.compare(i, n, r.graphemes) == 0) {
          if (r.vowel && prev_vowel) {
            // collapse adjacent vowel letters into one nucleus
            i += n;
            matched = true;
            break;
          }
          for (auto& ph : split(r.phones, ' ')) {
            if (is_vowel_base(ph)) {
              phones.push_back(ph + (vowels == 0 ? "1" : "0"));
              ++vowels;
            } else {
              phones.push_back(ph);
            }
          }
          prev_vowel = r.vowel;
          i += n;
          matched = true;
          break;
        }
      }
      if (!matched) ++i; // skip unmapped characters
    }
    if (vowels == 0) phones.push_back("AH1"); // every word has a nucleus
    return phones;
  }

  static bool is_vowel_base(const std::string& ph) {
    static const std::vector<std::string> v = {"AA", "AE", "AH", "AO", "AW",
                                               "AY", "EH", "ER", "EY", "IH",
                                               "IY", "OW", "OY", "UH", "UW"};
    return std::find(v.begin(), v.end(), ph) != v.end();
  }

  void load_ipa_map(const std::string& path) {
    auto lines = split_lines(read_file(path));
    for (size_t ln = 0; ln < lines.size(); ++ln) {
      std::string line = trim(lines[ln]);
      if (line.empty() || line[0] == '#') continue;
      auto parts = split(line, '\t');
      if (parts.size() != 2)
        throw ParseError(path + ": malformed row at line " +
                         std::to_string(ln + 1));
      ipa_map_[trim(parts[0])] = trim(parts[1]);
    }
    if (ipa_map_.empty()) throw ParseError(path + ": empty ARPABET map");
  }

  void load_dict(const std::string& path) {
    for (const auto& raw : split_lines(read_file(path))) {
      std::string line = trim(raw);
      if (line.empty() || line.rfind(";;;", 0) == 0) continue;
      size_t sep = line.find("  ");
      if (sep == std::string::npos) sep = line.find(' ');
      if (sep == std::string::npos) continue;
      std::string word = to_lower(trim(line.substr(0, sep)));
      if (word.find('(') != std::string::npos) continue; // variant entries
      std::vector<std::string> phones;
      for (auto& p : split(trim(line.substr(sep)), ' '))
        if (!p.empty()) phones.push_back(p);
      if (phones.empty()) continue;
      entries_.emplace(word, std::move(phones)); // first entry wins
    }
  }

  std::map<std::string, std::vector<std::string>> entries_;
  std::map<std::string, std::string> ipa_map_;
};

} // namespace mnemo

#endif
