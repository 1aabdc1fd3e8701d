#ifndef MNEMO_LEXICON_HPP
#define MNEMO_LEXICON_HPP

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {

// Resource locations for load_bundle. Empty paths are skipped, which keeps
// offline subsets (e.g. no embeddings) usable in tests and tools.
struct LexiconPaths {
  std::string imageability_primary;   // 7-point scale, wins on conflict
  std::string imageability_secondary; // rescaled onto [1,7] before merge
  std::string aoa;
  std::string stopwords;
  std::string lemmas;
  std::string embeddings;
  std::string word_column = "word";
  std::string rating_column = "rating";
  double secondary_scale_min = 0.0;
  double secondary_scale_max = 1.0;
};

namespace detail {

// Minimal CSV field splitter; handles double-quoted fields.
inline std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_real(const std::string& s, const std::string& where) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed number \"" + s + "\" at " + where);
  }
}

} // namespace detail

class LexiconBundle {
public:
  static LexiconBundle load(const LexiconPaths& paths) {
    LexiconBundle lex;
    if (!paths.imageability_primary.empty())
      lex.load_norms(paths.imageability_primary, paths, lex.imageability_,
                     /*rescale=*/false, 0, 0, /*overwrite=*/true);
    if (!paths.imageability_secondary.empty())
      lex.load_norms(paths.imageability_secondary, paths, lex.imageability_,
                     /*rescale=*/true, paths.secondary_scale_min,
                     paths.secondary_scale_max, /*overwrite=*/false);
    for (const auto& [w, r] : lex.imageability_) {
      if (r < 1.0 - 1e-9 || r > 7.0 + 1e-9)
        throw ParseError("imageability rating out of [1,7] for \"" + w + "\"");
    }
    if (!paths.aoa.empty()) {
      std::map<std::string, double> table;
      lex.load_norms(paths.aoa, paths, table, false, 0, 0, true);
      for (const auto& [w, v] : table) {
        if (v <= 0.0)
          throw ParseError("non-positive AoA for \"" + w + "\"");
      }
      lex.aoa_ = std::move(table);
    }
    if (!paths.stopwords.empty()) {
      for (const auto& line : split_lines(read_file(paths.stopwords))) {
        std::string w = to_lower(trim(line));
        if (!w.empty()) lex.stopwords_.insert(w);
      }
    }
    if (!paths.lemmas.empty()) lex.load_lemmas(paths.lemmas);
    if (!paths.embeddings.empty()) lex.load_embeddings(paths.embeddings);
    lex.sources_ = {paths.imageability_primary, paths.imageability_secondary,
                    paths.aoa, paths.stopwords, paths.lemmas, paths.embeddings};
    return lex;
  }

  // Lemmatized, lowercased lookup; 1.0 (scale minimum) when absent.
  double imageability(std::string_view word) const {
    auto it = imageability_.find(lemmatize(word));
    return it == imageability_.end() ? 1.0 : it->second;
  }

  // Absent words are disregarded by callers, never substituted with 0.
  std::optional<double> aoa(std::string_view word) const {
    auto it = aoa_.find(lemmatize(word));
    if (it == aoa_.end()) return std::nullopt;
    return it->second;
  }

  bool is_stopword(std::string_view word) const {
    return stopwords_.count(to_lower(word)) > 0;
  }

  std::string lemmatize(std::string_view word) const {
    std::string w = to_lower(word);
    auto it = lemmas_.find(w);
    return it == lemmas_.end() ? w : it->second;
  }

  std::optional<std::vector<double>> embed(std::string_view word) const {
    auto it = embeddings_.find(lemmatize(word));
    if (it == embeddings_.end()) return std::nullopt;
    return it->second;
  }

  static double cosine(const std::vector<double>& a,
                       const std::vector<double>& b) {
    if (a.size() != b.size())
      throw Error("cosine: dimension mismatch (" + std::to_string(a.size()) +
                  " vs " + std::to_string(b.size()) + ")");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw Error("cosine: zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
  }

  size_t embedding_dim() const { return embedding_dim_; }
  const std::set<std::string>& stopwords() const { return stopwords_; }

  // Canonical serialization; used for provenance hashing and the
  // load-twice idempotence check.
  std::string serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "imageability\n";
    for (const auto& [w, v] : imageability_) os << w << '\t' << v << '\n';
    os << "aoa\n";
    for (const auto& [w, v] : aoa_) os << w << '\t' << v << '\n';
    os << "stopwords\n";
    for (const auto& w : stopwords_) os << w << '\n';
    os << "lemmas\n";
    for (const auto& [f, l] : lemmas_) os << f << '\t' << l << '\n';
    os << "embeddings dim=" << embedding_dim_ << "\n";
    for (const auto& [w, v] : embeddings_) {
      os << w;
      for (double x : v) os << ' ' << x;
      os << '\n';
    }
    return os.str();
  }

  std::string content_hash() const { return fnv1a64_hex(serialize()); }

private:
  void load_norms(const std::string& path, const LexiconPaths& cfg,
                  std::map<std::string, double>& table, bool rescale,
                  double lo, double hi, bool overwrite) {
    auto lines = split_lines(read_file(path));
    if (lines.empty()) throw ParseError(path + ": empty file");
    auto header = detail::csv_fields(lines[0]);
    int wcol = -1, rcol = -1;
    for (size_t i = 0; i < header.size(); ++i) {
      std::string h = to_lower(trim(header[i]));
      if (h == to_lower(cfg.word_column)) wcol = static_cast<int>(i);
      if (h == to_lower(cfg.rating_column)) rcol = static_cast<int>(i);
    }
    if (wcol < 0 || rcol < 0)
      throw ParseError(path + ": missing column \"" + cfg.word_column +
                       "\" or \"" + cfg.rating_column + "\"");
    for (size_t ln = 1; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      auto f = detail::csv_fields(lines[ln]);
      if (static_cast<int>(f.size()) <= std::max(wcol, rcol))
        throw ParseError(path + ": malformed row at line " +
                         std::to_string(ln + 1));
      std::string word = to_lower(trim(f[static_cast<size_t>(wcol)]));
      double v = detail::parse_real(trim(f[static_cast<size_t>(rcol)]),
                                    path + ":" + std::to_string(ln + 1));
      if (rescale) {
        if (hi <= lo) throw ConfigError("secondary scale bounds invalid");
        v = 1.0 + (v - lo) / (hi - lo) * 6.0;
      }
      if (overwrite || table.find(word) == table.end()) table[word] = v;
    }
  }

  void load_lemmas(const std::string& path) {
    auto lines = split_lines(read_file(path));
    for (size_t ln = 0; ln < lines.size(); ++ln) {
      if (trim(lines[ln]).empty()) continue;
      auto parts = split(lines[ln], '\t');
      if (parts.size() != 2)
        throw ParseError(path + ": malformed row at line " +
                         std::to_string(ln + 1));
      lemmas_[to_lower(trim(parts[0]))] = to_lower(trim(parts[1]));
    }
  }

  void load_embeddings(const std::string& path) {
    auto lines = split_lines(read_file(path));
    size_t declared_dim = 0;
    size_t start = 0;
    if (!lines.empty()) {
      auto head = split(trim(lines[0]), ' ');
      if (head.size() == 2) {
        try {
          declared_dim = static_cast<size_t>(std::stoul(head[1]));
          start = 1;
        } catch (const std::exception&) {
          // first line is a regular vector row
        }
      }
    }
    for (size_t ln = start; ln < lines.size(); ++ln) {
      std::string line = trim(lines[ln]);
      if (line.empty()) continue;
      std::istringstream is(line);
      std::string word;
      is >> word;
      std::vector<double> vec;
      double x;
      while (is >> x) vec.push_back(x);
      if (vec.empty())
        throw ParseError(path + ": malformed row at line " +
                         std::to_string(ln + 1));
      if (embedding_dim_ == 0) embedding_dim_ = vec.size();
      if (vec.size() != embedding_dim_ ||
          (declared_dim && vec.size() != declared_dim))
        throw ParseError(path + ": dimension mismatch at line " +
                         std::to_string(ln + 1));
      embeddings_[to_lower(word)] = std::move(vec);
    }
    if (embeddings_.empty()) throw ParseError(path + ": no vectors loaded");
  }

  std::map<std::string, double> imageability_;
  std::map<std::string, double> aoa_;
  std::set<std::string> stopwords_;
  std::map<std::string, std::string> lemmas_;
  std::map<std::string, std::vector<double>> embeddings_;
  size_t embedding_dim_ = 0;
  std::vector<std::string> sources_;
};

} // namespace mnemo

#endif
