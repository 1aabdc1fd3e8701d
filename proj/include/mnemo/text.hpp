#ifndef MNEMO_TEXT_HPP
#define MNEMO_TEXT_HPP

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/error.hpp"

namespace mnemo {

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      size_t end = i;
      if (end > start && s[end - 1] == '\r') --end;
      out.emplace_back(s.substr(start, end - start));
      start = i + 1;
    }
  }
  if (!out.empty() && out.back().empty() && !s.empty() && s.back() == '\n')
    out.pop_back();
  return out;
}

// Strip leading/trailing ASCII punctuation (keeps interior apostrophes etc.).
inline std::string strip_punct(std::string_view s) {
  size_t b = 0, e = s.size();
  auto is_punct = [](unsigned char c) {
    return std::ispunct(c) != 0;
  };
  while (b < e && is_punct(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_punct(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Decode UTF-8 into Unicode scalar values. Invalid bytes pass through as
// single code points so distance stays well defined on arbitrary input.
inline std::vector<char32_t> utf8_decode(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    char32_t cp = c;
    int extra = 0;
    if ((c & 0x80u) == 0) {
      extra = 0;
    } else if ((c & 0xE0u) == 0xC0u) {
      extra = 1;
      cp = c & 0x1Fu;
    } else if ((c & 0xF0u) == 0xE0u) {
      extra = 2;
      cp = c & 0x0Fu;
    } else if ((c & 0xF8u) == 0xF0u) {
      extra = 3;
      cp = c & 0x07u;
    }
    if (i + extra >= s.size() && extra > 0) {
      out.push_back(c);
      ++i;
      continue;
    }
    bool ok = true;
    char32_t acc = cp;
    for (int k = 1; k <= extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0u) != 0x80u) {
        ok = false;
        break;
      }
      acc = (acc << 6) | (cc & 0x3Fu);
    }
    if (ok && extra > 0) {
      out.push_back(acc);
      i += static_cast<size_t>(extra) + 1;
    } else if (extra == 0) {
      out.push_back(cp);
      ++i;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

// Cue tokenization: whitespace split, hyphen split, strip outer punctuation,
// lowercase. Empty pieces are dropped.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&]() {
    if (cur.empty()) return;
    for (const auto& piece : split(cur, '-')) {
      std::string w = to_lower(strip_punct(piece));
      if (!w.empty()) tokens.push_back(std::move(w));
    }
    cur.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)))
      flush();
    else
      cur.push_back(ch);
  }
  flush();
  return tokens;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a 64-bit, used for cache and replay keys.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view s) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(s);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

// Replaces every occurrence of {slot} in a template.
inline std::string fill_template(std::string tmpl, std::string_view slot,
                                 std::string_view value) {
  const std::string needle = "{" + std::string(slot) + "}";
  size_t pos = 0;
  while ((pos = tmpl.find(needle, pos)) != std::string::npos) {
    tmpl.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return tmpl;
}

} // namespace mnemo

#endif
