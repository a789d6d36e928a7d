//
// Copyright 2026 The debias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Byte-level text utilities shared by segmentation, tokenization and word
// substitution. Input is UTF-8; only ASCII letters are case-folded.

#ifndef DEBIAS_TEXT_HPP_
#define DEBIAS_TEXT_HPP_

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace debias {

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
inline char ascii_upper(char c) {
  return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || is_ascii_lower(c) || is_ascii_upper(c);
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

// Abbreviations whose trailing period neither ends a sentence nor is split
// off a token. Entries are lowercase and include the final period.
class Abbreviations {
 public:
  Abbreviations() : Abbreviations(defaults()) {}
  Abbreviations(std::initializer_list<std::string> entries)
      : entries_(entries) {}
  explicit Abbreviations(std::set<std::string> entries)
      : entries_(std::move(entries)) {}

  static std::set<std::string> defaults() {
    return {"mr.", "mrs.", "dr.", "e.g.", "i.e.", "etc.", "vs.", "st."};
  }

  // One entry per line; blank lines and '#' comments are skipped.
  static Abbreviations load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open abbreviation list: " + path);
    std::set<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      std::string entry = to_lower(t);
      if (entry.back() != '.') entry.push_back('.');
      entries.insert(std::move(entry));
    }
    return Abbreviations(std::move(entries));
  }

  bool contains(std::string_view lowered) const {
    return entries_.count(std::string(lowered)) > 0;
  }
  const std::set<std::string>& entries() const { return entries_; }

 private:
  std::set<std::string> entries_;
};

// Classification of one UTF-8 code unit sequence.
enum class CharClass { kSpace, kWord, kHyphen, kApostrophe, kPeriod, kPunct };

struct CharInfo {
  CharClass cls;
  std::size_t length;  // bytes
};

inline CharInfo classify_char(std::string_view text, std::size_t i) {
  const auto c = static_cast<unsigned char>(text[i]);
  if (c < 0x80) {
    switch (c) {
      case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
        return {CharClass::kSpace, 1};
      case '-':
        return {CharClass::kHyphen, 1};
      case '\'':
        return {CharClass::kApostrophe, 1};
      case '.':
        return {CharClass::kPeriod, 1};
      default:
        return {is_ascii_alnum(static_cast<char>(c)) ? CharClass::kWord
                                                     : CharClass::kPunct,
                1};
    }
  }
  std::size_t len = 1;
  if ((c & 0xE0) == 0xC0) len = 2;
  else if ((c & 0xF0) == 0xE0) len = 3;
  else if ((c & 0xF8) == 0xF0) len = 4;
  len = std::min(len, text.size() - i);
  if (len == 2) {
    const auto c1 = static_cast<unsigned char>(text[i + 1]);
    if (c == 0xC2 && c1 == 0xA0) return {CharClass::kSpace, 2};  // nbsp
    // Latin-1 punctuation block: inverted marks, guillemets, etc.
    if (c == 0xC2 && c1 < 0xC0) return {CharClass::kPunct, 2};
  }
  if (len == 3 && c == 0xE2) {
    const auto c1 = static_cast<unsigned char>(text[i + 1]);
    const auto c2 = static_cast<unsigned char>(text[i + 2]);
    // General punctuation U+2000..U+206F.
    if (c1 == 0x80 || (c1 == 0x81 && c2 <= 0xAF)) {
      if (c1 == 0x80 && c2 <= 0x8A) return {CharClass::kSpace, 3};
      if (c1 == 0x80 && (c2 == 0x90 || c2 == 0x91))
        return {CharClass::kHyphen, 3};
      if (c1 == 0x80 && c2 == 0x99) return {CharClass::kApostrophe, 3};
      return {CharClass::kPunct, 3};
    }
  }
  return {CharClass::kWord, len};
}

// A token with its byte span in the source text.
struct Token {
  std::string text;  // lowercased, apostrophes and hyphens normalized
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

inline void append_normalized(std::string& out, std::string_view text,
                              std::size_t i, const CharInfo& info) {
  switch (info.cls) {
    case CharClass::kHyphen:
      out.push_back('-');
      break;
    case CharClass::kApostrophe:
      out.push_back('\'');
      break;
    default:
      for (std::size_t k = 0; k < info.length; ++k)
        out.push_back(ascii_lower(text[i + k]));
  }
}

// Splits [b, e) (no spaces or periods inside) into word tokens, keeping
// hyphens and apostrophes only between two word characters.
inline void split_piece(std::string_view text, std::size_t b, std::size_t e,
                        std::vector<Token>& out) {
  Token cur;
  bool open = false;
  for (std::size_t i = b; i < e;) {
    const CharInfo info = classify_char(text, i);
    if (info.cls == CharClass::kWord) {
      if (!open) {
        cur = Token{{}, i, i};
        open = true;
      }
      append_normalized(cur.text, text, i, info);
      cur.end = i + info.length;
    } else if (open && (info.cls == CharClass::kHyphen ||
                        info.cls == CharClass::kApostrophe) &&
               i + info.length < e &&
               classify_char(text, i + info.length).cls == CharClass::kWord) {
      append_normalized(cur.text, text, i, info);
    } else if (open) {
      out.push_back(std::move(cur));
      open = false;
    }
    i += info.length;
  }
  if (open) out.push_back(std::move(cur));
}

}  // namespace detail

// Lowercase word tokens split on whitespace and punctuation. Internal hyphens
// and apostrophes stay in-token, as does the period of a listed abbreviation.
inline std::vector<Token> tokenize_spans(std::string_view text,
                                         const Abbreviations& abbreviations) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    CharInfo info = classify_char(text, i);
    if (info.cls == CharClass::kSpace || info.cls == CharClass::kPunct) {
      i += info.length;
      continue;
    }
    // Chunk: maximal run of word, hyphen, apostrophe and period units.
    std::size_t chunk_begin = i;
    std::size_t chunk_end = i;
    while (chunk_end < n) {
      info = classify_char(text, chunk_end);
      if (info.cls == CharClass::kSpace || info.cls == CharClass::kPunct) break;
      chunk_end += info.length;
    }
    i = chunk_end;
    // Skip leading non-word units.
    while (chunk_begin < chunk_end &&
           classify_char(text, chunk_begin).cls != CharClass::kWord) {
      chunk_begin += classify_char(text, chunk_begin).length;
    }
    if (chunk_begin == chunk_end) continue;
    std::string lowered;
    for (std::size_t k = chunk_begin; k < chunk_end;) {
      const CharInfo ci = classify_char(text, k);
      detail::append_normalized(lowered, text, k, ci);
      k += ci.length;
    }
    if (lowered.back() == '.' && abbreviations.contains(lowered)) {
      tokens.push_back(Token{std::move(lowered), chunk_begin, chunk_end});
      continue;
    }
    std::size_t piece_begin = chunk_begin;
    for (std::size_t k = chunk_begin; k <= chunk_end;) {
      if (k == chunk_end || text[k] == '.') {
        detail::split_piece(text, piece_begin, k, tokens);
        if (k == chunk_end) break;
        piece_begin = k + 1;
        ++k;
      } else {
        k += classify_char(text, k).length;
      }
    }
  }
  return tokens;
}

inline std::vector<std::string> tokenize(std::string_view text,
                                         const Abbreviations& abbreviations) {
  std::vector<std::string> out;
  for (auto& t : tokenize_spans(text, abbreviations)) {
    out.push_back(std::move(t.text));
  }
  return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  static const Abbreviations kDefaults;
  return tokenize(text, kDefaults);
}

// Applies the letter case pattern of `source` (UPPER, Title or lower) to
// `replacement`.
inline std::string copy_case(std::string_view source,
                             std::string_view replacement) {
  std::string out(replacement);
  std::size_t letters = 0;
  std::size_t upper = 0;
  for (char c : source) {
    if (is_ascii_upper(c)) {
      ++letters;
      ++upper;
    } else if (is_ascii_lower(c)) {
      ++letters;
    }
  }
  if (letters > 1 && upper == letters) {
    std::transform(out.begin(), out.end(), out.begin(), ascii_upper);
    return out;
  }
  const auto first_letter = std::find_if(source.begin(), source.end(), [](char c) {
    return is_ascii_upper(c) || is_ascii_lower(c);
  });
  if (first_letter != source.end() && is_ascii_upper(*first_letter)) {
    std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
    auto it = std::find_if(out.begin(), out.end(), is_ascii_lower);
    if (it != out.end()) *it = ascii_upper(*it);
  }
  return out;
}

}  // namespace debias

#endif  // DEBIAS_TEXT_HPP_
