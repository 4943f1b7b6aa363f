#include "vtriage/textfeat.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <unordered_set>

#include "vtriage/error.hpp"

namespace vtriage {

namespace {

bool is_ascii_alnum(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminator(unsigned char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(unsigned char c) { return c == ')' || c == ']' || c == '"' || c == '\''; }
char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

// Multi-byte UTF-8 punctuation that separates words. Everything else at or
// above 0x80 is treated as part of a word.
enum class Utf8Class { word, separator, space, apostrophe };

Utf8Class classify_utf8(std::string_view text, std::size_t i, std::size_t* len) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  std::size_t n = 1;
  if (b0 >= 0xF0) n = 4;
  else if (b0 >= 0xE0) n = 3;
  else if (b0 >= 0xC0) n = 2;
  n = std::min(n, text.size() - i);
  *len = n;
  const std::string_view seq = text.substr(i, n);
  if (seq == "\xC2\xA0") return Utf8Class::space;                  // no-break space
  if (seq == "\xE2\x80\x99" || seq == "\xE2\x80\x98") return Utf8Class::apostrophe;
  static constexpr std::array<std::string_view, 9> separators = {
      "\xE2\x80\x9C", "\xE2\x80\x9D",                  // curly double quotes
      "\xE2\x80\x93", "\xE2\x80\x94", "\xE2\x80\x95",  // dashes
      "\xE2\x80\xA6",                                  // ellipsis
      "\xC2\xAB",     "\xC2\xBB",                      // guillemets
      "\xE2\x80\xA2",                                  // bullet
  };
  for (auto s : separators)
    if (seq == s) return Utf8Class::separator;
  return Utf8Class::word;
}

// Tokens that end with '.' without ending the sentence.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> set = {
      "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "vs", "e.g", "i.e", "fig", "approx", "dept", "mt", "u.s", "a.m", "p.m",
  };
  return set;
}

const std::unordered_set<std::string>& be_forms() {
  static const std::unordered_set<std::string> set = {"am", "is", "are", "was", "were", "be", "been", "being"};
  return set;
}

bool is_vowel_at(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    case 'y': return i > 0;  // leading y is a consonant
    default: return false;
  }
}

int syllables_unchecked(const std::string& w) {
  int groups = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (v && !prev_vowel) ++groups;
    prev_vowel = v;
  }
  // Silent final e after a consonant, except the syllabic "-le" ("table").
  const std::size_t n = w.size();
  if (groups > 1 && n >= 2 && w[n - 1] == 'e' && !is_vowel_at(w, n - 2)) {
    const bool syllabic_le = n >= 3 && w[n - 2] == 'l' && !is_vowel_at(w, n - 3);
    if (!syllabic_le) --groups;
  }
  return std::max(groups, 1);
}

// Syllables of an arbitrary token: its ASCII letters, or 1 if it has none
// (numbers, symbols).
int token_syllables(const std::string& token) {
  std::string letters;
  for (char c : token)
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) letters += lower(static_cast<unsigned char>(c));
  return letters.empty() ? 1 : syllables_unchecked(letters);
}

}  // namespace

std::vector<std::vector<std::string>> TokenizedText::sentence_tokens() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.emplace_back(tokens.begin() + s.begin, tokens.begin() + s.end);
  return out;
}

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.source_len = text.size();
  std::string cur;
  std::size_t sentence_start = 0;

  auto flush_token = [&] {
    if (!cur.empty()) out.tokens.push_back(std::move(cur));
    cur.clear();
  };
  auto close_sentence = [&] {
    flush_token();
    if (out.tokens.size() > sentence_start) {
      out.sentences.push_back({sentence_start, out.tokens.size()});
      sentence_start = out.tokens.size();
    }
  };
  auto word_char_at = [&](std::size_t j) {
    if (j >= text.size()) return false;
    const auto c = static_cast<unsigned char>(text[j]);
    if (c < 0x80) return is_ascii_alnum(c);
    std::size_t len;
    return classify_utf8(text, j, &len) == Utf8Class::word;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c >= 0x80) {
      std::size_t len;
      switch (classify_utf8(text, i, &len)) {
        case Utf8Class::word:
          cur.append(text.substr(i, len));
          break;
        case Utf8Class::apostrophe:
          if (!cur.empty() && word_char_at(i + len)) cur += '\'';
          else flush_token();
          break;
        case Utf8Class::separator:
        case Utf8Class::space:
          flush_token();
          break;
      }
      i += len;
      continue;
    }
    if (is_ascii_alnum(c)) {
      cur += lower(c);
      ++i;
      continue;
    }
    // Internal apostrophe ("don't") and decimal/thousands separators ("3.5").
    if (c == '\'' && !cur.empty() && word_char_at(i + 1)) {
      cur += '\'';
      ++i;
      continue;
    }
    if ((c == '.' || c == ',') && !cur.empty() && is_digit(static_cast<unsigned char>(cur.back())) &&
        i + 1 < text.size() && is_digit(static_cast<unsigned char>(text[i + 1]))) {
      cur += static_cast<char>(c);
      ++i;
      continue;
    }
    if (is_terminator(c)) {
      // Raw chunk ending right before the terminator, for the abbreviation guard.
      std::size_t chunk_begin = i;
      while (chunk_begin > 0 && !is_space(static_cast<unsigned char>(text[chunk_begin - 1]))) --chunk_begin;
      flush_token();
      std::size_t j = i;
      while (j < text.size() && is_terminator(static_cast<unsigned char>(text[j]))) ++j;
      const bool single_period = c == '.' && j == i + 1;
      while (j < text.size() && is_closer(static_cast<unsigned char>(text[j]))) ++j;
      const bool at_break = j >= text.size() || is_space(static_cast<unsigned char>(text[j]));
      if (at_break) {
        bool guarded = false;
        if (single_period) {
          std::string chunk;
          for (std::size_t k = chunk_begin; k < i; ++k) {
            const auto ch = static_cast<unsigned char>(text[k]);
            if (ch == '(' || ch == '"' || ch == '\'' || ch == '[') {
              if (chunk.empty()) continue;
            }
            chunk += lower(ch);
          }
          guarded = abbreviations().count(chunk) > 0;
        }
        if (!guarded) close_sentence();
      }
      i = j;
      continue;
    }
    flush_token();
    ++i;
  }
  close_sentence();
  return out;
}

Lexicon::Lexicon(std::string name, const std::vector<std::string>& phrases) : name_(std::move(name)) {
  for (const auto& p : phrases) {
    auto tok = tokenize(p).tokens;
    if (tok.empty()) continue;
    max_len_ = std::max(max_len_, tok.size());
    entries_.insert(std::move(tok));
  }
}

Lexicon Lexicon::load(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file: " + path);
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    phrases.push_back(line);
  }
  if (name.empty()) {
    name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name.erase(0, slash + 1);
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos) name.erase(dot);
  }
  return Lexicon(std::move(name), phrases);
}

bool Lexicon::contains(std::string_view word) const {
  return entries_.count(std::vector<std::string>{std::string(word)}) > 0;
}

int count_syllables(std::string_view word) {
  if (word.empty()) throw ValidationError("count_syllables: empty word");
  std::string w;
  w.reserve(word.size());
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    if (!((u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z')))
      throw ValidationError("count_syllables: non-alphabetic word '" + std::string(word) + "'");
    w += lower(u);
  }
  return syllables_unchecked(w);
}

double readability(const TokenizedText& tok) {
  if (tok.tokens.empty() || tok.sentences.empty())
    throw ValidationError("readability is undefined for text without words or sentences");
  long syllables = 0;
  for (const auto& t : tok.tokens) syllables += token_syllables(t);
  const double words = static_cast<double>(tok.tokens.size());
  const double sentences = static_cast<double>(tok.sentences.size());
  return 0.39 * (words / sentences) + 11.8 * (static_cast<double>(syllables) / words) - 15.59;
}

double readability(std::string_view text) { return readability(tokenize(text)); }

std::size_t lexicon_count(const TokenizedText& tok, const Lexicon& lex) {
  const auto& t = tok.tokens;
  std::size_t count = 0;
  std::size_t i = 0;
  std::vector<std::string> window;
  while (i < t.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(lex.max_phrase_len(), t.size() - i); len >= 1; --len) {
      window.assign(t.begin() + i, t.begin() + i + len);
      if (lex.contains(window)) {
        matched = len;
        break;
      }
    }
    if (matched > 0) {
      ++count;
      i += matched;
    } else {
      ++i;
    }
  }
  return count;
}

std::vector<std::string> verb_base_forms(std::string_view word) {
  std::vector<std::string> out{std::string(word)};
  const std::string w(word);
  const std::size_t n = w.size();
  auto ends = [&](std::string_view suf) { return n > suf.size() + 1 && w.compare(n - suf.size(), suf.size(), suf) == 0; };
  auto add = [&](std::string s) {
    if (s.size() >= 2 && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  auto add_stem_variants = [&](const std::string& stem) {
    add(stem);
    add(stem + "e");
    // stopped -> stop, planning -> plan
    if (stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2]) add(stem.substr(0, stem.size() - 1));
  };
  if (ends("ies")) add(w.substr(0, n - 3) + "y");
  if (ends("es")) add(w.substr(0, n - 2));
  if (ends("s") && !ends("ss")) add(w.substr(0, n - 1));
  if (ends("ied")) add(w.substr(0, n - 3) + "y");
  if (ends("ed")) add_stem_variants(w.substr(0, n - 2));
  if (ends("ing")) add_stem_variants(w.substr(0, n - 3));
  return out;
}

std::size_t active_verb_count(const TokenizedText& tok, const Lexicon& verbs) {
  std::size_t count = 0;
  const auto& t = tok.tokens;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (be_forms().count(t[i])) continue;
    if (i > 0 && be_forms().count(t[i - 1])) continue;
    for (const auto& base : verb_base_forms(t[i])) {
      if (verbs.contains(base)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

TextFeatures extract_text_features(std::string_view text, const Lexicon& transition_lex, const Lexicon& summary_lex,
                                   const Lexicon& verb_lex) {
  const TokenizedText tok = tokenize(text);
  TextFeatures f;
  f.word_count = tok.tokens.size();
  f.unique_word_count = std::unordered_set<std::string>(tok.tokens.begin(), tok.tokens.end()).size();
  f.sentence_count = tok.sentences.size();
  f.transition_word_count = lexicon_count(tok, transition_lex);
  f.summary_word_count = lexicon_count(tok, summary_lex);
  f.active_verb_count = active_verb_count(tok, verb_lex);
  if (f.word_count == 0) {
    // Silent videos: keep the pipeline going with a flagged zero.
    f.readability = 0.0;
    f.readability_undefined = true;
  } else {
    f.readability = readability(tok);
  }
  return f;
}

}  // namespace vtriage
