#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vtriage {

/// Half-open range of token indices [begin, end).
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const SentenceSpan&) const = default;
};

struct TokenizedText {
  std::vector<std::string> tokens;  // lowercase, no whitespace
  std::vector<SentenceSpan> sentences;
  std::size_t source_len = 0;

  std::vector<std::vector<std::string>> sentence_tokens() const;
};

struct TextFeatures {
  std::size_t word_count = 0;
  std::size_t unique_word_count = 0;
  std::size_t sentence_count = 0;
  std::size_t transition_word_count = 0;
  std::size_t summary_word_count = 0;
  std::size_t active_verb_count = 0;
  double readability = 0.0;
  bool readability_undefined = false;
};

/// A named set of lowercase phrases. Phrases are stored as token sequences
/// produced by `tokenize`, so matching is insensitive to case and
/// punctuation.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, const std::vector<std::string>& phrases);

  /// One phrase per line, '#' starts a comment.
  static Lexicon load(const std::string& path, std::string name = {});

  const std::string& name() const { return name_; }
  const std::set<std::vector<std::string>>& entries() const { return entries_; }
  std::size_t max_phrase_len() const { return max_len_; }
  bool contains(const std::vector<std::string>& phrase) const { return entries_.count(phrase) > 0; }
  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::string name_;
  std::set<std::vector<std::string>> entries_;
  std::size_t max_len_ = 0;
};

TokenizedText tokenize(std::string_view text);

/// Vowel-group count with a silent-e rule, never below 1. Throws
/// ValidationError on empty or non-alphabetic input.
int count_syllables(std::string_view word);

/// Flesch-Kincaid grade level. Throws ValidationError when the text has no
/// words.
double readability(std::string_view text);
double readability(const TokenizedText& tok);

/// Occurrences of lexicon phrases, longest match first, non-overlapping.
std::size_t lexicon_count(const TokenizedText& tok, const Lexicon& lex);

/// Candidate base forms of an inflected word ("removes" -> "remove", ...).
std::vector<std::string> verb_base_forms(std::string_view word);

/// Tokens whose base form is in `verbs` and which do not directly follow a
/// form of "be".
std::size_t active_verb_count(const TokenizedText& tok, const Lexicon& verbs);

TextFeatures extract_text_features(std::string_view text, const Lexicon& transition_lex, const Lexicon& summary_lex,
                                   const Lexicon& verb_lex);

}  // namespace vtriage
