#include <algorithm>
#include <cctype>

#include <gtest/gtest.h>

#include "vtriage/error.hpp"
#include "vtriage/rng.hpp"
#include "vtriage/textfeat.hpp"

using namespace vtriage;

namespace {

// Flesch-Kincaid grade from raw counts, applied by hand in the tests.
double fk(double words, double sentences, double syllables) {
  return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

const Lexicon& verbs() {
  static const Lexicon lex = Lexicon::load(std::string(VTRIAGE_DATA_DIR) + "/active_verbs.txt", "verbs");
  return lex;
}

std::string random_text(Rng& rng) {
  static const char* words[] = {"colon", "the", "Cancer", "is", "removed", "first", "then", "polyps",
                                "screening", "In", "addition", "finally", "doctor", "removes", "a"};
  static const char* seps[] = {" ", "  ", ". ", "! ", "? ", ", ", "\n", "\t"};
  std::string s;
  for (std::size_t k = rng.below(40); k > 0; --k) {
    s += words[rng.below(std::size(words))];
    s += seps[rng.below(std::size(seps))];
  }
  return s;
}

}  // namespace

TEST(Tokenize, Examples) {
  const auto t = tokenize("The cat sat. It ran!");
  EXPECT_EQ(t.tokens, (std::vector<std::string>{"the", "cat", "sat", "it", "ran"}));
  ASSERT_EQ(t.sentences.size(), 2u);
  EXPECT_EQ(t.sentences[0], (SentenceSpan{0, 3}));
  EXPECT_EQ(t.sentences[1], (SentenceSpan{3, 5}));

  const auto empty = tokenize("");
  EXPECT_TRUE(empty.tokens.empty());
  EXPECT_TRUE(empty.sentences.empty());

  EXPECT_EQ(tokenize("Dr. Smith left.").sentences.size(), 1u);
}

TEST(Tokenize, SpansCoverTokensInOrder) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = tokenize(random_text(rng));
    std::size_t pos = 0;
    for (const auto& s : t.sentences) {
      EXPECT_EQ(s.begin, pos);
      EXPECT_LT(s.begin, s.end);
      pos = s.end;
    }
    EXPECT_EQ(pos, t.tokens.size());
    for (const auto& w : t.tokens)
      for (char c : w) EXPECT_FALSE(std::isspace(static_cast<unsigned char>(c)));
  }
}

TEST(Syllables, Examples) {
  EXPECT_EQ(count_syllables("cat"), 1);
  EXPECT_EQ(count_syllables("cancer"), 2);
  EXPECT_EQ(count_syllables("colonoscopy"), 5);
  EXPECT_EQ(count_syllables("the"), 1);
  EXPECT_THROW(count_syllables("123"), ValidationError);
  EXPECT_THROW(count_syllables(""), ValidationError);
}

TEST(Syllables, AtLeastOneForAlphabeticWords) {
  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string w;
    for (std::size_t k = 1 + rng.below(12); k > 0; --k) w += static_cast<char>('a' + rng.below(26));
    EXPECT_GE(count_syllables(w), 1) << w;
  }
}

TEST(Readability, HandComputedFixtures) {
  EXPECT_NEAR(readability("The cat sat on the mat."), fk(6, 1, 6), 1e-12);
  EXPECT_NEAR(readability("The cat sat on the mat."), -1.45, 0.01);

  std::string run_on;
  for (int i = 0; i < 100; ++i) run_on += (i ? " " : "") + std::string(i % 2 ? "cat" : "dog");
  EXPECT_NEAR(readability(run_on), fk(100, 1, 100), 1e-9);
  EXPECT_NEAR(readability(run_on), 35.21, 0.01);

  EXPECT_THROW(readability(""), ValidationError);
  EXPECT_THROW(readability("  ...  "), ValidationError);
}

TEST(Readability, InvariantUnderWhitespaceAndCase) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string text = random_text(rng);
    if (tokenize(text).tokens.empty()) continue;
    std::string loud, spaced;
    for (char c : text) {
      loud += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      spaced += c;
      if (c == ' ') spaced += "   ";
    }
    const double ref = readability(text);
    EXPECT_DOUBLE_EQ(readability(loud), ref) << text;
    EXPECT_DOUBLE_EQ(readability(spaced), ref) << text;
  }
}

TEST(LexiconCount, PhraseMatching) {
  const Lexicon lex("transition", {"first", "then", "finally", "in addition"});
  EXPECT_EQ(lexicon_count(tokenize("first we then finally"), lex), 3u);
  EXPECT_EQ(lexicon_count(tokenize("in addition we begin"), lex), 1u);
  EXPECT_EQ(lexicon_count(tokenize(""), lex), 0u);
  // Longest match first: "in addition" is consumed whole and "addition" alone is not a phrase.
  const Lexicon overlap("x", {"in", "in addition"});
  EXPECT_EQ(lexicon_count(tokenize("in addition in"), overlap), 2u);
}

TEST(ActiveVerbs, BeFormRule) {
  EXPECT_EQ(active_verb_count(tokenize("the doctor removes polyps"), verbs()), 1u);
  EXPECT_EQ(active_verb_count(tokenize("polyps are removed"), verbs()), 0u);
  EXPECT_EQ(active_verb_count(tokenize(""), verbs()), 0u);
  const auto forms = verb_base_forms("removes");
  EXPECT_NE(std::find(forms.begin(), forms.end(), "remove"), forms.end());
}

TEST(ExtractFeatures, ConstructedFixtures) {
  const Lexicon transition("t", {"first", "then", "however", "in addition"});
  const Lexicon summary("s", {"in summary", "overall"});
  const auto empty = extract_text_features("", transition, summary, verbs());
  EXPECT_EQ(empty.word_count, 0u);
  EXPECT_EQ(empty.sentence_count, 0u);
  EXPECT_TRUE(empty.readability_undefined);
  EXPECT_EQ(empty.readability, 0.0);

  const auto cat = extract_text_features("The cat sat on the mat.", transition, summary, verbs());
  EXPECT_EQ(cat.word_count, 6u);
  EXPECT_EQ(cat.unique_word_count, 5u);
  EXPECT_EQ(cat.sentence_count, 1u);
  EXPECT_NEAR(cat.readability, -1.45, 0.01);

  // Two transition phrases and one summary phrase by construction.
  const auto f = extract_text_features("First we prepare. In addition we rest. In summary it is easy.", transition,
                                       summary, verbs());
  EXPECT_EQ(f.transition_word_count, 2u);
  EXPECT_EQ(f.summary_word_count, 1u);
  EXPECT_EQ(f.sentence_count, 3u);
}

TEST(ExtractFeatures, CountBounds) {
  const Lexicon transition("t", {"first", "then", "finally", "in addition"});
  const Lexicon summary("s", {"in summary", "overall"});
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string text = random_text(rng);
    const auto f = extract_text_features(text, transition, summary, verbs());
    EXPECT_LE(f.unique_word_count, f.word_count);
    EXPECT_LE(f.transition_word_count, f.word_count);
    EXPECT_LE(f.summary_word_count, f.word_count);
    EXPECT_LE(f.active_verb_count, f.word_count);
    const auto again = extract_text_features(text, transition, summary, verbs());
    EXPECT_EQ(again.readability, f.readability);
  }
}
