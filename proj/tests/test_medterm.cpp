#include <algorithm>
#include <cctype>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vtriage/error.hpp"
#include "vtriage/medterm.hpp"
#include "vtriage/rng.hpp"

using namespace vtriage;

namespace {

const std::set<std::string>& stopwords() {
  static const auto s = load_stopwords(std::string(VTRIAGE_DATA_DIR) + "/stopwords.txt");
  return s;
}

std::set<SemanticType> all_types() {
  const auto& a = all_semantic_types();
  return {a.begin(), a.end()};
}

TermDictionary dict_of(std::initializer_list<std::string> keys) {
  TermDictionary::Entries e;
  for (const auto& k : keys) e[k] = {SemanticType::dsyn};
  return TermDictionary(std::move(e));
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

TEST(SemanticTypes, ClosedSet) {
  EXPECT_EQ(all_semantic_types().size(), kSemanticTypeCount);
  for (auto t : all_semantic_types()) EXPECT_EQ(semantic_type_from_code(code(t)), t);
  EXPECT_EQ(semantic_type_from_code("pshu"), SemanticType::pshu);
  EXPECT_FALSE(semantic_type_from_code("qlco").has_value());
}

TEST(Bio, TagStringsAndRepair) {
  EXPECT_EQ(to_string(BioTag::B), "B-MED");
  EXPECT_EQ(parse_bio_tag("I-MED"), BioTag::I);
  EXPECT_THROW(parse_bio_tag("B-PER"), ValidationError);
  const std::vector<BioTag> bad = {BioTag::I, BioTag::O, BioTag::I, BioTag::I};
  EXPECT_FALSE(is_well_formed_bio(bad));
  EXPECT_EQ(repair_bio(bad), (std::vector<BioTag>{BioTag::B, BioTag::O, BioTag::B, BioTag::I}));
}

TEST(CleanTerms, Examples) {
  const std::vector<std::string> a = {"bowel preparation (oral)"};
  EXPECT_EQ(clean_terms(a, stopwords()), (std::set<std::string>{"bowel", "preparation", "oral"}));
  const std::vector<std::string> b = {"the of and"};
  EXPECT_TRUE(clean_terms(b, stopwords()).empty());
  const std::vector<std::string> c = {"ion gap"};
  EXPECT_TRUE(clean_terms(c, stopwords()).empty());
}

TEST(CleanTerms, PropertiesOnRandomLists) {
  static const char* pieces[] = {"Colon", "cancer", "(oral)", "the", "of", "ion", "gap", "bowel-prep", "X-Ray",
                                 "polyps!", "and", "CT", "rectal", "bleeding,", "about", "5mg", "aspirin;"};
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> raw;
    for (std::size_t n = rng.below(5); n > 0; --n) {
      std::string term;
      for (std::size_t k = 1 + rng.below(4); k > 0; --k) term += std::string(term.empty() ? "" : " ") + pieces[rng.below(std::size(pieces))];
      raw.push_back(term);
    }
    const auto out = clean_terms(raw, stopwords());
    const std::vector<std::string> as_list(out.begin(), out.end());
    EXPECT_EQ(clean_terms(as_list, stopwords()), out);
    std::string joined;
    for (const auto& r : raw) joined += r + " ";
    std::transform(joined.begin(), joined.end(), joined.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (const auto& w : out) {
      EXPECT_GT(w.size(), 3u);
      EXPECT_EQ(stopwords().count(w), 0u) << w;
      for (char ch : w) EXPECT_FALSE(std::isupper(static_cast<unsigned char>(ch)));
      // Soundness: every surviving letter run comes from the input.
      bool found = false;
      for (std::size_t at = joined.find(w.substr(0, 1)); at != std::string::npos && !found; at = joined.find(w[0], at + 1)) {
        std::string letters;
        for (std::size_t i = at; i < joined.size() && letters.size() < w.size(); ++i)
          if (std::isalnum(static_cast<unsigned char>(joined[i]))) letters += joined[i];
          else if (joined[i] == ' ') break;
        found = letters == w;
      }
      EXPECT_TRUE(found) << w << " from " << joined;
    }
  }
}

TEST(LoadDictionary, UnknownAndDisallowedCodes) {
  vt_test::TempDir dir("dict");
  vt_test::write_file(dir.file("d.tsv"), "colon cancer\tneop\nhappiness\tqlco\n");
  DictionaryLoadReport report;
  const auto d = load_dictionary(dir.file("d.tsv"), all_types(), stopwords(), &report);
  EXPECT_TRUE(d.contains("colon cancer"));
  EXPECT_TRUE(d.contains("colon"));
  EXPECT_TRUE(d.contains("cancer"));
  EXPECT_FALSE(d.contains("happiness"));
  EXPECT_EQ(report.warnings.size(), 1u);

  vt_test::write_file(dir.file("bad.tsv"), "colon cancer\tneop\nno tab here\n");
  try {
    load_dictionary(dir.file("bad.tsv"), all_types(), stopwords());
    FAIL() << "expected a malformed-row error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
}

TEST(LoadDictionary, TenRowFixture) {
  // Ten single-word rows; hcro and pshu are not allowed here and "food" is not a known code.
  auto allowed = all_types();
  allowed.erase(SemanticType::hcro);
  allowed.erase(SemanticType::pshu);
  DictionaryLoadReport report;
  const auto d = load_dictionary(vt_test::fixture("dictionary10.tsv"), allowed, stopwords(), &report);
  EXPECT_EQ(report.rows, 10u);
  EXPECT_EQ(d.size(), 7u);
  EXPECT_FALSE(d.contains("hospital"));
  EXPECT_FALSE(d.contains("aspirin"));
  EXPECT_FALSE(d.contains("fiber"));
}

TEST(Projection, Examples) {
  const auto d = dict_of({"colonoscopy", "colon cancer"});
  const std::vector<std::string> toks = {"colonoscopy", "screening", "detects", "colon", "cancer"};
  EXPECT_EQ(project_sentence(d, toks).labels,
            (std::vector<BioTag>{BioTag::B, BioTag::O, BioTag::O, BioTag::B, BioTag::I}));

  const std::vector<std::string> none = {"nothing", "here"};
  EXPECT_EQ(project_sentence(d, none).labels, (std::vector<BioTag>{BioTag::O, BioTag::O}));

  const auto both = dict_of({"colon", "colon cancer"});
  const std::vector<std::string> cc = {"colon", "cancer", "risk"};
  EXPECT_EQ(project_sentence(both, cc).labels, (std::vector<BioTag>{BioTag::B, BioTag::I, BioTag::O}));
  EXPECT_EQ(project_sentence(both, cc, ProjectionMode::word).labels,
            (std::vector<BioTag>{BioTag::B, BioTag::O, BioTag::O}));
}

TEST(Projection, WellFormedAndSoundOnRandomInput) {
  static const char* vocab[] = {"colon", "cancer", "polyp", "screening", "the", "test", "blood", "stool", "rectal"};
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    TermDictionary::Entries e;
    for (std::size_t k = rng.below(6); k > 0; --k) {
      std::string key = vocab[rng.below(std::size(vocab))];
      for (std::size_t extra = rng.below(3); extra > 0; --extra) key += std::string(" ") + vocab[rng.below(std::size(vocab))];
      e[key] = {SemanticType::neop};
    }
    const TermDictionary d(e);
    std::vector<std::string> toks;
    for (std::size_t k = rng.below(12); k > 0; --k) toks.push_back(vocab[rng.below(std::size(vocab))]);
    const auto s = project_sentence(d, toks);
    ASSERT_EQ(s.labels.size(), toks.size());
    EXPECT_TRUE(is_well_formed_bio(s.labels));
    for (const auto& span : extract_spans(s)) EXPECT_TRUE(d.contains(span)) << span;
  }
}

TEST(UniqueTerms, DistinctSurfaceForms) {
  auto sentence = [](std::vector<std::string> toks, std::vector<BioTag> tags) {
    return TaggedSentence{std::move(toks), std::move(tags)};
  };
  using enum BioTag;
  std::vector<TaggedSentence> s = {
      sentence({"colon", "cancer", "and", "colonoscopy"}, {B, I, O, B}),
      sentence({"Colon", "Cancer"}, {B, I}),
  };
  EXPECT_EQ(unique_medical_terms(s), 2u);
  std::reverse(s.begin(), s.end());
  EXPECT_EQ(unique_medical_terms(s), 2u);
  std::vector<TaggedSentence> none = {sentence({"a", "b"}, {O, O})};
  EXPECT_EQ(unique_medical_terms(none), 0u);
}

TEST(UniqueTerms, SyntheticScale1917) {
  // 1917 distinct two-word entities spread over sentences, each repeated twice.
  std::vector<TaggedSentence> s;
  for (int rep = 0; rep < 2; ++rep)
    for (int i = 0; i < 1917; ++i)
      s.push_back({{"term" + std::to_string(i), "x" + std::to_string(i % 7), "end"}, {BioTag::B, BioTag::I, BioTag::O}});
  EXPECT_EQ(unique_medical_terms(s), 1917u);
}

TEST(Conll, RoundTrip) {
  vt_test::TempDir dir("conll");
  std::vector<TaggedDocument> docs = {
      {"v1", {{{"colon", "cancer"}, {BioTag::B, BioTag::I}}, {{"ok"}, {BioTag::O}}}},
      {"v2", {{{"polyps"}, {BioTag::B}}}},
  };
  write_conll(dir.file("c.conll"), docs);
  const auto back = read_conll(dir.file("c.conll"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].doc_id, "v1");
  EXPECT_EQ(back[0].sentences, docs[0].sentences);
  EXPECT_EQ(back[1].sentences, docs[1].sentences);
}
