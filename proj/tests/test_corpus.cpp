#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vtriage/corpus.hpp"
#include "vtriage/error.hpp"
#include "vtriage/rng.hpp"

using namespace vtriage;
using vt_test::fixture;

TEST(DedupeIds, KeepsFirstAppearance) {
  const std::vector<std::string> in = {"a", "b", "a", "c", "b"};
  EXPECT_EQ(dedupe_ids(in), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(dedupe_ids(std::vector<std::string>{}).empty());
}

TEST(DedupeIds, CollectedListWith828DistinctIds) {
  // 988 collected ids, 828 distinct: 160 repeats spread through the list.
  Rng rng(3);
  std::vector<std::string> ids;
  for (int i = 0; i < 828; ++i) ids.push_back("id" + std::to_string(i));
  for (int i = 0; i < 160; ++i) ids.push_back("id" + std::to_string(rng.below(828)));
  rng.shuffle(std::span(ids));
  ASSERT_EQ(ids.size(), 988u);
  const auto out = dedupe_ids(ids);
  EXPECT_EQ(out.size(), 828u);
  EXPECT_EQ(dedupe_ids(out), out);
}

TEST(ParseVideo, AppendixRecord) {
  const auto v = parse_video_metadata(
      R"({"video_id":"vEtZh2Zi9TU","title":"Colorectal cancer symptoms and screening guidelines","duration":"PT3M28S"})");
  EXPECT_EQ(v.video_id, "vEtZh2Zi9TU");
  EXPECT_EQ(v.title, "Colorectal cancer symptoms and screening guidelines");
  EXPECT_EQ(v.duration_s, 208);
  EXPECT_FALSE(v.view_count.has_value());
  EXPECT_FALSE(v.like_count.has_value());
}

TEST(ParseVideo, IntegerDurationAndZeroCountsArePresent) {
  const auto v = parse_video_metadata(R"({"video_id":"x","duration":95,"view_count":0})");
  EXPECT_EQ(v.duration_s, 95);
  ASSERT_TRUE(v.view_count.has_value());
  EXPECT_EQ(*v.view_count, 0);
}

TEST(ParseVideo, Errors) {
  EXPECT_THROW(parse_video_metadata(R"({"title":"x"})"), SchemaError);
  EXPECT_THROW(parse_video_metadata(R"({"video_id":"x","view_count":-1})"), SchemaError);
  try {
    parse_video_metadata(R"({"video_id": "x", "title": )");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.byte_offset(), 20u);
  }
}

TEST(ParseVideo, Iso8601Durations) {
  EXPECT_EQ(parse_iso8601_duration("PT3M28S"), 208);
  EXPECT_EQ(parse_iso8601_duration("PT1H2M3S"), 3723);
  EXPECT_EQ(parse_iso8601_duration("P1DT2H"), 93600);
  EXPECT_EQ(parse_iso8601_duration("PT12M"), 720);
  EXPECT_THROW(parse_iso8601_duration("3M28S"), SchemaError);
  EXPECT_THROW(parse_iso8601_duration("PT"), SchemaError);
}

TEST(ParseVideo, RoundTripOnRandomRecords) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    VideoRecord v;
    v.video_id = "vid" + std::to_string(rng.below(1000000));
    v.channel_id = rng.bernoulli(0.5) ? "UC" + std::to_string(rng.below(99)) : "";
    if (rng.bernoulli(0.7)) v.published_at = parse_utc_timestamp("2015-01-01T00:00:00Z") + std::chrono::seconds(rng.below(200000000));
    v.title = rng.bernoulli(0.9) ? "Title \"quoted\" \xC3\xA9 " + std::to_string(trial) : "";
    v.description = rng.bernoulli(0.5) ? "line one\nline two\ttab" : "";
    for (std::size_t k = rng.below(4); k > 0; --k) v.tags.push_back("tag" + std::to_string(k));
    v.duration_s = static_cast<std::int64_t>(rng.below(10000));
    v.definition = rng.bernoulli(0.5) ? Definition::hd : Definition::sd;
    v.caption_available = rng.bernoulli(0.5);
    if (rng.bernoulli(0.5)) v.view_count = static_cast<std::int64_t>(rng.below(1000000));
    if (rng.bernoulli(0.5)) v.like_count = static_cast<std::int64_t>(rng.below(1000));
    if (rng.bernoulli(0.5)) v.dislike_count = 0;
    if (rng.bernoulli(0.5)) v.comment_count = static_cast<std::int64_t>(rng.below(50));
    const auto back = parse_video_metadata(serialize_video_metadata(v));
    ASSERT_EQ(back, v) << serialize_video_metadata(v);
  }
}

TEST(ParseOtherRecords, RoundTrip) {
  TranscriptDoc t{"a", {{"hello there", 0.5}, {"general", 1.0}}};
  EXPECT_EQ(parse_transcript(serialize_transcript(t)), t);
  // Word-weighted mean: (2*0.5 + 1*1.0) / 3.
  EXPECT_NEAR(t.overall_confidence(), 2.0 / 3.0, 1e-12);
  OcrDoc o{"a", {{"x", 0.8, 1.0}, {"y", 0.6, 2.0}}, 4, 0.5};
  EXPECT_EQ(parse_ocr(serialize_ocr(o)), o);
  EXPECT_NEAR(o.overall_confidence(), 0.7, 1e-12);
  AnnotationLabels l{"a", 1, 0, 1, "ra1"};
  EXPECT_EQ(parse_labels(serialize_labels(l)), l);
  EXPECT_THROW(parse_transcript(R"({"video_id":"a","segments":[{"text":"x","confidence":1.5}]})"), SchemaError);
  EXPECT_THROW(parse_labels(R"({"video_id":"a","medical_info_high":2,"understandable":0,"recommended":0})"),
               SchemaError);
}

TEST(ConsolidateLabels, MajorityAndTieRule) {
  auto row = [](int r) { return AnnotationLabels{"v", r, r, r, "x"}; };
  std::vector<AnnotationLabels> three = {row(1), row(1), row(0)};
  EXPECT_EQ(consolidate_labels(three).recommended, 1);
  std::vector<AnnotationLabels> zeros = {row(0), row(0), row(0)};
  EXPECT_EQ(consolidate_labels(zeros).recommended, 0);
  std::vector<AnnotationLabels> tie = {row(1), row(0)};
  EXPECT_EQ(consolidate_labels(tie).recommended, 0);
  std::vector<AnnotationLabels> mixed = {row(1), AnnotationLabels{"w", 1, 1, 1, "y"}};
  EXPECT_THROW(consolidate_labels(mixed), ValidationError);
}

TEST(ConsolidateLabels, PermutationInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<AnnotationLabels> rows;
    for (std::size_t k = 1 + rng.below(5); k > 0; --k)
      rows.push_back({"v", rng.bernoulli(0.5), rng.bernoulli(0.5), rng.bernoulli(0.5), "a" + std::to_string(k)});
    const auto ref = consolidate_labels(rows);
    rng.shuffle(std::span(rows));
    EXPECT_EQ(consolidate_labels(rows), ref);
  }
}

TEST(LoadCorpus, FiveVideoFixture) {
  const auto d = fixture("ingest5");
  const auto store = load_corpus(d + "/videos.jsonl", d + "/transcripts.jsonl", d + "/ocr.jsonl", d + "/labels.jsonl");
  EXPECT_EQ(store.videos().size(), 5u);
  EXPECT_EQ(store.summary().to_string(), "5 videos, 5 transcripts, 5 ocr, 15 labels");
  ASSERT_NE(store.label("rkmHIG4EvHU"), nullptr);
  EXPECT_EQ(store.label("rkmHIG4EvHU")->understandable, 1);
  EXPECT_EQ(store.label("SExZiM3DQDw")->recommended, 0);
  EXPECT_EQ(store.videos().at("vEtZh2Zi9TU").duration_s, 208);
}

class CorpusFiles : public ::testing::Test {
 protected:
  vt_test::TempDir dir{"corpus"};
  void write(const std::string& videos, const std::string& transcripts, const std::string& ocr,
             const std::string& labels) {
    vt_test::write_file(dir.file("v.jsonl"), videos);
    vt_test::write_file(dir.file("t.jsonl"), transcripts);
    vt_test::write_file(dir.file("o.jsonl"), ocr);
    vt_test::write_file(dir.file("l.jsonl"), labels);
  }
  CorpusStore load() { return load_corpus(dir.file("v.jsonl"), dir.file("t.jsonl"), dir.file("o.jsonl"), dir.file("l.jsonl")); }
};

TEST_F(CorpusFiles, DanglingTranscriptIdIsNamed) {
  write("{\"video_id\":\"a\"}\n{\"video_id\":\"b\"}\n", "{\"video_id\":\"zz9\",\"segments\":[]}\n", "", "");
  try {
    load();
    FAIL() << "expected an integrity error";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("zz9"), std::string::npos);
  }
}

TEST_F(CorpusFiles, DuplicateVideoIdRejected) {
  write("{\"video_id\":\"a\"}\n{\"video_id\":\"a\"}\n", "", "", "");
  EXPECT_THROW(load(), SchemaError);
}

TEST_F(CorpusFiles, EmptyLabelsFileIsFlagged) {
  write("{\"video_id\":\"a\"}\n", "", "", "");
  const auto store = load();
  EXPECT_TRUE(store.labels().empty());
  EXPECT_FALSE(store.summary().warnings.empty());
}

TEST_F(CorpusFiles, JsonArrayRejected) {
  write("[{\"video_id\":\"a\"}]\n", "", "", "");
  EXPECT_THROW(load(), ValidationError);
}

TEST_F(CorpusFiles, RandomDanglingIdsAlwaysError) {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(6);
    std::string videos, transcripts, ocr, labels;
    for (std::size_t i = 0; i < n; ++i) videos += "{\"video_id\":\"v" + std::to_string(i) + "\"}\n";
    const std::string bad = "ghost" + std::to_string(trial);
    const auto where = rng.below(3);
    auto ref = [&](std::size_t i) { return i == 0 ? bad : "v" + std::to_string(i); };
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = where == 0 ? ref(i) : "v" + std::to_string(i);
      transcripts += "{\"video_id\":\"" + id + "\",\"segments\":[]}\n";
    }
    if (where == 1) ocr = "{\"video_id\":\"" + bad + "\",\"blocks\":[],\"shot_count\":0,\"shot_change_confidence\":0}\n";
    if (where == 2)
      labels = "{\"video_id\":\"" + bad + "\",\"medical_info_high\":1,\"understandable\":0,\"recommended\":0,\"annotator_id\":\"a\"}\n";
    write(videos, transcripts, ocr, labels);
    EXPECT_THROW(load(), SchemaError) << "trial " << trial;
  }
}

TEST(ApiResponse, Flattens) {
  const auto recs = flatten_api_response(vt_test::read_file(fixture("api_response.json")));
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].video_id, "vEtZh2Zi9TU");
  EXPECT_EQ(recs[0].duration_s, 208);
  EXPECT_EQ(recs[0].definition, Definition::hd);
  EXPECT_TRUE(recs[0].caption_available);
  EXPECT_EQ(recs[0].view_count, 120345);
  EXPECT_FALSE(recs[0].dislike_count.has_value());
  EXPECT_EQ(recs[1].view_count, 0);
  EXPECT_FALSE(recs[1].like_count.has_value());
}

TEST(SearchResults, ValidatedAgainstKeywords) {
  const auto keywords = load_keywords(std::string(VTRIAGE_DATA_DIR) + "/keywords.txt");
  EXPECT_EQ(keywords.size(), 26u);
  const auto results = load_search_results(fixture("search_results.jsonl"));
  const auto s = validate_search_results(results, keywords);
  EXPECT_EQ(s.ids_collected, 4u);
  EXPECT_EQ(s.unique_ids, 3u);
  std::vector<SearchResult> bad = {{"weather", "x"}};
  EXPECT_THROW(validate_search_results(bad, keywords), SchemaError);
}
