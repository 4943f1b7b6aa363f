#include "vtriage/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vtriage/error.hpp"
#include "vtriage/logreg.hpp"

namespace vtriage {

namespace {

const std::vector<DictionaryRow>& term_table() {
  static const std::vector<DictionaryRow> rows = {
      {"colon cancer", "neop"},       {"colorectal cancer", "neop"}, {"adenoma", "neop"},
      {"carcinoma", "neop"},          {"tumor", "neop"},             {"colonoscopy", "diap"},
      {"sigmoidoscopy", "diap"},      {"biopsy", "diap"},            {"stool test", "lbpr"},
      {"polyps", "dsyn"},             {"diverticulitis", "dsyn"},    {"hemorrhoids", "dsyn"},
      {"ulcerative colitis", "dsyn"}, {"crohn disease", "dsyn"},     {"rectum", "bpoc"},
      {"intestine", "bpoc"},          {"bowel", "bpoc"},             {"polypectomy", "topp"},
      {"bowel preparation", "topp"},  {"sedation", "topp"},          {"bleeding", "sosy"},
      {"abdominal pain", "sosy"},     {"constipation", "sosy"},      {"diarrhea", "sosy"},
      {"laxative", "pshu"},           {"propofol", "orch"},          {"endoscope", "medd"},
      {"gastroenterologist", "prog"}, {"anemia", "dsyn"},            {"lesion", "acab"},
  };
  return rows;
}

// None of these may appear in the term table.
constexpr std::array<const char*, 48> kFiller = {
    "the",    "a",      "my",      "your",    "this",     "that",   "we",      "you",
    "they",   "it",     "is",      "was",     "are",      "will",   "can",     "should",
    "about",  "after",  "before",  "during",  "with",     "for",    "from",    "today",
    "video",  "story",  "family",  "friend",  "morning",  "day",    "week",    "year",
    "really", "very",   "quite",   "simple",  "good",     "easy",   "short",   "long",
    "people", "home",   "clinic",  "nurse",   "question", "answer", "minutes", "visit",
};

constexpr std::array<const char*, 12> kVerbs = {
    "explain", "remove", "check",  "prepare", "describe", "show",
    "discuss", "follow", "review", "watch",   "schedule", "learn",
};

constexpr std::array<const char*, 6> kTransitions = {"first", "next", "then", "however", "finally", "also"};
constexpr std::array<const char*, 3> kSummaries = {"in summary", "to summarize", "in conclusion"};

template <std::size_t N>
std::string pick(Rng& rng, const std::array<const char*, N>& a) {
  return a[rng.below(N)];
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// One sentence with `n_terms` medical mentions among filler words.
std::string make_sentence(Rng& rng, std::size_t n_terms, bool discourse) {
  const auto& terms = term_table();
  std::vector<std::string> words;
  const std::size_t length = 5 + rng.below(7);
  for (std::size_t i = 0; i < length; ++i) {
    if (rng.bernoulli(0.2)) words.push_back(pick(rng, kVerbs));
    else words.push_back(pick(rng, kFiller));
  }
  for (std::size_t k = 0; k < n_terms; ++k) {
    const std::size_t at = rng.below(words.size() + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), terms[rng.below(terms.size())].term);
  }
  if (discourse && rng.bernoulli(0.3)) words.insert(words.begin(), pick(rng, kTransitions) + ",");
  if (discourse && rng.bernoulli(0.04)) words.insert(words.begin(), pick(rng, kSummaries) + ",");
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return capitalize(s) + ".";
}

std::size_t mention_count(Rng& rng, double density) {
  std::size_t n = 0;
  if (rng.bernoulli(density)) ++n;
  if (rng.bernoulli(density * 0.5)) ++n;
  return n;
}

int noisy(Rng& rng, int truth, double flip) { return rng.bernoulli(flip) ? 1 - truth : truth; }

}  // namespace

SynthCorpus generate_corpus(const SynthOptions& opts) {
  if (opts.videos == 0 || opts.annotators == 0) throw ValidationError("synthetic corpus needs videos and annotators");
  Rng rng(opts.seed);
  SynthCorpus c;
  c.dictionary = term_table();
  const auto base = parse_utc_timestamp("2019-01-01T00:00:00Z");

  for (std::size_t v = 0; v < opts.videos; ++v) {
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "syn%04zu", v + 1);
    const std::string id = idbuf;
    const double density = rng.uniform(0.2, 1.0);

    VideoRecord rec;
    rec.video_id = id;
    rec.channel_id = "UCsynth" + std::to_string(rng.below(8));
    rec.published_at = base + std::chrono::hours(24 * static_cast<long>(rng.below(900)));
    rec.title = make_sentence(rng, 1, false);
    rec.title.pop_back();  // titles carry no final period
    std::size_t desc_terms = 0;
    for (std::size_t s = 0; s < opts.description_sentences; ++s) {
      const std::size_t n = mention_count(rng, density);
      desc_terms += n;
      rec.description += (s ? " " : "") + make_sentence(rng, n, true);
    }
    if (rng.bernoulli(0.5)) rec.tags = {"colonoscopy", "health"};
    rec.duration_s = static_cast<std::int64_t>(30 + rng.below(1200));
    rec.definition = rng.bernoulli(0.6) ? Definition::hd : Definition::sd;
    rec.caption_available = rng.bernoulli(0.3);
    rec.view_count = static_cast<std::int64_t>(rng.below(100000));
    if (rng.bernoulli(0.8)) rec.like_count = static_cast<std::int64_t>(rng.below(2000));
    c.videos.push_back(rec);

    TranscriptDoc tr;
    tr.video_id = id;
    const bool speech = rng.bernoulli(0.9);
    const double tr_quality = rng.uniform(0.55, 0.95);
    if (speech) {
      const std::size_t n_sent = opts.transcript_sentences / 2 + rng.below(opts.transcript_sentences + 1);
      for (std::size_t s = 0; s < n_sent; s += 3) {
        TranscriptSegment seg;
        for (std::size_t k = s; k < std::min(n_sent, s + 3); ++k)
          seg.text += (seg.text.empty() ? "" : " ") + make_sentence(rng, mention_count(rng, density), true);
        seg.confidence = std::clamp(tr_quality + rng.uniform(-0.05, 0.05), 0.0, 1.0);
        tr.segments.push_back(seg);
      }
    }
    c.transcripts.push_back(tr);

    OcrDoc ocr;
    ocr.video_id = id;
    const bool has_text = rng.bernoulli(0.9);
    const double ocr_quality = rng.uniform(0.6, 1.0);
    if (has_text) {
      const std::size_t n_blocks = 1 + rng.below(6);
      for (std::size_t b = 0; b < n_blocks; ++b)
        ocr.blocks.push_back({pick(rng, kVerbs) + " " + pick(rng, kFiller),
                              std::clamp(ocr_quality + rng.uniform(-0.05, 0.05), 0.0, 1.0),
                              static_cast<double>(b * 10 + rng.below(10))});
    }
    ocr.shot_count = static_cast<std::int64_t>(rng.below(15));
    ocr.shot_change_confidence = ocr.shot_count ? rng.uniform(0.3, 0.8) : 0.0;
    c.ocr.push_back(ocr);

    // Latent annotation model.
    const double per_sentence = static_cast<double>(desc_terms) / static_cast<double>(std::max<std::size_t>(1, opts.description_sentences));
    const int med = rng.bernoulli(sigmoid(4.0 * (per_sentence - 0.6))) ? 1 : 0;
    const double ocr_conf = has_text ? ocr_quality : 0.0;
    const int und = rng.bernoulli(sigmoid(5.0 * (ocr_conf - 0.75) - 0.15 * (static_cast<double>(ocr.shot_count) - 7.0))) ? 1 : 0;
    const int recd = rng.bernoulli(sigmoid(-2.0 + 2.0 * med + 2.0 * und + (speech ? 1.0 : -1.0) * (tr_quality - 0.6)))
                         ? 1
                         : 0;
    for (std::size_t a = 0; a < opts.annotators; ++a) {
      AnnotationLabels l;
      l.video_id = id;
      l.annotator_id = "ann" + std::to_string(a + 1);
      l.medical_info_high = noisy(rng, med, 0.1);
      l.understandable = noisy(rng, und, 0.1);
      l.recommended = noisy(rng, recd, 0.1);
      c.label_rows.push_back(l);
    }
  }
  return c;
}

void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw IoError("cannot write " + dir + "/" + name);
    return out;
  };
  {
    auto out = open("videos.jsonl");
    for (const auto& v : corpus.videos) out << serialize_video_metadata(v) << '\n';
  }
  {
    auto out = open("transcripts.jsonl");
    for (const auto& t : corpus.transcripts) out << serialize_transcript(t) << '\n';
  }
  {
    auto out = open("ocr.jsonl");
    for (const auto& o : corpus.ocr) out << serialize_ocr(o) << '\n';
  }
  {
    auto out = open("labels.jsonl");
    for (const auto& l : corpus.label_rows) out << serialize_labels(l) << '\n';
  }
  {
    auto out = open("dictionary.tsv");
    for (const auto& r : corpus.dictionary) out << r.term << '\t' << r.code << '\n';
  }
}

std::vector<FeatureVector> simulate_logistic_rows(const FeatureSpec& spec, double intercept,
                                                  std::span<const double> coefficients, std::size_t n, Rng& rng) {
  if (coefficients.size() != spec.features.size())
    throw ValidationError("simulation: coefficient count does not match the feature set");
  std::vector<FeatureVector> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "sim%06zu", i);
    FeatureVector& r = rows[i];
    r.video_id = idbuf;
    r.values.fill(0.0);
    double eta = intercept;
    for (std::size_t j = 0; j < spec.features.size(); ++j) {
      const Feature f = spec.features[j];
      const double x = is_binary(f) ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.normal();
      r[f] = x;
      eta += coefficients[j] * x;
    }
    const int y = rng.bernoulli(sigmoid(eta)) ? 1 : 0;
    switch (spec.target) {
      case Target::recommendation: r.recommended = y; break;
      case Target::medical_info: r[Feature::medical_info_high] = y; r.recommended = 0; break;
      case Target::understandability: r[Feature::understandable] = y; r.recommended = 0; break;
    }
  }
  return rows;
}

}  // namespace vtriage
