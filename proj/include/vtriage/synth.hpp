#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vtriage/corpus.hpp"
#include "vtriage/features.hpp"
#include "vtriage/rng.hpp"

namespace vtriage {

struct SynthOptions {
  std::size_t videos = 50;
  std::size_t description_sentences = 9;  // plus one title sentence per video
  std::size_t transcript_sentences = 30;
  std::size_t annotators = 3;
  std::uint64_t seed = 7;
};

struct DictionaryRow {
  std::string term;
  std::string code;
};

/// A generated corpus whose medical terms come from `dictionary`, so that
/// dictionary projection gives the reference labels. Annotations follow a
/// latent logistic model of the generated content, with annotator noise.
struct SynthCorpus {
  std::vector<VideoRecord> videos;
  std::vector<TranscriptDoc> transcripts;
  std::vector<OcrDoc> ocr;
  std::vector<AnnotationLabels> label_rows;
  std::vector<DictionaryRow> dictionary;
};

SynthCorpus generate_corpus(const SynthOptions& opts);

/// videos.jsonl, transcripts.jsonl, ocr.jsonl, labels.jsonl and
/// dictionary.tsv under `dir` (created if needed).
void write_corpus(const SynthCorpus& corpus, const std::string& dir);

/// Rows drawn from a known logistic model: continuous features standard
/// normal, binaries Bernoulli(0.5), y ~ Bernoulli(sigmoid(b0 + b.x)).
/// The outcome is stored as the label of `spec.target`; the remaining
/// annotation fields are filled so every row counts as annotated.
std::vector<FeatureVector> simulate_logistic_rows(const FeatureSpec& spec, double intercept,
                                                  std::span<const double> coefficients, std::size_t n, Rng& rng);

}  // namespace vtriage
