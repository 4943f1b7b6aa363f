#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vtriage/corpus.hpp"
#include "vtriage/textfeat.hpp"

namespace vtriage {

/// Per-video features, in roster order. Suffix _v is computed from the
/// video's transcript and OCR output, _m from its title and description.
enum class Feature : std::size_t {
  ocr_confidence,
  n_active_verbs_v,
  readability_v,
  n_sentences_v,
  n_shots,
  shot_change_confidence,
  n_summary_words_v,
  transcription_confidence,
  n_transition_words_v,
  n_words_v,
  n_unique_words_v,
  has_title,
  has_description,
  has_tags,
  readability_m,
  n_sentences_m,
  n_words_m,
  n_unique_words_m,
  n_transition_words_m,
  n_summary_words_m,
  n_active_verbs_m,
  duration_s,
  n_unique_medical_terms,
  medical_info_high,
  understandable,
};

inline constexpr std::size_t kNumFeatures = 25;

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);
bool is_binary(Feature f);
const std::array<Feature, kNumFeatures>& all_features();

/// One row of the feature matrix. A NaN value means "not available" (the
/// annotation block of an unannotated video).
struct FeatureVector {
  std::string video_id;
  std::array<double, kNumFeatures> values{};
  std::optional<int> recommended;

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  bool annotated() const;
};

enum class Target { recommendation, medical_info, understandability };

std::string to_string(Target t);
Target parse_target(const std::string& s);

struct FeatureSpec {
  Target target = Target::recommendation;
  std::vector<Feature> features;

  static FeatureSpec for_target(Target t);
  std::string name() const { return to_string(target); }
};

/// Label of `row` for `target`, if the video is annotated.
std::optional<int> target_label(const FeatureVector& row, Target target);

struct TextLexicons {
  Lexicon transition;
  Lexicon summary;
  Lexicon verbs;

  /// transition_words.txt, summary_words.txt and active_verbs.txt in `dir`.
  static TextLexicons load(const std::string& dir);
};

struct VideoTextFeatures {
  TextFeatures video;     // transcript text
  TextFeatures metadata;  // title and description
};

/// Title and description joined by a blank line. A title without closing
/// punctuation gets a period so that it stays a separate sentence.
std::string metadata_text(const VideoRecord& v);

VideoTextFeatures featurize_video(const VideoRecord& v, const TranscriptDoc* transcript, const TextLexicons& lex);

/// One vector per video (labeled videos only unless `include_unlabeled`).
/// Videos without a transcript or OCR document get zero-valued video-level
/// features. Throws ValidationError if a video has no text-feature entry.
std::vector<FeatureVector> assemble_features(const CorpusStore& store,
                                             const std::map<std::string, VideoTextFeatures>& text_features,
                                             const std::map<std::string, std::size_t>& ner_counts,
                                             bool include_unlabeled = false);

/// Tab-separated: video_id, the 25 features, recommended. Missing values
/// are written as NA.
std::string format_feature_tsv(std::span<const FeatureVector> rows);
std::vector<FeatureVector> parse_feature_tsv(const std::string& text);
void write_feature_tsv(const std::string& path, std::span<const FeatureVector> rows);
std::vector<FeatureVector> read_feature_tsv(const std::string& path);

/// Design matrix for `spec`, rows in input order. Throws ValidationError
/// naming the first missing (NaN) value.
Eigen::MatrixXd design_matrix(std::span<const FeatureVector> rows, const FeatureSpec& spec);

/// Per-column affine map fitted on training rows. Binary columns and
/// zero-variance columns keep mean 0 and sd 1, so they pass through.
struct Scaler {
  std::vector<Feature> features;
  std::vector<double> mean;
  std::vector<double> sd;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::RowVectorXd apply(const Eigen::RowVectorXd& x) const;
};

/// z-scoring with the sample (n-1) standard deviation.
Scaler standardize_fit(const Eigen::MatrixXd& X, std::span<const Feature> features,
                       std::vector<std::string>* warnings = nullptr);
Eigen::MatrixXd standardize_apply(const Scaler& s, const Eigen::MatrixXd& X);

/// Shortest round-trip decimal text of `x`.
std::string format_double(double x);

}  // namespace vtriage
