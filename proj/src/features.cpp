#include "vtriage/features.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vtriage/error.hpp"

namespace vtriage {

namespace {

constexpr std::array<std::string_view, kNumFeatures> kNames = {
    "ocr_confidence",       "n_active_verbs_v",   "readability_v",
    "n_sentences_v",        "n_shots",            "shot_change_confidence",
    "n_summary_words_v",    "transcription_confidence", "n_transition_words_v",
    "n_words_v",            "n_unique_words_v",   "has_title",
    "has_description",      "has_tags",           "readability_m",
    "n_sentences_m",        "n_words_m",          "n_unique_words_m",
    "n_transition_words_m", "n_summary_words_m",  "n_active_verbs_m",
    "duration_s",           "n_unique_medical_terms", "medical_info_high",
    "understandable",
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::array<Feature, kNumFeatures> make_all() {
  std::array<Feature, kNumFeatures> a{};
  for (std::size_t i = 0; i < kNumFeatures; ++i) a[i] = static_cast<Feature>(i);
  return a;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

std::string_view feature_name(Feature f) { return kNames.at(static_cast<std::size_t>(f)); }

std::optional<Feature> feature_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i)
    if (kNames[i] == name) return static_cast<Feature>(i);
  return std::nullopt;
}

bool is_binary(Feature f) {
  switch (f) {
    case Feature::has_title:
    case Feature::has_description:
    case Feature::has_tags:
    case Feature::medical_info_high:
    case Feature::understandable:
      return true;
    default:
      return false;
  }
}

const std::array<Feature, kNumFeatures>& all_features() {
  static const auto all = make_all();
  return all;
}

bool FeatureVector::annotated() const {
  return !std::isnan((*this)[Feature::medical_info_high]) && !std::isnan((*this)[Feature::understandable]) &&
         recommended.has_value();
}

std::string to_string(Target t) {
  switch (t) {
    case Target::recommendation: return "recommendation";
    case Target::medical_info: return "medical_info";
    case Target::understandability: return "understandability";
  }
  return "?";
}

Target parse_target(const std::string& s) {
  if (s == "recommendation") return Target::recommendation;
  if (s == "medical_info") return Target::medical_info;
  if (s == "understandability") return Target::understandability;
  throw ValidationError("unknown target '" + s + "' (expected recommendation, medical_info or understandability)");
}

FeatureSpec FeatureSpec::for_target(Target t) {
  using F = Feature;
  FeatureSpec s;
  s.target = t;
  switch (t) {
    case Target::recommendation:
      s.features = {F::medical_info_high, F::understandable, F::ocr_confidence, F::n_active_verbs_v,
                    F::readability_v, F::n_sentences_v, F::n_shots, F::shot_change_confidence,
                    F::n_summary_words_v, F::transcription_confidence, F::n_transition_words_v, F::n_words_v,
                    F::n_unique_words_v, F::has_title, F::has_description, F::has_tags,
                    F::n_unique_medical_terms, F::readability_m, F::n_sentences_m, F::n_words_m,
                    F::n_unique_words_m, F::n_transition_words_m, F::n_summary_words_m, F::n_active_verbs_m,
                    F::duration_s};
      break;
    case Target::medical_info:
      s.features = {F::has_title, F::has_description, F::has_tags, F::n_unique_medical_terms,
                    F::readability_m, F::n_sentences_m, F::n_words_m, F::n_unique_words_m,
                    F::n_transition_words_m, F::n_summary_words_m, F::n_active_verbs_m, F::duration_s,
                    F::n_transition_words_v, F::n_words_v, F::n_unique_words_v, F::n_active_verbs_v,
                    F::readability_v, F::n_sentences_v};
      break;
    case Target::understandability:
      s.features = {F::ocr_confidence, F::n_active_verbs_v, F::readability_v, F::n_sentences_v, F::n_shots,
                    F::shot_change_confidence, F::n_summary_words_v, F::transcription_confidence,
                    F::n_transition_words_v, F::n_words_v, F::n_unique_words_v};
      break;
  }
  return s;
}

std::optional<int> target_label(const FeatureVector& row, Target target) {
  auto as_label = [](double v) -> std::optional<int> {
    if (std::isnan(v)) return std::nullopt;
    return v >= 0.5 ? 1 : 0;
  };
  switch (target) {
    case Target::recommendation: return row.recommended;
    case Target::medical_info: return as_label(row[Feature::medical_info_high]);
    case Target::understandability: return as_label(row[Feature::understandable]);
  }
  return std::nullopt;
}

TextLexicons TextLexicons::load(const std::string& dir) {
  TextLexicons l;
  l.transition = Lexicon::load(dir + "/transition_words.txt", "transition");
  l.summary = Lexicon::load(dir + "/summary_words.txt", "summary");
  l.verbs = Lexicon::load(dir + "/active_verbs.txt", "active_verbs");
  return l;
}

std::string metadata_text(const VideoRecord& v) {
  if (blank(v.description)) return v.title;
  if (blank(v.title)) return v.description;
  // The title is its own sentence even without closing punctuation.
  std::string title = v.title;
  while (!title.empty() && std::isspace(static_cast<unsigned char>(title.back()))) title.pop_back();
  const char last = title.back();
  if (last != '.' && last != '!' && last != '?') title += '.';
  return title + "\n\n" + v.description;
}

VideoTextFeatures featurize_video(const VideoRecord& v, const TranscriptDoc* transcript, const TextLexicons& lex) {
  VideoTextFeatures out;
  if (transcript) out.video = extract_text_features(transcript->text(), lex.transition, lex.summary, lex.verbs);
  else out.video.readability_undefined = true;
  out.metadata = extract_text_features(metadata_text(v), lex.transition, lex.summary, lex.verbs);
  return out;
}

std::vector<FeatureVector> assemble_features(const CorpusStore& store,
                                             const std::map<std::string, VideoTextFeatures>& text_features,
                                             const std::map<std::string, std::size_t>& ner_counts,
                                             bool include_unlabeled) {
  for (const auto& [id, _] : store.labels())
    if (!store.videos().count(id)) throw ValidationError("labeled video '" + id + "' has no metadata record");

  std::vector<FeatureVector> rows;
  for (const auto& [id, video] : store.videos()) {
    const AnnotationLabels* lab = store.label(id);
    if (!lab && !include_unlabeled) continue;
    const auto tf = text_features.find(id);
    if (tf == text_features.end()) throw ValidationError("no text features for video '" + id + "'");

    FeatureVector r;
    r.video_id = id;
    using F = Feature;
    const TextFeatures& tv = tf->second.video;
    const TextFeatures& tm = tf->second.metadata;
    const OcrDoc* ocr = store.ocr_doc(id);
    const TranscriptDoc* tr = store.transcript(id);

    r[F::ocr_confidence] = ocr ? ocr->overall_confidence() : 0.0;
    r[F::n_shots] = ocr ? static_cast<double>(ocr->shot_count) : 0.0;
    r[F::shot_change_confidence] = ocr ? ocr->shot_change_confidence : 0.0;
    r[F::transcription_confidence] = tr ? tr->overall_confidence() : 0.0;
    r[F::n_active_verbs_v] = static_cast<double>(tv.active_verb_count);
    r[F::readability_v] = tv.readability_undefined ? 0.0 : tv.readability;
    r[F::n_sentences_v] = static_cast<double>(tv.sentence_count);
    r[F::n_summary_words_v] = static_cast<double>(tv.summary_word_count);
    r[F::n_transition_words_v] = static_cast<double>(tv.transition_word_count);
    r[F::n_words_v] = static_cast<double>(tv.word_count);
    r[F::n_unique_words_v] = static_cast<double>(tv.unique_word_count);

    r[F::has_title] = blank(video.title) ? 0.0 : 1.0;
    r[F::has_description] = blank(video.description) ? 0.0 : 1.0;
    r[F::has_tags] = video.tags.empty() ? 0.0 : 1.0;
    r[F::readability_m] = tm.readability_undefined ? 0.0 : tm.readability;
    r[F::n_sentences_m] = static_cast<double>(tm.sentence_count);
    r[F::n_words_m] = static_cast<double>(tm.word_count);
    r[F::n_unique_words_m] = static_cast<double>(tm.unique_word_count);
    r[F::n_transition_words_m] = static_cast<double>(tm.transition_word_count);
    r[F::n_summary_words_m] = static_cast<double>(tm.summary_word_count);
    r[F::n_active_verbs_m] = static_cast<double>(tm.active_verb_count);
    r[F::duration_s] = static_cast<double>(video.duration_s);

    const auto nc = ner_counts.find(id);
    r[F::n_unique_medical_terms] = nc == ner_counts.end() ? 0.0 : static_cast<double>(nc->second);

    if (lab) {
      r[F::medical_info_high] = lab->medical_info_high;
      r[F::understandable] = lab->understandable;
      r.recommended = lab->recommended;
    } else {
      r[F::medical_info_high] = kNaN;
      r[F::understandable] = kNaN;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "NA";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_feature_tsv(std::span<const FeatureVector> rows) {
  std::ostringstream out;
  out << "video_id";
  for (auto n : kNames) out << '\t' << n;
  out << "\trecommended\n";
  for (const auto& r : rows) {
    out << r.video_id;
    for (double v : r.values) out << '\t' << format_double(v);
    out << '\t' << (r.recommended ? std::to_string(*r.recommended) : "NA") << '\n';
  }
  return out.str();
}

std::vector<FeatureVector> parse_feature_tsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto tab = l.find('\t', start);
      cells.push_back(l.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return cells;
  };
  if (!std::getline(in, line)) throw SchemaError("feature table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() != kNumFeatures + 2 || header.front() != "video_id" || header.back() != "recommended")
    throw SchemaError("feature table header does not match the feature roster");
  std::array<std::size_t, kNumFeatures> column{};
  for (std::size_t c = 1; c <= kNumFeatures; ++c) {
    const auto f = feature_from_name(header[c]);
    if (!f) throw SchemaError("unknown feature column '" + header[c] + "'");
    column[static_cast<std::size_t>(*f)] = c;
  }

  std::vector<FeatureVector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = "feature table line " + std::to_string(line_no);
    if (cells.size() != header.size()) throw SchemaError(where + ": expected " + std::to_string(header.size()) + " cells");
    FeatureVector r;
    r.video_id = cells[0];
    if (r.video_id.empty()) throw SchemaError(where + ": empty video_id");
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const std::string& cell = cells[column[i]];
      if (cell == "NA") {
        r.values[i] = kNaN;
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw SchemaError(where + ": bad number '" + cell + "' in column " + std::string(kNames[i]));
      r.values[i] = v;
    }
    const std::string& rec = cells.back();
    if (rec == "1") r.recommended = 1;
    else if (rec == "0") r.recommended = 0;
    else if (rec != "NA") throw SchemaError(where + ": recommended must be 0, 1 or NA");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_feature_tsv(const std::string& path, std::span<const FeatureVector> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << format_feature_tsv(rows);
}

std::vector<FeatureVector> read_feature_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_feature_tsv(ss.str());
}

Eigen::MatrixXd design_matrix(std::span<const FeatureVector> rows, const FeatureSpec& spec) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(spec.features.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < spec.features.size(); ++j) {
      const double v = rows[i][spec.features[j]];
      if (!std::isfinite(v))
        throw ValidationError("video '" + rows[i].video_id + "' is missing feature " +
                              std::string(feature_name(spec.features[j])));
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  return X;
}

Scaler standardize_fit(const Eigen::MatrixXd& X, std::span<const Feature> features, std::vector<std::string>* warnings) {
  if (static_cast<std::size_t>(X.cols()) != features.size())
    throw ValidationError("scaler: column count does not match feature list");
  Scaler s;
  s.features.assign(features.begin(), features.end());
  s.mean.assign(features.size(), 0.0);
  s.sd.assign(features.size(), 1.0);
  const auto n = X.rows();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto f = features[static_cast<std::size_t>(j)];
    if (is_binary(f)) continue;
    const double m = n > 0 ? X.col(j).mean() : 0.0;
    const double var = n > 1 ? (X.col(j).array() - m).square().sum() / static_cast<double>(n - 1) : 0.0;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) {
      if (warnings)
        warnings->push_back("feature " + std::string(feature_name(f)) + " has zero variance; left unscaled");
      continue;
    }
    s.mean[static_cast<std::size_t>(j)] = m;
    s.sd[static_cast<std::size_t>(j)] = sd;
  }
  return s;
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != mean.size()) throw ValidationError("scaler: column count mismatch");
  Eigen::MatrixXd Z = X;
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    Z.col(j) = (Z.col(j).array() - mean[k]) / sd[k];
  }
  return Z;
}

Eigen::RowVectorXd Scaler::apply(const Eigen::RowVectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != mean.size()) throw ValidationError("scaler: column count mismatch");
  Eigen::RowVectorXd z = x;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    z[j] = (z[j] - mean[k]) / sd[k];
  }
  return z;
}

Eigen::MatrixXd standardize_apply(const Scaler& s, const Eigen::MatrixXd& X) { return s.apply(X); }

}  // namespace vtriage
