#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vtriage {

enum class Definition { sd, hd };

using Timestamp = std::chrono::sys_seconds;

/// One video's metadata as delivered by the video-data service.
struct VideoRecord {
  std::string video_id;
  std::string channel_id;
  std::optional<Timestamp> published_at;
  std::string title;
  std::string description;
  std::vector<std::string> tags;
  std::int64_t duration_s = 0;
  Definition definition = Definition::sd;
  bool caption_available = false;
  // Absent means "not reported", which is different from zero.
  std::optional<std::int64_t> view_count;
  std::optional<std::int64_t> like_count;
  std::optional<std::int64_t> dislike_count;
  std::optional<std::int64_t> comment_count;

  bool operator==(const VideoRecord&) const = default;
};

struct TranscriptSegment {
  std::string text;
  double confidence = 0.0;
  bool operator==(const TranscriptSegment&) const = default;
};

struct TranscriptDoc {
  std::string video_id;
  std::vector<TranscriptSegment> segments;

  /// Segment texts joined by single spaces.
  std::string text() const;
  /// Mean segment confidence weighted by segment word count; 0 when the
  /// transcript holds no words.
  double overall_confidence() const;
  bool operator==(const TranscriptDoc&) const = default;
};

struct OcrBlock {
  std::string text;
  double confidence = 0.0;
  double frame_time_s = 0.0;
  bool operator==(const OcrBlock&) const = default;
};

struct OcrDoc {
  std::string video_id;
  std::vector<OcrBlock> blocks;
  std::int64_t shot_count = 0;
  double shot_change_confidence = 0.0;

  /// Mean block confidence; 0 when no text was detected.
  double overall_confidence() const;
  bool operator==(const OcrDoc&) const = default;
};

struct AnnotationLabels {
  std::string video_id;
  int medical_info_high = 0;
  int understandable = 0;
  int recommended = 0;
  std::string annotator_id;
  bool operator==(const AnnotationLabels&) const = default;
};

struct LoadSummary {
  std::size_t videos = 0;
  std::size_t transcripts = 0;
  std::size_t ocr = 0;
  std::size_t label_rows = 0;
  std::size_t labeled_videos = 0;
  std::size_t skipped_lines = 0;  // blank lines
  std::vector<std::string> warnings;

  /// "5 videos, 5 transcripts, 5 ocr, 15 labels"
  std::string to_string() const;
};

/// Immutable, referentially consistent collection of corpus documents.
class CorpusStore {
 public:
  const std::map<std::string, VideoRecord>& videos() const { return videos_; }
  const std::map<std::string, TranscriptDoc>& transcripts() const { return transcripts_; }
  const std::map<std::string, OcrDoc>& ocr() const { return ocr_; }
  const std::map<std::string, AnnotationLabels>& labels() const { return labels_; }
  const LoadSummary& summary() const { return summary_; }

  const TranscriptDoc* transcript(const std::string& id) const;
  const OcrDoc* ocr_doc(const std::string& id) const;
  const AnnotationLabels* label(const std::string& id) const;

  /// Validates referential integrity and consolidates per-annotator labels.
  /// Throws SchemaError on duplicates or dangling ids.
  static CorpusStore build(std::vector<VideoRecord> videos,
                           std::vector<TranscriptDoc> transcripts,
                           std::vector<OcrDoc> ocr,
                           std::vector<AnnotationLabels> label_rows);

 private:
  friend CorpusStore load_corpus(const std::string&, const std::string&, const std::string&, const std::string&);

  std::map<std::string, VideoRecord> videos_;
  std::map<std::string, TranscriptDoc> transcripts_;
  std::map<std::string, OcrDoc> ocr_;
  std::map<std::string, AnnotationLabels> labels_;
  LoadSummary summary_;
};

/// Unique ids in first-appearance order.
std::vector<std::string> dedupe_ids(std::span<const std::string> ids);

/// Parses one metadata object. Duration may be integer seconds or an
/// ISO-8601 duration ("PT3M28S").
VideoRecord parse_video_metadata(std::string_view json_text);
std::string serialize_video_metadata(const VideoRecord& v);

TranscriptDoc parse_transcript(std::string_view json_text);
std::string serialize_transcript(const TranscriptDoc& t);
OcrDoc parse_ocr(std::string_view json_text);
std::string serialize_ocr(const OcrDoc& o);
AnnotationLabels parse_labels(std::string_view json_text);
std::string serialize_labels(const AnnotationLabels& l);

/// "PT1H2M3S", "P1DT2H" and friends to seconds.
std::int64_t parse_iso8601_duration(std::string_view text);
Timestamp parse_utc_timestamp(std::string_view text);
std::string format_utc_timestamp(Timestamp t);

/// Majority vote per field; an even split resolves to 0.
AnnotationLabels consolidate_labels(std::span<const AnnotationLabels> per_annotator);

/// Reads one JSON Lines file into raw object strings (blank lines skipped).
/// A file whose first non-blank line opens a JSON array is rejected.
std::vector<std::string> read_json_lines(const std::string& path, std::size_t* blank_lines = nullptr);

CorpusStore load_corpus(const std::string& metadata_path, const std::string& transcript_path,
                        const std::string& ocr_path, const std::string& labels_path);

/// Flattens a raw `videos.list`-style response ({"items":[{"id", "snippet",
/// "contentDetails", "statistics"}]}) into records.
std::vector<VideoRecord> flatten_api_response(std::string_view json_text);

/// Search-result validation against the shipped keyword list.
struct SearchResult {
  std::string keyword;
  std::string video_id;
};
struct SearchSummary {
  std::size_t keywords_used = 0;
  std::size_t ids_collected = 0;
  std::size_t unique_ids = 0;
  std::vector<std::string> unique;
};
std::vector<std::string> load_keywords(const std::string& path);
/// Throws SchemaError if a result names a keyword outside `keywords`.
SearchSummary validate_search_results(std::span<const SearchResult> results,
                                      std::span<const std::string> keywords);
std::vector<SearchResult> load_search_results(const std::string& path);

}  // namespace vtriage
