#include "vtriage/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "vtriage/error.hpp"

namespace vtriage {

using nlohmann::json;

namespace {

json parse_object(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  return j;
}

std::string require_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw SchemaError(std::string("missing required field '") + key + "'");
  if (!it->is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
  std::string s = it->get<std::string>();
  if (s.empty()) throw SchemaError(std::string("field '") + key + "' must be non-empty");
  return s;
}

std::string opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::int64_t to_count(const json& v, const char* key) {
  std::int64_t n = 0;
  if (v.is_number_integer()) {
    n = v.get<std::int64_t>();
  } else if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d != static_cast<double>(static_cast<std::int64_t>(d)))
      throw SchemaError(std::string("field '") + key + "' must be an integer");
    n = static_cast<std::int64_t>(d);
  } else if (v.is_string()) {
    // The upstream service reports statistics as decimal strings.
    const auto& s = v.get_ref<const std::string&>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw SchemaError(std::string("field '") + key + "' is not an integer: " + s);
  } else {
    throw SchemaError(std::string("field '") + key + "' must be an integer");
  }
  if (n < 0) throw SchemaError(std::string("field '") + key + "' must be non-negative");
  return n;
}

std::optional<std::int64_t> opt_count(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return to_count(*it, key);
}

double unit_interval(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw SchemaError(std::string("missing required field '") + key + "'");
  if (!it->is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0)) throw SchemaError(std::string("field '") + key + "' must lie in [0,1]");
  return v;
}

int binary_label(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw SchemaError(std::string("missing required field '") + key + "'");
  int v;
  if (it->is_boolean()) {
    v = it->get<bool>() ? 1 : 0;
  } else if (it->is_number_integer()) {
    v = it->get<int>();
  } else {
    throw SchemaError(std::string("field '") + key + "' must be 0 or 1");
  }
  if (v != 0 && v != 1) throw SchemaError(std::string("field '") + key + "' must be 0 or 1");
  return v;
}

bool parse_bool_like(const json& v, const char* key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "true") return true;
    if (s == "false") return false;
  }
  throw SchemaError(std::string("field '") + key + "' must be a boolean");
}

Definition parse_definition(const std::string& s) {
  if (s == "sd" || s.empty()) return Definition::sd;
  if (s == "hd") return Definition::hd;
  throw SchemaError("field 'definition' must be 'sd' or 'hd', got '" + s + "'");
}

std::size_t whitespace_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

int parse_fixed(std::string_view s, std::size_t pos, std::size_t len) {
  int v = 0;
  if (pos + len > s.size()) throw SchemaError("malformed timestamp: " + std::string(s));
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc() || ptr != s.data() + pos + len) throw SchemaError("malformed timestamp: " + std::string(s));
  return v;
}

}  // namespace

std::string LoadSummary::to_string() const {
  std::ostringstream os;
  os << videos << " videos, " << transcripts << " transcripts, " << ocr << " ocr, " << label_rows << " labels";
  return os.str();
}

std::string TranscriptDoc::text() const {
  std::string out;
  for (const auto& s : segments) {
    if (!out.empty() && !s.text.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

double TranscriptDoc::overall_confidence() const {
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : segments) {
    const auto w = static_cast<double>(whitespace_words(s.text));
    num += w * s.confidence;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double OcrDoc::overall_confidence() const {
  if (blocks.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& b : blocks) sum += b.confidence;
  return sum / static_cast<double>(blocks.size());
}

std::vector<std::string> dedupe_ids(std::span<const std::string> ids) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& id : ids)
    if (seen.insert(id).second) out.push_back(id);
  return out;
}

std::int64_t parse_iso8601_duration(std::string_view text) {
  auto fail = [&] { return SchemaError("malformed ISO-8601 duration: '" + std::string(text) + "'"); };
  if (text.size() < 2 || text[0] != 'P') throw fail();
  std::int64_t total = 0;
  bool in_time = false;
  bool any = false;
  std::size_t i = 1;
  while (i < text.size()) {
    if (text[i] == 'T') {
      if (in_time) throw fail();
      in_time = true;
      ++i;
      continue;
    }
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), n);
    if (ec != std::errc() || ptr == text.data() + text.size()) throw fail();
    i = static_cast<std::size_t>(ptr - text.data());
    const char unit = text[i++];
    std::int64_t scale = 0;
    if (!in_time && unit == 'W') scale = 7 * 86400;
    else if (!in_time && unit == 'D') scale = 86400;
    else if (in_time && unit == 'H') scale = 3600;
    else if (in_time && unit == 'M') scale = 60;
    else if (in_time && unit == 'S') scale = 1;
    else throw fail();
    total += n * scale;
    any = true;
  }
  if (!any) throw fail();
  return total;
}

Timestamp parse_utc_timestamp(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':')
    throw SchemaError("malformed timestamp: " + std::string(s));
  const int y = parse_fixed(s, 0, 4), mo = parse_fixed(s, 5, 2), d = parse_fixed(s, 8, 2);
  const int h = parse_fixed(s, 11, 2), mi = parse_fixed(s, 14, 2), se = parse_fixed(s, 17, 2);
  std::size_t i = 19;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
  }
  const std::string_view zone = s.substr(i);
  if (!(zone == "Z" || zone == "+00:00" || zone.empty())) throw SchemaError("timestamp must be UTC: " + std::string(s));
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || se > 60) throw SchemaError("invalid timestamp: " + std::string(s));
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

std::string format_utc_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const auto tod = t - day_point;
  const auto secs = tod.count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

VideoRecord parse_video_metadata(std::string_view json_text) {
  const json j = parse_object(json_text);
  VideoRecord v;
  v.video_id = require_string(j, "video_id");
  v.channel_id = opt_string(j, "channel_id");
  if (auto p = opt_string(j, "published_at"); !p.empty()) v.published_at = parse_utc_timestamp(p);
  v.title = opt_string(j, "title");
  v.description = opt_string(j, "description");
  if (auto it = j.find("tags"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field 'tags' must be an array of strings");
    for (const auto& t : *it) {
      if (!t.is_string()) throw SchemaError("field 'tags' must be an array of strings");
      v.tags.push_back(t.get<std::string>());
    }
  }
  if (auto it = j.find("duration_s"); it != j.end() && !it->is_null()) {
    v.duration_s = it->is_string() && !it->get_ref<const std::string&>().empty() &&
                           it->get_ref<const std::string&>()[0] == 'P'
                       ? parse_iso8601_duration(it->get<std::string>())
                       : to_count(*it, "duration_s");
  } else if (auto it2 = j.find("duration"); it2 != j.end() && !it2->is_null()) {
    v.duration_s = it2->is_string() ? parse_iso8601_duration(it2->get<std::string>()) : to_count(*it2, "duration");
  }
  v.definition = parse_definition(opt_string(j, "definition"));
  if (auto it = j.find("caption_available"); it != j.end() && !it->is_null())
    v.caption_available = parse_bool_like(*it, "caption_available");
  v.view_count = opt_count(j, "view_count");
  v.like_count = opt_count(j, "like_count");
  v.dislike_count = opt_count(j, "dislike_count");
  v.comment_count = opt_count(j, "comment_count");
  return v;
}

std::string serialize_video_metadata(const VideoRecord& v) {
  json j;
  j["video_id"] = v.video_id;
  j["channel_id"] = v.channel_id;
  if (v.published_at) j["published_at"] = format_utc_timestamp(*v.published_at);
  j["title"] = v.title;
  j["description"] = v.description;
  j["tags"] = v.tags;
  j["duration_s"] = v.duration_s;
  j["definition"] = v.definition == Definition::hd ? "hd" : "sd";
  j["caption_available"] = v.caption_available;
  auto put = [&](const char* k, const std::optional<std::int64_t>& c) {
    if (c) j[k] = *c;
  };
  put("view_count", v.view_count);
  put("like_count", v.like_count);
  put("dislike_count", v.dislike_count);
  put("comment_count", v.comment_count);
  return j.dump();
}

TranscriptDoc parse_transcript(std::string_view json_text) {
  const json j = parse_object(json_text);
  TranscriptDoc t;
  t.video_id = require_string(j, "video_id");
  if (auto it = j.find("segments"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field 'segments' must be an array");
    for (const auto& s : *it) {
      if (!s.is_object()) throw SchemaError("transcript segment must be an object");
      t.segments.push_back({opt_string(s, "text"), unit_interval(s, "confidence")});
    }
  }
  return t;
}

std::string serialize_transcript(const TranscriptDoc& t) {
  json j;
  j["video_id"] = t.video_id;
  j["segments"] = json::array();
  for (const auto& s : t.segments) j["segments"].push_back({{"text", s.text}, {"confidence", s.confidence}});
  return j.dump();
}

OcrDoc parse_ocr(std::string_view json_text) {
  const json j = parse_object(json_text);
  OcrDoc o;
  o.video_id = require_string(j, "video_id");
  if (auto it = j.find("blocks"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw SchemaError("field 'blocks' must be an array");
    for (const auto& b : *it) {
      if (!b.is_object()) throw SchemaError("OCR block must be an object");
      OcrBlock blk{opt_string(b, "text"), unit_interval(b, "confidence"), 0.0};
      if (auto ft = b.find("frame_time_s"); ft != b.end() && !ft->is_null()) {
        if (!ft->is_number() || ft->get<double>() < 0.0)
          throw SchemaError("field 'frame_time_s' must be a non-negative number");
        blk.frame_time_s = ft->get<double>();
      }
      o.blocks.push_back(std::move(blk));
    }
  }
  o.shot_count = opt_count(j, "shot_count").value_or(0);
  if (j.contains("shot_change_confidence") && !j["shot_change_confidence"].is_null())
    o.shot_change_confidence = unit_interval(j, "shot_change_confidence");
  return o;
}

std::string serialize_ocr(const OcrDoc& o) {
  json j;
  j["video_id"] = o.video_id;
  j["blocks"] = json::array();
  for (const auto& b : o.blocks)
    j["blocks"].push_back({{"text", b.text}, {"confidence", b.confidence}, {"frame_time_s", b.frame_time_s}});
  j["shot_count"] = o.shot_count;
  j["shot_change_confidence"] = o.shot_change_confidence;
  return j.dump();
}

AnnotationLabels parse_labels(std::string_view json_text) {
  const json j = parse_object(json_text);
  AnnotationLabels l;
  l.video_id = require_string(j, "video_id");
  l.medical_info_high = binary_label(j, "medical_info_high");
  l.understandable = binary_label(j, "understandable");
  l.recommended = binary_label(j, "recommended");
  l.annotator_id = opt_string(j, "annotator_id");
  return l;
}

std::string serialize_labels(const AnnotationLabels& l) {
  json j;
  j["video_id"] = l.video_id;
  j["medical_info_high"] = l.medical_info_high;
  j["understandable"] = l.understandable;
  j["recommended"] = l.recommended;
  j["annotator_id"] = l.annotator_id;
  return j.dump();
}

AnnotationLabels consolidate_labels(std::span<const AnnotationLabels> per_annotator) {
  if (per_annotator.empty()) throw ValidationError("consolidate_labels: no annotations");
  const std::string& id = per_annotator.front().video_id;
  int med = 0, und = 0, rec = 0;
  for (const auto& a : per_annotator) {
    if (a.video_id != id)
      throw ValidationError("consolidate_labels: mixed video ids '" + id + "' and '" + a.video_id + "'");
    med += a.medical_info_high;
    und += a.understandable;
    rec += a.recommended;
  }
  const int n = static_cast<int>(per_annotator.size());
  // Strict majority; ties go to 0.
  auto vote = [n](int ones) { return 2 * ones > n ? 1 : 0; };
  return AnnotationLabels{id, vote(med), vote(und), vote(rec), "consensus"};
}

const TranscriptDoc* CorpusStore::transcript(const std::string& id) const {
  auto it = transcripts_.find(id);
  return it == transcripts_.end() ? nullptr : &it->second;
}
const OcrDoc* CorpusStore::ocr_doc(const std::string& id) const {
  auto it = ocr_.find(id);
  return it == ocr_.end() ? nullptr : &it->second;
}
const AnnotationLabels* CorpusStore::label(const std::string& id) const {
  auto it = labels_.find(id);
  return it == labels_.end() ? nullptr : &it->second;
}

CorpusStore CorpusStore::build(std::vector<VideoRecord> videos, std::vector<TranscriptDoc> transcripts,
                               std::vector<OcrDoc> ocr, std::vector<AnnotationLabels> label_rows) {
  CorpusStore store;
  std::vector<std::string> duplicates;
  for (auto& v : videos) {
    std::string id = v.video_id;
    if (!store.videos_.emplace(id, std::move(v)).second) duplicates.push_back(id);
  }
  auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
    return s;
  };
  if (!duplicates.empty()) throw SchemaError("duplicate video_id in metadata: " + join(duplicates));

  std::set<std::string> dangling;
  auto known = [&](const std::string& id) {
    if (store.videos_.count(id)) return true;
    dangling.insert(id);
    return false;
  };
  for (const auto& t : transcripts) known(t.video_id);
  for (const auto& o : ocr) known(o.video_id);
  for (const auto& l : label_rows) known(l.video_id);
  if (!dangling.empty())
    throw SchemaError("unknown video_id referenced by transcript/ocr/labels: " +
                      join({dangling.begin(), dangling.end()}));

  for (auto& t : transcripts) {
    std::string id = t.video_id;
    if (!store.transcripts_.emplace(id, std::move(t)).second) duplicates.push_back(id);
  }
  if (!duplicates.empty()) throw SchemaError("duplicate transcript for video_id: " + join(duplicates));
  for (auto& o : ocr) {
    std::string id = o.video_id;
    if (!store.ocr_.emplace(id, std::move(o)).second) duplicates.push_back(id);
  }
  if (!duplicates.empty()) throw SchemaError("duplicate OCR document for video_id: " + join(duplicates));

  std::map<std::string, std::vector<AnnotationLabels>> grouped;
  for (auto& l : label_rows) grouped[l.video_id].push_back(std::move(l));
  for (const auto& [id, rows] : grouped) store.labels_.emplace(id, consolidate_labels(rows));

  store.summary_.videos = store.videos_.size();
  store.summary_.transcripts = store.transcripts_.size();
  store.summary_.ocr = store.ocr_.size();
  store.summary_.label_rows = label_rows.size();
  store.summary_.labeled_videos = store.labels_.size();
  if (store.labels_.empty()) store.summary_.warnings.push_back("labels file is empty: no video is annotated");
  return store;
}

std::vector<std::string> read_json_lines(const std::string& path, std::size_t* blank_lines) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  std::vector<std::string> out;
  std::string line;
  std::size_t offset = 0;
  std::size_t blanks = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      ++blanks;
      continue;
    }
    if (line[first] == '[')
      throw ParseError(path + ": expected JSON Lines (one object per line), found a JSON array", line_start + first);
    if (line[first] != '{')
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected a JSON object", line_start + first);
    out.push_back(std::move(line));
  }
  if (blank_lines) *blank_lines += blanks;
  return out;
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_lines(const std::string& path, const std::vector<std::string>& lines, Parse parse) {
  std::vector<T> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(parse(lines[i]));
    } catch (const ParseError& e) {
      throw ParseError(path + " record " + std::to_string(i + 1) + ": " + e.what(), e.byte_offset());
    } catch (const SchemaError& e) {
      throw SchemaError(path + " record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

CorpusStore load_corpus(const std::string& metadata_path, const std::string& transcript_path,
                        const std::string& ocr_path, const std::string& labels_path) {
  std::size_t blanks[4] = {0, 0, 0, 0};
  // Files are independent until the integrity check, so parse them concurrently.
  auto fv = std::async(std::launch::async, [&] {
    return parse_lines<VideoRecord>(metadata_path, read_json_lines(metadata_path, &blanks[0]), parse_video_metadata);
  });
  auto ft = std::async(std::launch::async, [&] {
    return parse_lines<TranscriptDoc>(transcript_path, read_json_lines(transcript_path, &blanks[1]), parse_transcript);
  });
  auto fo = std::async(std::launch::async, [&] {
    return parse_lines<OcrDoc>(ocr_path, read_json_lines(ocr_path, &blanks[2]), parse_ocr);
  });
  auto fl = std::async(std::launch::async, [&] {
    return parse_lines<AnnotationLabels>(labels_path, read_json_lines(labels_path, &blanks[3]), parse_labels);
  });
  // get() in a fixed order so the first reported error is deterministic.
  auto videos = fv.get();
  auto transcripts = ft.get();
  auto ocr = fo.get();
  auto labels = fl.get();
  CorpusStore store = CorpusStore::build(std::move(videos), std::move(transcripts), std::move(ocr), std::move(labels));
  store.summary_.skipped_lines = blanks[0] + blanks[1] + blanks[2] + blanks[3];
  return store;
}

std::vector<VideoRecord> flatten_api_response(std::string_view json_text) {
  const json j = parse_object(json_text);
  auto items = j.find("items");
  if (items == j.end() || !items->is_array()) throw SchemaError("API response has no 'items' array");
  std::vector<VideoRecord> out;
  for (const auto& item : *items) {
    if (!item.is_object()) throw SchemaError("API item must be an object");
    VideoRecord v;
    if (auto id = item.find("id"); id != item.end() && id->is_object())
      v.video_id = require_string(*id, "videoId");
    else
      v.video_id = require_string(item, "id");
    const json empty = json::object();
    const json& snippet = item.contains("snippet") ? item["snippet"] : empty;
    const json& details = item.contains("contentDetails") ? item["contentDetails"] : empty;
    const json& stats = item.contains("statistics") ? item["statistics"] : empty;
    v.channel_id = opt_string(snippet, "channelId");
    if (auto p = opt_string(snippet, "publishedAt"); !p.empty()) v.published_at = parse_utc_timestamp(p);
    v.title = opt_string(snippet, "title");
    v.description = opt_string(snippet, "description");
    if (auto t = snippet.find("tags"); t != snippet.end() && t->is_array())
      for (const auto& tag : *t) v.tags.push_back(tag.get<std::string>());
    if (auto d = opt_string(details, "duration"); !d.empty()) v.duration_s = parse_iso8601_duration(d);
    v.definition = parse_definition(opt_string(details, "definition"));
    if (auto c = details.find("caption"); c != details.end() && !c->is_null())
      v.caption_available = parse_bool_like(*c, "caption");
    v.view_count = opt_count(stats, "viewCount");
    v.like_count = opt_count(stats, "likeCount");
    v.dislike_count = opt_count(stats, "dislikeCount");
    v.comment_count = opt_count(stats, "commentCount");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> load_keywords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open keyword list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

std::vector<SearchResult> load_search_results(const std::string& path) {
  std::vector<SearchResult> out;
  for (const auto& line : read_json_lines(path)) {
    const json j = parse_object(line);
    out.push_back({require_string(j, "keyword"), require_string(j, "video_id")});
  }
  return out;
}

SearchSummary validate_search_results(std::span<const SearchResult> results, std::span<const std::string> keywords) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  std::set<std::string> allowed;
  for (const auto& k : keywords) allowed.insert(lower(k));
  std::set<std::string> used;
  std::vector<std::string> ids;
  for (const auto& r : results) {
    const std::string k = lower(r.keyword);
    if (!allowed.count(k)) throw SchemaError("search result uses a keyword outside the keyword list: '" + r.keyword + "'");
    used.insert(k);
    ids.push_back(r.video_id);
  }
  SearchSummary s;
  s.keywords_used = used.size();
  s.ids_collected = ids.size();
  s.unique = dedupe_ids(ids);
  s.unique_ids = s.unique.size();
  return s;
}

}  // namespace vtriage
