#include "vtriage/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vtriage/clf_metrics.hpp"
#include "vtriage/corpus.hpp"
#include "vtriage/error.hpp"
#include "vtriage/features.hpp"
#include "vtriage/logreg.hpp"
#include "vtriage/synth.hpp"
#include "vtriage/tagger.hpp"
#include "vtriage/textfeat.hpp"

namespace vtriage {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
    throw ValidationError("'" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ValidationError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

int parse_small_int(const std::string& key, const std::string& v) {
  const auto x = parse_int(key, v);
  if (x < -1000000000 || x > 1000000000) throw ValidationError("'" + key + "' is out of range");
  return static_cast<int>(x);
}

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw IoError("missing " + what + ": " + path);
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cells.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return cells;
    start = tab + 1;
  }
}

// A header line plus data rows, each as column -> value.
std::vector<std::map<std::string, std::string>> read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path + ": empty table");
  const auto header = split_tabs(line);
  std::vector<std::map<std::string, std::string>> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != header.size()) throw SchemaError(path + " line " + std::to_string(n) + ": wrong cell count");
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double cell(const std::map<std::string, std::string>& row, const std::string& key, const std::string& path) {
  const auto it = row.find(key);
  if (it == row.end()) throw SchemaError(path + ": missing column " + key);
  return parse_real(key, it->second);
}

constexpr std::array<const char*, 8> kTextFeatureColumns = {
    "word_count",        "unique_word_count",  "sentence_count", "transition_word_count",
    "summary_word_count", "active_verb_count", "readability",    "readability_undefined",
};

void append_text_features(std::ostringstream& out, const TextFeatures& f) {
  out << '\t' << f.word_count << '\t' << f.unique_word_count << '\t' << f.sentence_count << '\t'
      << f.transition_word_count << '\t' << f.summary_word_count << '\t' << f.active_verb_count << '\t'
      << format_double(f.readability) << '\t' << (f.readability_undefined ? 1 : 0);
}

TextFeatures text_features_from(const std::map<std::string, std::string>& row, const std::string& prefix,
                                const std::string& path) {
  auto count = [&](const char* name) {
    const double v = cell(row, prefix + name, path);
    if (v < 0 || v != std::floor(v)) throw SchemaError(path + ": " + prefix + name + " must be a count");
    return static_cast<std::size_t>(v);
  };
  TextFeatures f;
  f.word_count = count("word_count");
  f.unique_word_count = count("unique_word_count");
  f.sentence_count = count("sentence_count");
  f.transition_word_count = count("transition_word_count");
  f.summary_word_count = count("summary_word_count");
  f.active_verb_count = count("active_verb_count");
  f.readability = cell(row, prefix + "readability", path);
  f.readability_undefined = cell(row, prefix + "readability_undefined", path) != 0.0;
  return f;
}

std::vector<TaggedDocument> metadata_documents(const CorpusStore& store) {
  std::vector<TaggedDocument> docs;
  for (const auto& [id, v] : store.videos()) {
    TaggedDocument d;
    d.doc_id = id;
    for (auto& toks : tokenize(metadata_text(v)).sentence_tokens())
      d.sentences.push_back({std::move(toks), {}});
    docs.push_back(std::move(d));
  }
  return docs;
}

const std::array<Target, 3> kTargets = {Target::recommendation, Target::medical_info, Target::understandability};

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "seed") {
    const auto s = parse_int(key, value);
    if (s < 0) throw ValidationError("seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "work_dir") work_dir = value;
  else if (key == "corpus_dir") corpus_dir = value;
  else if (key == "videos") videos_path = value;
  else if (key == "transcripts") transcripts_path = value;
  else if (key == "ocr") ocr_path = value;
  else if (key == "labels") labels_path = value;
  else if (key == "dictionary") dictionary_path = value;
  else if (key == "data_dir") data_dir = value;
  else if (key == "split_fraction") split_fraction = parse_real(key, value);
  else if (key == "clf_l2") clf_l2 = parse_real(key, value);
  else if (key == "projection") {
    if (value == "phrase") projection = ProjectionMode::phrase;
    else if (value == "word") projection = ProjectionMode::word;
    else throw ValidationError("projection must be phrase or word");
  } else if (key == "tagger.epochs") tagger.epochs = parse_small_int(key, value);
  else if (key == "tagger.learning_rate") tagger.learning_rate = parse_real(key, value);
  else if (key == "tagger.l2") tagger.l2 = parse_real(key, value);
  else if (key == "tagger.batch_size") tagger.batch_size = parse_small_int(key, value);
  else if (key == "tagger.d_emb") tagger.d_emb = parse_small_int(key, value);
  else if (key == "tagger.d_hid") tagger.d_hid = parse_small_int(key, value);
  else if (key == "tagger.clip_norm") tagger.clip_norm = parse_real(key, value);
  else if (key == "tagger.patience") tagger.patience = parse_small_int(key, value);
  else if (key == "tagger.dev_fraction") tagger.dev_fraction = parse_real(key, value);
  else if (key == "tagger.min_count") tagger.min_count = parse_small_int(key, value);
  else if (key == "tagger.optimizer") tagger.optimizer = parse_optimizer(value);
  else throw ValidationError("unknown setting '" + key + "'");
}

void PipelineConfig::load_file(const std::string& path) {
  require_file(path, "config file");
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), e.byte);
  }
  if (!j.is_object()) throw SchemaError(path + ": config must be a JSON object");
  auto scalar = [&](const std::string& key, const json& v) {
    if (v.is_string()) set(key, v.get<std::string>());
    else if (v.is_number_integer() || v.is_number_unsigned()) set(key, std::to_string(v.get<std::int64_t>()));
    else if (v.is_number_float()) set(key, format_double(v.get<double>()));
    else throw SchemaError(path + ": setting '" + key + "' must be a string or number");
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "tagger" && v.is_object()) {
      for (const auto& [k2, v2] : v.items()) scalar("tagger." + k2, v2);
    } else {
      scalar(key, v);
    }
  }
}

void PipelineConfig::validate() const {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ValidationError("split_fraction must lie in (0, 1)");
  if (work_dir.empty()) throw ValidationError("work_dir must not be empty");
}

const std::vector<std::string>& Pipeline::commands() {
  static const std::vector<std::string> names = {
      "ingest",   "featurize", "build-ner-corpus", "train-tagger", "tag",       "assemble", "train-clf",
      "classify", "eval",      "eval-tagger",      "eval-clf",     "report",    "synth",
  };
  return names;
}

bool Pipeline::is_command(const std::string& name) {
  const auto& c = commands();
  return std::find(c.begin(), c.end(), name) != c.end();
}

std::string Pipeline::option(const std::string& key, const std::string& fallback) const {
  const auto it = options_.find(key);
  return it == options_.end() || it->second.empty() ? fallback : it->second;
}

bool Pipeline::flag(const std::string& key) const {
  const auto v = option(key);
  return v == "1" || v == "true" || v == "yes";
}

std::string Pipeline::work(const std::string& name) const { return (fs::path(config_.work_dir) / name).string(); }

std::uint64_t Pipeline::require_seed(const std::string& command) const {
  if (!config_.seed) throw ValidationError(command + " requires --seed");
  return *config_.seed;
}

std::string Pipeline::run(const std::string& command) {
  warnings_.clear();
  config_.validate();
  if (command == "ingest") return ingest();
  if (command == "featurize") return featurize();
  if (command == "build-ner-corpus") return build_ner_corpus();
  if (command == "train-tagger") return train_tagger_cmd();
  if (command == "tag") return tag();
  if (command == "assemble") return assemble();
  if (command == "train-clf") return train_clf();
  if (command == "classify") return classify();
  if (command == "eval") return eval_all();
  if (command == "eval-tagger") return eval_tagger_cmd();
  if (command == "eval-clf") return eval_clf();
  if (command == "report") return report();
  if (command == "synth") return synth();
  throw Error("unknown command '" + command + "'");
}

namespace {

CorpusStore load_work_corpus(const std::string& dir) {
  for (const char* f : {"videos.jsonl", "transcripts.jsonl", "ocr.jsonl", "labels.jsonl"})
    require_file(dir + "/" + f, "ingested corpus file (run ingest first)");
  return load_corpus(dir + "/videos.jsonl", dir + "/transcripts.jsonl", dir + "/ocr.jsonl", dir + "/labels.jsonl");
}

}  // namespace

std::string Pipeline::ingest() {
  auto path_for = [&](const std::string& explicit_path, const char* name) {
    if (!explicit_path.empty()) return explicit_path;
    if (config_.corpus_dir.empty()) throw ValidationError("ingest needs --corpus-dir or explicit corpus file paths");
    return (fs::path(config_.corpus_dir) / name).string();
  };
  const auto videos = path_for(config_.videos_path, "videos.jsonl");
  const auto transcripts = path_for(config_.transcripts_path, "transcripts.jsonl");
  const auto ocr = path_for(config_.ocr_path, "ocr.jsonl");
  const auto labels = path_for(config_.labels_path, "labels.jsonl");
  for (const auto& p : {videos, transcripts, ocr, labels}) require_file(p, "input file");

  const CorpusStore store = load_corpus(videos, transcripts, ocr, labels);
  for (const auto& w : store.summary().warnings) warnings_.push_back(w);

  std::ostringstream v, t, o, l;
  for (const auto& [_, rec] : store.videos()) v << serialize_video_metadata(rec) << '\n';
  for (const auto& [_, doc] : store.transcripts()) t << serialize_transcript(doc) << '\n';
  for (const auto& [_, doc] : store.ocr()) o << serialize_ocr(doc) << '\n';
  for (const auto& [_, lab] : store.labels()) l << serialize_labels(lab) << '\n';
  write_text(work("corpus/videos.jsonl"), v.str());
  write_text(work("corpus/transcripts.jsonl"), t.str());
  write_text(work("corpus/ocr.jsonl"), o.str());
  write_text(work("corpus/labels.jsonl"), l.str());

  std::string summary = store.summary().to_string();
  const auto results = option("search_results");
  if (!results.empty()) {
    const auto kw_path = option("keywords", (fs::path(config_.data_dir) / "keywords.txt").string());
    require_file(kw_path, "keyword list");
    require_file(results, "search results");
    const auto keywords = load_keywords(kw_path);
    const auto found = load_search_results(results);
    const auto s = validate_search_results(found, keywords);
    std::ostringstream ids;
    for (const auto& id : s.unique) ids << id << '\n';
    write_text(work("corpus/search_ids.txt"), ids.str());
    summary += "; " + std::to_string(s.ids_collected) + " search results, " + std::to_string(s.unique_ids) +
               " unique ids over " + std::to_string(s.keywords_used) + " keywords";
  }
  return summary;
}

std::string Pipeline::featurize() {
  const CorpusStore store = load_work_corpus(work("corpus"));
  const TextLexicons lex = TextLexicons::load(config_.data_dir);
  std::ostringstream out;
  out << "video_id";
  for (const char* scope : {"v_", "m_"})
    for (const char* c : kTextFeatureColumns) out << '\t' << scope << c;
  out << '\n';
  for (const auto& [id, video] : store.videos()) {
    const VideoTextFeatures f = featurize_video(video, store.transcript(id), lex);
    out << id;
    append_text_features(out, f.video);
    append_text_features(out, f.metadata);
    out << '\n';
  }
  write_text(work("text_features.tsv"), out.str());
  return "featurized " + std::to_string(store.videos().size()) + " videos";
}

std::string Pipeline::build_ner_corpus() {
  const CorpusStore store = load_work_corpus(work("corpus"));
  std::string dict_path = config_.dictionary_path;
  if (dict_path.empty() && !config_.corpus_dir.empty() && fs::exists(fs::path(config_.corpus_dir) / "dictionary.tsv"))
    dict_path = (fs::path(config_.corpus_dir) / "dictionary.tsv").string();
  if (dict_path.empty()) dict_path = (fs::path(config_.data_dir) / "dictionary.tsv").string();
  require_file(dict_path, "term dictionary");
  const auto stop_path = (fs::path(config_.data_dir) / "stopwords.txt").string();
  require_file(stop_path, "stopword list");
  const auto stopwords = load_stopwords(stop_path);
  const auto& all = all_semantic_types();
  DictionaryLoadReport report;
  const TermDictionary dict = load_dictionary(dict_path, std::set<SemanticType>(all.begin(), all.end()), stopwords, &report);
  for (const auto& w : report.warnings) warnings_.push_back(w);

  auto docs = metadata_documents(store);
  std::size_t sentences = 0, entity_tokens = 0;
  for (auto& d : docs)
    for (auto& s : d.sentences) {
      s = project_sentence(dict, s.tokens, config_.projection);
      ++sentences;
      entity_tokens += static_cast<std::size_t>(std::count_if(s.labels.begin(), s.labels.end(),
                                                              [](BioTag t) { return t != BioTag::O; }));
    }
  fs::create_directories(work("ner"));
  write_conll(work("ner/corpus.conll"), docs);
  return std::to_string(docs.size()) + " documents, " + std::to_string(sentences) + " sentences, " +
         std::to_string(entity_tokens) + " medical tokens";
}

std::string Pipeline::train_tagger_cmd() {
  TrainConfig cfg = config_.tagger;
  cfg.seed = require_seed("train-tagger");
  const auto arch_name = option("arch");
  if (arch_name.empty()) throw ValidationError("train-tagger requires --arch blstm|crf");
  const TaggerArch arch = parse_tagger_arch(arch_name);
  const auto corpus = work("ner/corpus.conll");
  require_file(corpus, "NER corpus (run build-ner-corpus first)");
  const auto docs = read_conll(corpus);
  TrainHistory history;
  const TaggerModel model = vtriage::train_tagger(arch, docs, cfg, config_.split_fraction, &history);
  fs::create_directories(work("models"));
  model.save(work("models/tagger_" + arch_name + ".json"));
  std::ostringstream s;
  s << "trained " << arch_name << " on " << model.train_docs.size() << " documents (" << model.test_docs.size()
    << " held out), best epoch " << history.best_epoch << " of " << history.epochs_run;
  return s.str();
}

std::string Pipeline::tag() {
  const auto arch_name = option("arch", "blstm");
  parse_tagger_arch(arch_name);
  const auto model_path = option("model", work("models/tagger_" + arch_name + ".json"));
  require_file(model_path, "tagger model");
  const TaggerModel model = TaggerModel::load(model_path);
  const CorpusStore store = load_work_corpus(work("corpus"));
  auto docs = metadata_documents(store);
  std::ostringstream counts;
  counts << "video_id\tn_unique_medical_terms\n";
  std::size_t total = 0;
  for (auto& d : docs) {
    for (auto& s : d.sentences) s.labels = model.tag(s.tokens);
    const auto n = unique_medical_terms(d.sentences);
    total += n;
    counts << d.doc_id << '\t' << n << '\n';
  }
  fs::create_directories(work("ner"));
  write_conll(work("ner/tagged_" + arch_name + ".conll"), docs);
  write_text(work("ner/ner_counts_" + arch_name + ".tsv"), counts.str());
  return "tagged " + std::to_string(docs.size()) + " videos with " + arch_name + ", " + std::to_string(total) +
         " unique medical terms in total";
}

std::string Pipeline::assemble() {
  const CorpusStore store = load_work_corpus(work("corpus"));
  const auto tf_path = work("text_features.tsv");
  require_file(tf_path, "text features (run featurize first)");
  std::map<std::string, VideoTextFeatures> text;
  for (const auto& row : read_table(tf_path)) {
    VideoTextFeatures f;
    f.video = text_features_from(row, "v_", tf_path);
    f.metadata = text_features_from(row, "m_", tf_path);
    text[row.at("video_id")] = f;
  }
  const auto arch_name = option("arch", "blstm");
  const auto nc_path = work("ner/ner_counts_" + arch_name + ".tsv");
  require_file(nc_path, "medical term counts (run tag first)");
  std::map<std::string, std::size_t> ner;
  for (const auto& row : read_table(nc_path))
    ner[row.at("video_id")] = static_cast<std::size_t>(cell(row, "n_unique_medical_terms", nc_path));

  const auto rows = assemble_features(store, text, ner, true);
  write_feature_tsv(work("features.tsv"), rows);
  const auto annotated = std::count_if(rows.begin(), rows.end(), [](const FeatureVector& r) { return r.annotated(); });
  return std::to_string(rows.size()) + " videos (" + std::to_string(annotated) + " annotated), " +
         std::to_string(kNumFeatures) + " features";
}

std::string Pipeline::train_clf() {
  const auto seed = require_seed("train-clf");
  const auto target_name = option("target");
  if (target_name.empty()) throw ValidationError("train-clf requires --target recommendation|medical_info|understandability");
  const Target target = parse_target(target_name);
  const auto path = work("features.tsv");
  require_file(path, "feature table (run assemble first)");
  const auto rows = read_feature_tsv(path);
  const LrModel m = train_classifier(rows, target, seed, config_.split_fraction, config_.clf_l2);
  for (const auto& w : m.warnings) warnings_.push_back(w);
  fs::create_directories(work("models"));
  m.save(work("models/clf_" + target_name + ".json"));
  std::ostringstream s;
  s << target_name << ": " << m.train_ids.size() << " train / " << m.test_ids.size() << " test videos, "
    << m.spec.features.size() << " features, converged in " << m.iterations << " iterations";
  return s.str();
}

std::string Pipeline::classify() {
  const auto path = work("features.tsv");
  require_file(path, "feature table (run assemble first)");
  const auto rows = read_feature_tsv(path);
  std::map<Target, LrModel> models;
  const auto only = option("target");
  for (Target t : kTargets) {
    if (!only.empty() && parse_target(only) != t) continue;
    const auto mp = work("models/clf_" + to_string(t) + ".json");
    if (fs::exists(mp)) models.emplace(t, LrModel::load(mp));
    else if (!only.empty()) require_file(mp, "classifier model");
  }
  if (models.empty()) throw IoError("no classifier models in " + work("models") + " (run train-clf first)");
  const bool impute = flag("impute_annotations");
  if (impute && models.count(Target::recommendation) &&
      (!models.count(Target::medical_info) || !models.count(Target::understandability)))
    throw ValidationError("--impute-annotations needs the medical_info and understandability models");

  std::ostringstream out;
  out << "video_id";
  for (const auto& [t, _] : models) out << '\t' << to_string(t) << "_probability\t" << to_string(t) << "_label";
  out << "\timputed\n";
  std::size_t imputed_rows = 0;
  for (const auto& r : rows) {
    std::map<Target, Prediction> pred;
    for (const auto& [t, m] : models)
      if (t != Target::recommendation) pred[t] = predict(m, r);
    bool imputed = false;
    if (models.count(Target::recommendation)) {
      FeatureVector x = r;
      if (impute && !r.annotated()) {
        x[Feature::medical_info_high] = pred.at(Target::medical_info).label;
        x[Feature::understandable] = pred.at(Target::understandability).label;
        imputed = true;
        ++imputed_rows;
      }
      pred[Target::recommendation] = predict(models.at(Target::recommendation), x);
    }
    out << r.video_id;
    for (const auto& [t, _] : models)
      out << '\t' << format_double(pred.at(t).probability) << '\t' << pred.at(t).label;
    out << '\t' << (imputed ? 1 : 0) << '\n';
  }
  write_text(work("predictions.tsv"), out.str());
  return "classified " + std::to_string(rows.size()) + " videos with " + std::to_string(models.size()) +
         " models (" + std::to_string(imputed_rows) + " with imputed annotations)";
}

std::string Pipeline::eval_tagger_cmd() {
  const auto corpus = work("ner/corpus.conll");
  require_file(corpus, "NER corpus (run build-ner-corpus first)");
  const auto only = option("arch");
  std::vector<std::string> archs;
  for (const char* a : {"crf", "blstm"}) {
    if (!only.empty() && only != a) continue;
    const auto mp = work(std::string("models/tagger_") + a + ".json");
    if (fs::exists(mp)) archs.push_back(a);
    else if (!only.empty()) require_file(mp, "tagger model");
  }
  if (!only.empty()) parse_tagger_arch(only);
  if (archs.empty()) throw IoError("no tagger models in " + work("models") + " (run train-tagger first)");
  const auto docs = read_conll(corpus);
  std::string summary;
  for (const auto& a : archs) {
    const TaggerModel model = TaggerModel::load(work("models/tagger_" + a + ".json"));
    const TaggerEvaluation ev = evaluate_tagger_model(model, docs);
    std::ostringstream out;
    out << "model\tprecision\trecall\tf_measure\tspan_precision\tspan_recall\tspan_f_measure\tsentences\ttokens\n"
        << a << '\t' << format_double(ev.token.precision) << '\t' << format_double(ev.token.recall) << '\t'
        << format_double(ev.token.f_measure) << '\t' << format_double(ev.span.precision) << '\t'
        << format_double(ev.span.recall) << '\t' << format_double(ev.span.f_measure) << '\t' << ev.sentences << '\t'
        << ev.tokens << '\n';
    write_text(work("eval/tagger_" + a + ".tsv"), out.str());
    summary += (summary.empty() ? "" : "; ") + a + " token P=" + fixed3(ev.token.precision) +
               " R=" + fixed3(ev.token.recall) + " F=" + fixed3(ev.token.f_measure);
  }
  return summary;
}

std::string Pipeline::eval_clf() {
  const auto path = work("features.tsv");
  require_file(path, "feature table (run assemble first)");
  const auto rows = read_feature_tsv(path);
  const auto only = option("target");
  std::string summary;
  for (Target t : kTargets) {
    if (!only.empty() && parse_target(only) != t) continue;
    const auto name = to_string(t);
    const auto mp = work("models/clf_" + name + ".json");
    if (!fs::exists(mp)) {
      if (!only.empty()) require_file(mp, "classifier model");
      continue;
    }
    const LrModel m = LrModel::load(mp);
    const ClfEvaluation ev = evaluate_classifier(m, rows);
    const auto& x = ev.metrics;
    std::ostringstream out;
    out << "target\tprecision\trecall\tf_measure\tneg_precision\tneg_recall\tneg_f_measure\taccuracy\ttp\tfp\tfn\ttn\n"
        << name << '\t' << format_double(x.positive.precision) << '\t' << format_double(x.positive.recall) << '\t'
        << format_double(x.positive.f_measure) << '\t' << format_double(x.negative.precision) << '\t'
        << format_double(x.negative.recall) << '\t' << format_double(x.negative.f_measure) << '\t'
        << format_double(x.accuracy) << '\t' << x.counts.tp << '\t' << x.counts.fp << '\t' << x.counts.fn << '\t'
        << x.counts.tn << '\n';
    write_text(work("eval/clf_" + name + ".tsv"), out.str());
    std::ostringstream preds;
    preds << "video_id\tprobability\tlabel\n";
    for (std::size_t i = 0; i < ev.video_ids.size(); ++i)
      preds << ev.video_ids[i] << '\t' << format_double(ev.predictions[i].probability) << '\t'
            << ev.predictions[i].label << '\n';
    write_text(work("eval/clf_" + name + "_predictions.tsv"), preds.str());
    summary += (summary.empty() ? "" : "; ") + name + " accuracy=" + fixed3(x.accuracy) +
               " F=" + fixed3(x.positive.f_measure);
  }
  if (summary.empty()) throw IoError("no classifier models in " + work("models") + " (run train-clf first)");
  return summary;
}

std::string Pipeline::eval_all() {
  std::string summary;
  const bool any_tagger = fs::exists(work("models/tagger_crf.json")) || fs::exists(work("models/tagger_blstm.json"));
  bool any_clf = false;
  for (Target t : kTargets) any_clf = any_clf || fs::exists(work("models/clf_" + to_string(t) + ".json"));
  if (!any_tagger && !any_clf) throw IoError("no models in " + work("models") + " to evaluate");
  if (any_tagger) summary = eval_tagger_cmd();
  if (any_clf) summary += (summary.empty() ? "" : "; ") + eval_clf();
  return summary;
}

std::string Pipeline::report() {
  const auto table = option("table");
  std::ostringstream out;
  if (table == "2") {
    out << "model\tprecision\trecall\tf_measure\n";
    for (const char* a : {"crf", "blstm"}) {
      const auto p = work(std::string("eval/tagger_") + a + ".tsv");
      require_file(p, std::string(a) + " tagger evaluation (run eval-tagger first)");
      const auto rows = read_table(p);
      if (rows.size() != 1) throw SchemaError(p + ": expected one row");
      out << a << '\t' << fixed3(cell(rows[0], "precision", p)) << '\t' << fixed3(cell(rows[0], "recall", p)) << '\t'
          << fixed3(cell(rows[0], "f_measure", p)) << '\n';
    }
  } else if (table == "5" || table == "7") {
    std::vector<MetricRow> rows;
    auto load = [&](const std::string& target) {
      const auto p = work("eval/clf_" + target + ".tsv");
      require_file(p, target + " classifier evaluation (run eval-clf first)");
      const auto r = read_table(p);
      if (r.size() != 1) throw SchemaError(p + ": expected one row");
      return std::make_pair(r[0], p);
    };
    if (table == "5") {
      for (const char* t : {"medical_info", "understandability"}) {
        const auto [r, p] = load(t);
        rows.push_back({t, {cell(r, "precision", p), cell(r, "recall", p), cell(r, "f_measure", p)}, cell(r, "accuracy", p)});
      }
    } else {
      const auto [r, p] = load("recommendation");
      const double acc = cell(r, "accuracy", p);
      rows.push_back({"recommended", {cell(r, "precision", p), cell(r, "recall", p), cell(r, "f_measure", p)}, acc});
      rows.push_back(
          {"not_recommended", {cell(r, "neg_precision", p), cell(r, "neg_recall", p), cell(r, "neg_f_measure", p)}, acc});
    }
    out << format_metric_table(rows);
  } else if (table == "6") {
    std::vector<LrModel> models;
    for (Target t : kTargets) {
      const auto mp = work("models/clf_" + to_string(t) + ".json");
      if (fs::exists(mp)) models.push_back(LrModel::load(mp));
    }
    if (models.empty()) throw IoError("no classifier models in " + work("models") + " (run train-clf first)");
    std::vector<const LrModel*> ptrs;
    for (const auto& m : models) ptrs.push_back(&m);
    out << format_coefficient_table(ptrs);
  } else {
    throw ValidationError("report needs --table 2, 5, 6 or 7");
  }
  const auto path = work("reports/table" + table + ".tsv");
  write_text(path, out.str());
  return "wrote " + path;
}

std::string Pipeline::synth() {
  SynthOptions opts;
  opts.seed = require_seed("synth");
  const auto n = option("videos_count");
  if (!n.empty()) {
    const auto v = parse_int("videos", n);
    if (v < 2) throw ValidationError("synth needs at least two videos");
    opts.videos = static_cast<std::size_t>(v);
  }
  const auto dir = option("out", work("synth"));
  const SynthCorpus c = generate_corpus(opts);
  write_corpus(c, dir);
  return "wrote " + std::to_string(c.videos.size()) + " videos, " + std::to_string(c.label_rows.size()) +
         " label rows and " + std::to_string(c.dictionary.size()) + " dictionary terms to " + dir;
}

}  // namespace vtriage
