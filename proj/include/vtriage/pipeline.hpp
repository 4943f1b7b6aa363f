#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vtriage/medterm.hpp"
#include "vtriage/train_config.hpp"

namespace vtriage {

/// Settings shared by every command. Values come from an optional JSON
/// config file and are then overridden by explicit `set` calls.
struct PipelineConfig {
  std::optional<std::uint64_t> seed;
  std::string work_dir = "work";
  std::string corpus_dir;  // holds videos.jsonl, transcripts.jsonl, ocr.jsonl, labels.jsonl
  std::string videos_path, transcripts_path, ocr_path, labels_path;  // override corpus_dir
  std::string dictionary_path;  // defaults to <corpus_dir>/dictionary.tsv
  std::string data_dir = VTRIAGE_DATA_DIR;  // lexicons, stopwords, keywords
  double split_fraction = 0.8;
  TrainConfig tagger;
  double clf_l2 = -1.0;  // negative: 1/n_train
  ProjectionMode projection = ProjectionMode::phrase;

  /// Keys: seed, work_dir, corpus_dir, videos, transcripts, ocr, labels,
  /// dictionary, data_dir, split_fraction, clf_l2, projection, and
  /// tagger.<field> for each TrainConfig field.
  void set(const std::string& key, const std::string& value);
  /// A JSON object whose members are `set` keys (nested "tagger" object
  /// allowed).
  void load_file(const std::string& path);
  void validate() const;
};

/// Command-line level runner. Command options (arch, target, table, model,
/// out, keywords, search_results, impute_annotations, videos_count) are
/// passed as string key/values.
class Pipeline {
 public:
  static const std::vector<std::string>& commands();
  static bool is_command(const std::string& name);

  PipelineConfig& config() { return config_; }
  void set_option(const std::string& key, const std::string& value) { options_[key] = value; }
  void clear_options() { options_.clear(); }

  /// Runs one command and returns its one-line summary. Warnings go to
  /// `warnings()`. Throws ValidationError for bad input, Error subclasses
  /// otherwise.
  std::string run(const std::string& command);
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::string option(const std::string& key, const std::string& fallback = {}) const;
  bool flag(const std::string& key) const;
  std::string work(const std::string& name) const;
  std::uint64_t require_seed(const std::string& command) const;

  std::string ingest();
  std::string featurize();
  std::string build_ner_corpus();
  std::string train_tagger_cmd();
  std::string tag();
  std::string assemble();
  std::string train_clf();
  std::string classify();
  std::string eval_tagger_cmd();
  std::string eval_clf();
  std::string eval_all();
  std::string report();
  std::string synth();

  PipelineConfig config_;
  std::map<std::string, std::string> options_;
  std::vector<std::string> warnings_;
};

}  // namespace vtriage
