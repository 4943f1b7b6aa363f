#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vtriage/blstm.hpp"
#include "vtriage/crf.hpp"
#include "vtriage/medterm.hpp"
#include "vtriage/tag_metrics.hpp"
#include "vtriage/train_config.hpp"

namespace vtriage {

enum class TaggerArch { blstm, crf };

std::string to_string(TaggerArch a);
TaggerArch parse_tagger_arch(const std::string& s);

/// A trained tagger plus the configuration and document split it came from.
class TaggerModel {
 public:
  static constexpr int kFormatVersion = 1;

  TaggerModel(BlstmModel m, TrainConfig config);
  TaggerModel(CrfParams m, TrainConfig config);

  TaggerArch arch() const;
  const TrainConfig& config() const { return config_; }

  /// Well-formed BIO tags for one sentence.
  std::vector<BioTag> tag(std::span<const std::string> tokens) const;

  const BlstmModel* blstm() const { return std::get_if<BlstmModel>(&model_); }
  const CrfParams* crf() const { return std::get_if<CrfParams>(&model_); }

  double train_fraction = 0.8;
  std::vector<std::string> train_docs;
  std::vector<std::string> test_docs;

  /// Versioned JSON: config, split, vocabulary or attributes, and flat
  /// parameter arrays with declared shapes.
  std::string to_json() const;
  static TaggerModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static TaggerModel load(const std::string& path);

 private:
  std::variant<BlstmModel, CrfParams> model_;
  TrainConfig config_;
};

/// Splits documents at the video level, trains on the train side, and
/// records the split in the returned model.
TaggerModel train_tagger(TaggerArch arch, std::span<const TaggedDocument> docs, const TrainConfig& config,
                         double train_fraction, TrainHistory* history = nullptr);

struct TaggerEvaluation {
  TagMetrics token;
  TagMetrics span;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
};

/// Scores the model on the documents listed in its test split (all
/// documents if the model carries no split).
TaggerEvaluation evaluate_tagger_model(const TaggerModel& model, std::span<const TaggedDocument> docs);

}  // namespace vtriage
