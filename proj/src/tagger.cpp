#include "vtriage/tagger.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vtriage/error.hpp"
#include "vtriage/split.hpp"

namespace vtriage {

using nlohmann::json;

std::string to_string(TaggerArch a) { return a == TaggerArch::blstm ? "blstm" : "crf"; }

TaggerArch parse_tagger_arch(const std::string& s) {
  if (s == "blstm") return TaggerArch::blstm;
  if (s == "crf") return TaggerArch::crf;
  throw ValidationError("unknown tagger architecture '" + s + "' (expected blstm or crf)");
}

TaggerModel::TaggerModel(BlstmModel m, TrainConfig config) : model_(std::move(m)), config_(std::move(config)) {}
TaggerModel::TaggerModel(CrfParams m, TrainConfig config) : model_(std::move(m)), config_(std::move(config)) {}

TaggerArch TaggerModel::arch() const {
  return std::holds_alternative<BlstmModel>(model_) ? TaggerArch::blstm : TaggerArch::crf;
}

std::vector<BioTag> TaggerModel::tag(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  if (const auto* b = blstm()) return b->tag(tokens);
  return crf_tag(*crf(), tokens);
}

namespace {

json config_json(const TrainConfig& c) {
  return {{"seed", c.seed},
          {"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"l2", c.l2},
          {"batch_size", c.batch_size},
          {"d_emb", c.d_emb},
          {"d_hid", c.d_hid},
          {"clip_norm", c.clip_norm},
          {"patience", c.patience},
          {"dev_fraction", c.dev_fraction},
          {"min_count", c.min_count},
          {"optimizer", to_string(c.optimizer)}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2 = j.at("l2").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.d_emb = j.at("d_emb").get<int>();
  c.d_hid = j.at("d_hid").get<int>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.patience = j.at("patience").get<int>();
  c.dev_fraction = j.at("dev_fraction").get<double>();
  c.min_count = j.at("min_count").get<int>();
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  return c;
}

// The embedding is stored as one contiguous d_emb vector per word, which is
// row-major [vocab, d_emb]. Other blocks are written row-major in their
// natural orientation.
json slot_json(const BlstmParams& p, const TensorSlot& s) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(s.size()));
  const double* base = p.flat().data() + s.offset;
  json shape;
  if (s.name == "embedding") {
    data.assign(base, base + s.size());
    shape = {s.cols, s.rows};
  } else {
    for (Eigen::Index r = 0; r < s.rows; ++r)
      for (Eigen::Index c = 0; c < s.cols; ++c) data.push_back(base[c * s.rows + r]);
    shape = s.cols == 1 ? json{s.rows} : json{s.rows, s.cols};
  }
  return {{"name", s.name}, {"shape", shape}, {"data", data}};
}

void slot_from_json(BlstmParams& p, const TensorSlot& s, const json& j) {
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != s.size())
    throw SchemaError("tensor '" + s.name + "' has " + std::to_string(data.size()) + " values, expected " +
                      std::to_string(s.size()));
  double* base = p.flat().data() + s.offset;
  if (s.name == "embedding") {
    std::copy(data.begin(), data.end(), base);
  } else {
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < s.rows; ++r)
      for (Eigen::Index c = 0; c < s.cols; ++c) base[c * s.rows + r] = data[k++];
  }
}

}  // namespace

std::string TaggerModel::to_json() const {
  json j;
  j["format"] = "vtriage-tagger";
  j["version"] = kFormatVersion;
  j["arch"] = to_string(arch());
  j["config"] = config_json(config_);
  j["split"] = {{"train_fraction", train_fraction}, {"train", train_docs}, {"test", test_docs}};
  j["labels"] = {"B-MED", "I-MED", "O"};
  if (const auto* b = blstm()) {
    const auto& d = b->params.dims();
    j["dims"] = {{"vocab", d.vocab}, {"d_emb", d.d_emb}, {"d_hid", d.d_hid}, {"n_labels", d.n_labels}};
    j["vocab"] = b->vocab.words();
    json tensors = json::array();
    for (const auto& s : b->params.slots()) tensors.push_back(slot_json(b->params, s));
    j["tensors"] = tensors;
  } else {
    const auto& c = *crf();
    const auto L = c.n_labels();
    std::vector<double> emission(c.weights().data(), c.weights().data() + c.transition_offset());
    std::vector<double> transition(c.weights().data() + c.transition_offset(), c.weights().data() + c.weights().size());
    j["attributes"] = c.attributes();
    j["tensors"] = json::array({
        {{"name", "emission"}, {"shape", {c.n_attributes(), L}}, {"data", emission}},
        {{"name", "transition"}, {"shape", {L, L}}, {"data", transition}},
    });
  }
  return j.dump();
}

TaggerModel TaggerModel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("tagger model: ") + e.what(), e.byte);
  }
  try {
    if (j.value("format", "") != "vtriage-tagger") throw SchemaError("not a tagger model file");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion)
      throw SchemaError("unsupported tagger model version " + std::to_string(version));
    const TrainConfig config = config_from_json(j.at("config"));
    const auto arch = parse_tagger_arch(j.at("arch").get<std::string>());
    const auto& tensors = j.at("tensors");
    auto find = [&](const std::string& name) -> const json& {
      for (const auto& t : tensors)
        if (t.at("name") == name) return t;
      throw SchemaError("missing tensor '" + name + "'");
    };
    std::optional<TaggerModel> model;
    if (arch == TaggerArch::blstm) {
      BlstmModel b;
      b.vocab = Vocab(j.at("vocab").get<std::vector<std::string>>());
      const auto& dj = j.at("dims");
      BlstmDims dims{dj.at("vocab").get<int>(), dj.at("d_emb").get<int>(), dj.at("d_hid").get<int>(),
                     dj.at("n_labels").get<int>()};
      if (dims.vocab != b.vocab.size()) throw SchemaError("vocab size does not match declared dims");
      b.params = BlstmParams(dims);
      for (const auto& s : b.params.slots()) slot_from_json(b.params, s, find(s.name));
      if (!b.params.all_finite()) throw SchemaError("non-finite parameter in tagger model");
      model.emplace(std::move(b), config);
    } else {
      CrfParams c(j.at("attributes").get<std::vector<std::string>>());
      const auto emission = find("emission").at("data").get<std::vector<double>>();
      const auto transition = find("transition").at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(emission.size()) != c.transition_offset() ||
          static_cast<Eigen::Index>(emission.size() + transition.size()) != c.weights().size())
        throw SchemaError("CRF weight arrays do not match the attribute count");
      std::copy(emission.begin(), emission.end(), c.weights().data());
      std::copy(transition.begin(), transition.end(), c.weights().data() + c.transition_offset());
      if (!c.weights().allFinite()) throw SchemaError("non-finite parameter in tagger model");
      model.emplace(std::move(c), config);
    }
    const auto& sp = j.at("split");
    model->train_fraction = sp.at("train_fraction").get<double>();
    model->train_docs = sp.at("train").get<std::vector<std::string>>();
    model->test_docs = sp.at("test").get<std::vector<std::string>>();
    return std::move(*model);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("tagger model: ") + e.what());
  }
}

void TaggerModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << to_json() << '\n';
  if (!out) throw IoError("failed writing " + path);
}

TaggerModel TaggerModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

TaggerModel train_tagger(TaggerArch arch, std::span<const TaggedDocument> docs, const TrainConfig& config,
                         double train_fraction, TrainHistory* history) {
  config.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValidationError("train fraction must lie in (0, 1)");
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.doc_id);
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
    throw ValidationError("duplicate document ids in tagger corpus");
  if (ids.size() < 2) throw ValidationError("tagger corpus needs at least two documents for a train/test split");
  auto split = split_ids(ids, train_fraction, config.seed);

  std::vector<TaggedSentence> train;
  for (const auto& id : split.train)
    for (const auto& d : docs)
      if (d.doc_id == id)
        for (const auto& s : d.sentences)
          if (!s.tokens.empty()) train.push_back(s);
  if (train.size() < 2) throw ValidationError("training split has fewer than two sentences");

  auto make = [&]() -> TaggerModel {
    if (arch == TaggerArch::blstm) return TaggerModel(train_blstm(train, config, history), config);
    return TaggerModel(train_crf(train, config, history), config);
  };
  TaggerModel m = make();
  m.train_fraction = train_fraction;
  m.train_docs = std::move(split.train);
  m.test_docs = std::move(split.test);
  return m;
}

TaggerEvaluation evaluate_tagger_model(const TaggerModel& model, std::span<const TaggedDocument> docs) {
  const std::set<std::string> test(model.test_docs.begin(), model.test_docs.end());
  std::vector<std::vector<BioTag>> pred, gold;
  TaggerEvaluation ev;
  for (const auto& d : docs) {
    if (!test.empty() && !test.count(d.doc_id)) continue;
    for (const auto& s : d.sentences) {
      if (s.tokens.empty()) continue;
      pred.push_back(model.tag(s.tokens));
      gold.push_back(repair_bio(s.labels));
      ev.tokens += s.tokens.size();
    }
  }
  if (gold.empty()) throw ValidationError("no test sentences found for the model's split");
  ev.sentences = gold.size();
  ev.token = evaluate_tagger(pred, gold);
  ev.span = evaluate_spans(pred, gold);
  return ev;
}

}  // namespace vtriage
