#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vtriage/medterm.hpp"
#include "vtriage/train_config.hpp"
#include "vtriage/vocab.hpp"

namespace vtriage {

struct BlstmDims {
  int vocab = 0;
  int d_emb = 0;
  int d_hid = 0;
  int n_labels = static_cast<int>(kNumTags);
  bool operator==(const BlstmDims&) const = default;
};

/// One named block of the flat parameter vector. `rows x cols` is the
/// in-memory (column-major) shape.
struct TensorSlot {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;
  Eigen::Index size() const { return rows * cols; }
};

/// Bidirectional LSTM tagger parameters, stored contiguously so that
/// optimizers, gradient checks and serialization work on one vector.
///
/// Layout: embedding (d_emb x vocab, one column per word); per direction a
/// gate matrix (4*d_hid x (d_emb + d_hid), gate rows ordered input, forget,
/// output, candidate) and gate bias (4*d_hid); output projection
/// (n_labels x 2*d_hid) over [forward; backward] states and its bias.
class BlstmParams {
 public:
  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  BlstmParams() = default;
  explicit BlstmParams(const BlstmDims& dims);

  const BlstmDims& dims() const { return dims_; }
  const std::vector<TensorSlot>& slots() const { return slots_; }
  const TensorSlot& slot(const std::string& name) const;

  Eigen::VectorXd& flat() { return flat_; }
  const Eigen::VectorXd& flat() const { return flat_; }

  MatMap embedding() { return mat(0); }
  ConstMatMap embedding() const { return mat(0); }
  MatMap gates(int dir) { return mat(1 + 2 * dir); }
  ConstMatMap gates(int dir) const { return mat(1 + 2 * dir); }
  VecMap gate_bias(int dir) { return vec(2 + 2 * dir); }
  ConstVecMap gate_bias(int dir) const { return vec(2 + 2 * dir); }
  MatMap output() { return mat(5); }
  ConstMatMap output() const { return mat(5); }
  VecMap output_bias() { return vec(6); }
  ConstVecMap output_bias() const { return vec(6); }

  /// Small uniform weights, forget-gate bias 1.
  void init_random(std::uint64_t seed, double scale = 0.1);
  bool all_finite() const { return flat_.allFinite(); }

 private:
  MatMap mat(std::size_t k) { return {flat_.data() + slots_[k].offset, slots_[k].rows, slots_[k].cols}; }
  ConstMatMap mat(std::size_t k) const { return {flat_.data() + slots_[k].offset, slots_[k].rows, slots_[k].cols}; }
  VecMap vec(std::size_t k) { return {flat_.data() + slots_[k].offset, slots_[k].size()}; }
  ConstVecMap vec(std::size_t k) const { return {flat_.data() + slots_[k].offset, slots_[k].size()}; }

  BlstmDims dims_;
  std::vector<TensorSlot> slots_;
  Eigen::VectorXd flat_;
};

/// Per-token log-probabilities, n_labels x length. Throws ValidationError
/// on an empty sequence or an out-of-range id.
Eigen::MatrixXd blstm_forward(const BlstmParams& p, std::span<const int> token_ids);

struct EncodedSentence {
  std::vector<int> ids;
  std::vector<int> labels;
};

std::vector<EncodedSentence> encode_corpus(std::span<const TaggedSentence> corpus, const Vocab& vocab);

struct LossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Mean token cross-entropy over the batch plus l2 * sum(theta^2), with the
/// exact gradient by backpropagation through time in both directions.
LossGrad blstm_loss_grad(const BlstmParams& p, std::span<const EncodedSentence> batch, double l2);
LossGrad blstm_loss_grad(const BlstmParams& p, std::span<const TaggedSentence> batch, const Vocab& vocab, double l2);

/// Mean token cross-entropy without the penalty.
double blstm_mean_nll(const BlstmParams& p, std::span<const EncodedSentence> data);

std::vector<BioTag> blstm_predict(const BlstmParams& p, std::span<const int> token_ids);

struct BlstmModel {
  Vocab vocab;
  BlstmParams params;
  std::vector<BioTag> tag(std::span<const std::string> tokens) const;
};

/// Seeded mini-batch training with gradient clipping and early stopping on a
/// held-out slice of `corpus`. Throws NumericError naming the epoch if the
/// loss becomes non-finite.
BlstmModel train_blstm(std::span<const TaggedSentence> corpus, const TrainConfig& config,
                       TrainHistory* history = nullptr);

}  // namespace vtriage
