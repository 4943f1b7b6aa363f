#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "vtriage/medterm.hpp"
#include "vtriage/train_config.hpp"

namespace vtriage {

/// Potentials of one sentence: emission(t, y) and transition(prev, cur).
/// Label ids index rows of `transition` and columns of `emission`.
struct CrfScores {
  Eigen::MatrixXd emission;    // length x labels
  Eigen::MatrixXd transition;  // labels x labels
};

/// log of the sum over all label sequences of exp(score), by the forward
/// algorithm in log space.
double log_partition(const CrfScores& s);

/// Score of one label sequence.
double sequence_score(const CrfScores& s, std::span<const int> labels);

struct ViterbiResult {
  std::vector<int> labels;
  double score = 0.0;
};

/// Best label sequence. Among equally scoring sequences the
/// lexicographically smallest wins (lower label id first).
ViterbiResult viterbi(const CrfScores& s);

struct CrfMarginals {
  double log_z = 0.0;
  Eigen::MatrixXd node;               // length x labels, rows sum to 1
  std::vector<Eigen::MatrixXd> edge;  // length-1 of labels x labels
};

CrfMarginals forward_backward(const CrfScores& s);

/// Attribute strings for every token: bias, word, lowercased word,
/// previous/next word, word shape, prefixes and suffixes up to length 3.
std::vector<std::vector<std::string>> crf_token_attributes(std::span<const std::string> tokens);

/// A sentence as attribute ids per token (unknown attributes dropped).
struct CrfInstance {
  std::vector<std::vector<int>> attributes;
  std::vector<int> labels;  // empty when unlabeled
};

/// Linear-chain CRF over {B-MED, I-MED, O}: weights[attr * labels + y]
/// for emissions, then a labels x labels transition block.
class CrfParams {
 public:
  CrfParams() = default;
  CrfParams(std::vector<std::string> attributes, int n_labels = static_cast<int>(kNumTags));

  int n_labels() const { return n_labels_; }
  int n_attributes() const { return static_cast<int>(attributes_.size()); }
  const std::vector<std::string>& attributes() const { return attributes_; }
  int attribute_id(const std::string& a) const;  // -1 when unknown

  Eigen::VectorXd& weights() { return weights_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double emission_weight(int attr, int label) const { return weights_[attr * n_labels_ + label]; }
  double transition(int prev, int cur) const { return weights_[transition_offset() + prev * n_labels_ + cur]; }
  Eigen::Index transition_offset() const { return static_cast<Eigen::Index>(attributes_.size()) * n_labels_; }

  CrfInstance encode(std::span<const std::string> tokens) const;
  CrfInstance encode(const TaggedSentence& s) const;
  CrfScores scores(const CrfInstance& inst) const;

 private:
  int n_labels_ = static_cast<int>(kNumTags);
  std::vector<std::string> attributes_;
  std::unordered_map<std::string, int> index_;
  Eigen::VectorXd weights_;
};

double crf_log_partition(const CrfParams& p, std::span<const std::string> tokens);
ViterbiResult crf_viterbi(const CrfParams& p, std::span<const std::string> tokens);

struct CrfLossGrad {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

/// Mean negative conditional log-likelihood over the batch plus
/// l2 * sum(w^2). The gradient is expected minus observed feature counts,
/// with expectations from forward-backward marginals.
CrfLossGrad crf_loss_grad(const CrfParams& p, std::span<const CrfInstance> batch, double l2);

/// Mean negative log-likelihood without the penalty.
double crf_mean_nll(const CrfParams& p, std::span<const CrfInstance> data);

/// Builds the attribute set from `corpus` and maximizes the regularized
/// likelihood by seeded mini-batch gradient steps with early stopping.
CrfParams train_crf(std::span<const TaggedSentence> corpus, const TrainConfig& config,
                    TrainHistory* history = nullptr);

/// Viterbi decode followed by the BIO repair pass.
std::vector<BioTag> crf_tag(const CrfParams& p, std::span<const std::string> tokens);

}  // namespace vtriage
