#include "vtriage/crf.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "training_loop.hpp"
#include "vtriage/error.hpp"
#include "vtriage/rng.hpp"

namespace vtriage {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double log_sum_exp(const VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

void check_scores(const CrfScores& s) {
  if (s.emission.rows() < 1) throw ValidationError("CRF sentence must have at least one token");
  if (s.transition.rows() != s.emission.cols() || s.transition.cols() != s.emission.cols())
    throw ValidationError("CRF transition matrix does not match the label count");
}

// alpha(t, y): log-sum of scores of all prefixes ending in y at t.
MatrixXd forward_table(const CrfScores& s) {
  const Index n = s.emission.rows(), l = s.emission.cols();
  MatrixXd alpha(n, l);
  alpha.row(0) = s.emission.row(0);
  VectorXd tmp(l);
  for (Index t = 1; t < n; ++t)
    for (Index y = 0; y < l; ++y) {
      for (Index i = 0; i < l; ++i) tmp[i] = alpha(t - 1, i) + s.transition(i, y);
      alpha(t, y) = s.emission(t, y) + log_sum_exp(tmp);
    }
  return alpha;
}

std::string word_shape(const std::string& w) {
  std::string shape;
  for (char ch : w) {
    const auto c = static_cast<unsigned char>(ch);
    char k;
    if (c >= 'A' && c <= 'Z') k = 'X';
    else if (c >= 'a' && c <= 'z') k = 'x';
    else if (c >= '0' && c <= '9') k = 'd';
    else if (c >= 0x80) k = 'u';
    else k = static_cast<char>(c);
    if (shape.empty() || shape.back() != k) shape += k;
  }
  return shape;
}

std::string lowercase(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

}  // namespace

double log_partition(const CrfScores& s) {
  check_scores(s);
  const MatrixXd alpha = forward_table(s);
  return log_sum_exp(alpha.row(alpha.rows() - 1).transpose());
}

double sequence_score(const CrfScores& s, std::span<const int> labels) {
  check_scores(s);
  if (static_cast<Index>(labels.size()) != s.emission.rows())
    throw ValidationError("label sequence length does not match the sentence");
  double score = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    score += s.emission(static_cast<Index>(t), labels[t]);
    if (t > 0) score += s.transition(labels[t - 1], labels[t]);
  }
  return score;
}

ViterbiResult viterbi(const CrfScores& s) {
  check_scores(s);
  const Index n = s.emission.rows(), l = s.emission.cols();
  // best(t, y): best score of a suffix starting at t with label y. Decoding
  // left to right and taking the first maximizer at each step yields the
  // lexicographically smallest optimal sequence.
  MatrixXd best(n, l);
  best.row(n - 1) = s.emission.row(n - 1);
  for (Index k = 1; k < n; ++k) {
    const Index t = n - 1 - k;
    for (Index y = 0; y < l; ++y) {
      double m = -std::numeric_limits<double>::infinity();
      for (Index j = 0; j < l; ++j) m = std::max(m, s.transition(y, j) + best(t + 1, j));
      best(t, y) = s.emission(t, y) + m;
    }
  }
  ViterbiResult r;
  r.labels.resize(static_cast<std::size_t>(n));
  Index cur = 0;
  for (Index y = 1; y < l; ++y)
    if (best(0, y) > best(0, cur)) cur = y;
  r.labels[0] = static_cast<int>(cur);
  for (std::size_t k = 1; k < r.labels.size(); ++k) {
    const auto t = static_cast<Index>(k);
    Index next = 0;
    double v = s.transition(cur, 0) + best(t, 0);
    for (Index j = 1; j < l; ++j) {
      const double cand = s.transition(cur, j) + best(t, j);
      if (cand > v) {
        v = cand;
        next = j;
      }
    }
    cur = next;
    r.labels[k] = static_cast<int>(cur);
  }
  r.score = sequence_score(s, r.labels);
  return r;
}

CrfMarginals forward_backward(const CrfScores& s) {
  check_scores(s);
  const Index n = s.emission.rows(), l = s.emission.cols();
  const MatrixXd alpha = forward_table(s);
  MatrixXd beta = MatrixXd::Zero(n, l);
  VectorXd tmp(l);
  for (Index t = n - 1; t-- > 0;)
    for (Index i = 0; i < l; ++i) {
      for (Index j = 0; j < l; ++j) tmp[j] = s.transition(i, j) + s.emission(t + 1, j) + beta(t + 1, j);
      beta(t, i) = log_sum_exp(tmp);
    }
  CrfMarginals m;
  m.log_z = log_sum_exp(alpha.row(n - 1).transpose());
  m.node = (alpha + beta).array() - m.log_z;
  m.node = m.node.array().exp();
  for (Index t = 0; t + 1 < n; ++t) {
    MatrixXd e(l, l);
    for (Index i = 0; i < l; ++i)
      for (Index j = 0; j < l; ++j)
        e(i, j) = std::exp(alpha(t, i) + s.transition(i, j) + s.emission(t + 1, j) + beta(t + 1, j) - m.log_z);
    m.edge.push_back(std::move(e));
  }
  return m;
}

std::vector<std::vector<std::string>> crf_token_attributes(std::span<const std::string> tokens) {
  std::vector<std::vector<std::string>> out(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const std::string& w = tokens[t];
    auto& a = out[t];
    a.push_back("bias");
    a.push_back("w=" + w);
    a.push_back("lw=" + lowercase(w));
    a.push_back("pw=" + (t > 0 ? lowercase(tokens[t - 1]) : std::string("<s>")));
    a.push_back("nw=" + (t + 1 < tokens.size() ? lowercase(tokens[t + 1]) : std::string("</s>")));
    a.push_back("sh=" + word_shape(w));
    for (std::size_t k = 1; k <= 3 && k <= w.size(); ++k) {
      a.push_back("p" + std::to_string(k) + "=" + w.substr(0, k));
      a.push_back("s" + std::to_string(k) + "=" + w.substr(w.size() - k));
    }
  }
  return out;
}

CrfParams::CrfParams(std::vector<std::string> attributes, int n_labels)
    : n_labels_(n_labels), attributes_(std::move(attributes)) {
  if (n_labels_ < 1) throw ValidationError("CRF needs at least one label");
  for (std::size_t i = 0; i < attributes_.size(); ++i)
    if (!index_.emplace(attributes_[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate CRF attribute '" + attributes_[i] + "'");
  weights_ = VectorXd::Zero(transition_offset() + n_labels_ * n_labels_);
}

int CrfParams::attribute_id(const std::string& a) const {
  auto it = index_.find(a);
  return it == index_.end() ? -1 : it->second;
}

CrfInstance CrfParams::encode(std::span<const std::string> tokens) const {
  CrfInstance inst;
  for (const auto& attrs : crf_token_attributes(tokens)) {
    std::vector<int> ids;
    for (const auto& a : attrs)
      if (int id = attribute_id(a); id >= 0) ids.push_back(id);
    inst.attributes.push_back(std::move(ids));
  }
  return inst;
}

CrfInstance CrfParams::encode(const TaggedSentence& s) const {
  if (s.tokens.size() != s.labels.size()) throw ValidationError("sentence has mismatched token and label counts");
  CrfInstance inst = encode(s.tokens);
  for (BioTag t : s.labels) inst.labels.push_back(static_cast<int>(t));
  return inst;
}

CrfScores CrfParams::scores(const CrfInstance& inst) const {
  const auto n = static_cast<Index>(inst.attributes.size());
  CrfScores s;
  s.emission = MatrixXd::Zero(n, n_labels_);
  for (Index t = 0; t < n; ++t)
    for (int a : inst.attributes[static_cast<std::size_t>(t)]) {
      if (a < 0 || a >= n_attributes()) throw ValidationError("CRF attribute id out of range");
      for (int y = 0; y < n_labels_; ++y) s.emission(t, y) += emission_weight(a, y);
    }
  s.transition = Eigen::Map<const MatrixXd>(weights_.data() + transition_offset(), n_labels_, n_labels_).transpose();
  return s;
}

double crf_log_partition(const CrfParams& p, std::span<const std::string> tokens) {
  return log_partition(p.scores(p.encode(tokens)));
}

ViterbiResult crf_viterbi(const CrfParams& p, std::span<const std::string> tokens) {
  return viterbi(p.scores(p.encode(tokens)));
}

CrfLossGrad crf_loss_grad(const CrfParams& p, std::span<const CrfInstance> batch, double l2) {
  if (batch.empty()) throw ValidationError("crf_loss_grad: empty batch");
  const int l = p.n_labels();
  const Index toff = p.transition_offset();
  CrfLossGrad out;
  out.grad = VectorXd::Zero(p.weights().size());
  double nll = 0.0;
  for (const auto& inst : batch) {
    if (inst.labels.size() != inst.attributes.size()) throw ValidationError("CRF instance is missing gold labels");
    const CrfScores s = p.scores(inst);
    const CrfMarginals m = forward_backward(s);
    nll += m.log_z - sequence_score(s, inst.labels);
    for (std::size_t t = 0; t < inst.attributes.size(); ++t) {
      for (int a : inst.attributes[t])
        for (int y = 0; y < l; ++y)
          out.grad[a * l + y] += m.node(static_cast<Index>(t), y) - (inst.labels[t] == y ? 1.0 : 0.0);
      if (t > 0) {
        const auto& e = m.edge[t - 1];
        for (int i = 0; i < l; ++i)
          for (int j = 0; j < l; ++j) out.grad[toff + i * l + j] += e(i, j);
        out.grad[toff + inst.labels[t - 1] * l + inst.labels[t]] -= 1.0;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  out.loss = nll * scale + l2 * p.weights().squaredNorm();
  out.grad = out.grad * scale + 2.0 * l2 * p.weights();
  return out;
}

double crf_mean_nll(const CrfParams& p, std::span<const CrfInstance> data) {
  if (data.empty()) return 0.0;
  double nll = 0.0;
  for (const auto& inst : data) {
    const CrfScores s = p.scores(inst);
    nll += log_partition(s) - sequence_score(s, inst.labels);
  }
  return nll / static_cast<double>(data.size());
}

CrfParams train_crf(std::span<const TaggedSentence> corpus, const TrainConfig& config, TrainHistory* history) {
  config.validate();
  if (corpus.size() < 2) throw ValidationError("train_crf needs at least 2 sentences");
  Rng rng(config.seed);
  const auto split = detail::holdout(corpus.size(), config.dev_fraction, rng);

  std::set<std::string> attrs;
  for (auto i : split.train)
    for (const auto& tok_attrs : crf_token_attributes(corpus[i].tokens)) attrs.insert(tok_attrs.begin(), tok_attrs.end());
  CrfParams params(std::vector<std::string>(attrs.begin(), attrs.end()));

  std::vector<CrfInstance> train, dev;
  for (auto i : split.train) train.push_back(params.encode(corpus[i]));
  for (auto i : split.dev) dev.push_back(params.encode(corpus[i]));
  std::vector<std::size_t> items(train.size());
  std::iota(items.begin(), items.end(), std::size_t{0});

  std::vector<CrfInstance> batch;
  auto batch_fn = [&](std::span<const std::size_t> idx) {
    batch.clear();
    for (auto i : idx) batch.push_back(train[i]);
    return crf_loss_grad(params, batch, config.l2);
  };
  auto train_loss = [&] { return crf_mean_nll(params, train); };
  auto dev_loss = [&] { return crf_mean_nll(params, dev); };
  auto h = detail::run_training(params.weights(), items, config, rng, batch_fn, train_loss, dev_loss);
  if (history) *history = std::move(h);
  return params;
}

std::vector<BioTag> crf_tag(const CrfParams& p, std::span<const std::string> tokens) {
  if (tokens.empty()) return {};
  const auto r = crf_viterbi(p, tokens);
  std::vector<BioTag> tags;
  for (int y : r.labels) tags.push_back(static_cast<BioTag>(y));
  return repair_bio(tags);
}

}  // namespace vtriage
