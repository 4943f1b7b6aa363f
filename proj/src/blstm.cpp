#include "vtriage/blstm.hpp"

#include <cmath>

#include "training_loop.hpp"
#include "vtriage/error.hpp"
#include "vtriage/rng.hpp"

namespace vtriage {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

BlstmParams::BlstmParams(const BlstmDims& dims) : dims_(dims) {
  if (dims.vocab < 2 || dims.d_emb <= 0 || dims.d_hid <= 0 || dims.n_labels <= 0)
    throw ValidationError("BLSTM dimensions must be positive (vocab >= 2)");
  const Index e = dims.d_emb, h = dims.d_hid, l = dims.n_labels;
  Index offset = 0;
  auto add = [&](std::string name, Index rows, Index cols) {
    slots_.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  add("embedding", e, dims.vocab);
  add("fwd_gates", 4 * h, e + h);
  add("fwd_gate_bias", 4 * h, 1);
  add("bwd_gates", 4 * h, e + h);
  add("bwd_gate_bias", 4 * h, 1);
  add("output", l, 2 * h);
  add("output_bias", l, 1);
  flat_ = VectorXd::Zero(offset);
}

const TensorSlot& BlstmParams::slot(const std::string& name) const {
  for (const auto& s : slots_)
    if (s.name == name) return s;
  throw ValidationError("no BLSTM tensor named '" + name + "'");
}

void BlstmParams::init_random(std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (Index i = 0; i < flat_.size(); ++i) flat_[i] = rng.uniform(-scale, scale);
  const Index h = dims_.d_hid;
  for (int dir = 0; dir < 2; ++dir) {
    auto b = gate_bias(dir);
    b.setZero();
    b.segment(h, h).setOnes();
  }
  output_bias().setZero();
}

namespace {

VectorXd sigmoid(const VectorXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

// Activations of one direction, column t = sequence position t.
struct DirectionCache {
  MatrixXd in, forget, out, cand, cell, cell_tanh, hidden;
};

// dir 0 runs left-to-right, dir 1 right-to-left.
DirectionCache run_direction(const BlstmParams& p, int dir, const MatrixXd& x) {
  const Index h = p.dims().d_hid, e = p.dims().d_emb, n = x.cols();
  const auto w = p.gates(dir);
  const auto b = p.gate_bias(dir);
  DirectionCache c;
  for (MatrixXd* m : {&c.in, &c.forget, &c.out, &c.cand, &c.cell, &c.cell_tanh, &c.hidden}) m->resize(h, n);
  VectorXd h_prev = VectorXd::Zero(h), c_prev = VectorXd::Zero(h);
  VectorXd xh(e + h);
  for (Index s = 0; s < n; ++s) {
    const Index t = dir == 0 ? s : n - 1 - s;
    xh.head(e) = x.col(t);
    xh.tail(h) = h_prev;
    const VectorXd z = w * xh + b;
    c.in.col(t) = sigmoid(z.segment(0, h));
    c.forget.col(t) = sigmoid(z.segment(h, h));
    c.out.col(t) = sigmoid(z.segment(2 * h, h));
    c.cand.col(t) = z.segment(3 * h, h).array().tanh();
    c.cell.col(t) = c.forget.col(t).cwiseProduct(c_prev) + c.in.col(t).cwiseProduct(c.cand.col(t));
    c.cell_tanh.col(t) = c.cell.col(t).array().tanh();
    c.hidden.col(t) = c.out.col(t).cwiseProduct(c.cell_tanh.col(t));
    h_prev = c.hidden.col(t);
    c_prev = c.cell.col(t);
  }
  return c;
}

MatrixXd embed(const BlstmParams& p, std::span<const int> ids) {
  if (ids.empty()) throw ValidationError("BLSTM input sequence is empty");
  MatrixXd x(p.dims().d_emb, static_cast<Index>(ids.size()));
  const auto emb = p.embedding();
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= p.dims().vocab)
      throw ValidationError("token id " + std::to_string(ids[t]) + " out of range for vocabulary of size " +
                            std::to_string(p.dims().vocab));
    x.col(static_cast<Index>(t)) = emb.col(ids[t]);
  }
  return x;
}

struct ForwardPass {
  MatrixXd x;
  DirectionCache dirs[2];
  MatrixXd states;    // 2h x n
  MatrixXd log_prob;  // labels x n
};

ForwardPass forward(const BlstmParams& p, std::span<const int> ids) {
  ForwardPass f;
  f.x = embed(p, ids);
  f.dirs[0] = run_direction(p, 0, f.x);
  f.dirs[1] = run_direction(p, 1, f.x);
  const Index h = p.dims().d_hid, n = f.x.cols();
  f.states.resize(2 * h, n);
  f.states.topRows(h) = f.dirs[0].hidden;
  f.states.bottomRows(h) = f.dirs[1].hidden;
  MatrixXd scores = p.output() * f.states;
  scores.colwise() += p.output_bias();
  f.log_prob.resize(scores.rows(), n);
  for (Index t = 0; t < n; ++t) {
    const double m = scores.col(t).maxCoeff();
    const double lse = m + std::log((scores.col(t).array() - m).exp().sum());
    f.log_prob.col(t) = scores.col(t).array() - lse;
  }
  return f;
}

// Accumulates into `grad` the gradient of one direction given dL/dh for
// every position, and adds dL/dx into `d_x`.
void backward_direction(const BlstmParams& p, int dir, const MatrixXd& x,
                        const DirectionCache& c, const MatrixXd& d_hidden, VectorXd& grad, MatrixXd& d_x) {
  const Index h = p.dims().d_hid, e = p.dims().d_emb, n = x.cols();
  const auto w = p.gates(dir);
  const auto& ws = p.slots()[1 + 2 * dir];
  const auto& bs = p.slots()[2 + 2 * dir];
  Eigen::Map<MatrixXd> dw(grad.data() + ws.offset, ws.rows, ws.cols);
  Eigen::Map<VectorXd> db(grad.data() + bs.offset, bs.size());

  VectorXd dh_next = VectorXd::Zero(h), dc_next = VectorXd::Zero(h);
  VectorXd dz(4 * h), xh(e + h);
  for (Index s = n - 1; s >= 0; --s) {
    const Index t = dir == 0 ? s : n - 1 - s;
    const bool first = s == 0;
    const Index prev = dir == 0 ? t - 1 : t + 1;
    const VectorXd h_prev = first ? VectorXd::Zero(h) : VectorXd(c.hidden.col(prev));
    const VectorXd c_prev = first ? VectorXd::Zero(h) : VectorXd(c.cell.col(prev));

    const VectorXd dh = d_hidden.col(t) + dh_next;
    const auto i = c.in.col(t).array(), f = c.forget.col(t).array(), o = c.out.col(t).array(),
               g = c.cand.col(t).array(), tc = c.cell_tanh.col(t).array();
    const Eigen::ArrayXd dc = dc_next.array() + dh.array() * o * (1.0 - tc * tc);
    dz.segment(0, h) = (dc * g * i * (1.0 - i)).matrix();
    dz.segment(h, h) = (dc * c_prev.array() * f * (1.0 - f)).matrix();
    dz.segment(2 * h, h) = (dh.array() * tc * o * (1.0 - o)).matrix();
    dz.segment(3 * h, h) = (dc * i * (1.0 - g * g)).matrix();

    xh.head(e) = x.col(t);
    xh.tail(h) = h_prev;
    dw.noalias() += dz * xh.transpose();
    db += dz;
    const VectorXd dxh = w.transpose() * dz;
    d_x.col(t) += dxh.head(e);
    dh_next = dxh.tail(h);
    dc_next = (dc * f).matrix();
  }
}

}  // namespace

Eigen::MatrixXd blstm_forward(const BlstmParams& p, std::span<const int> token_ids) {
  return forward(p, token_ids).log_prob;
}

std::vector<EncodedSentence> encode_corpus(std::span<const TaggedSentence> corpus, const Vocab& vocab) {
  std::vector<EncodedSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    if (s.tokens.size() != s.labels.size()) throw ValidationError("sentence has mismatched token and label counts");
    EncodedSentence e;
    e.ids = vocab.encode(s.tokens);
    for (BioTag t : s.labels) e.labels.push_back(static_cast<int>(t));
    out.push_back(std::move(e));
  }
  return out;
}

LossGrad blstm_loss_grad(const BlstmParams& p, std::span<const EncodedSentence> batch, double l2) {
  if (batch.empty()) throw ValidationError("blstm_loss_grad: empty batch");
  std::size_t n_tokens = 0;
  for (const auto& s : batch) n_tokens += s.ids.size();
  if (n_tokens == 0) throw ValidationError("blstm_loss_grad: batch has no tokens");
  const double scale = 1.0 / static_cast<double>(n_tokens);
  const Index h = p.dims().d_hid;

  LossGrad out;
  out.grad = VectorXd::Zero(p.flat().size());
  const auto& emb_slot = p.slots()[0];
  const auto& out_slot = p.slots()[5];
  const auto& outb_slot = p.slots()[6];
  Eigen::Map<MatrixXd> d_emb(out.grad.data() + emb_slot.offset, emb_slot.rows, emb_slot.cols);
  Eigen::Map<MatrixXd> d_out(out.grad.data() + out_slot.offset, out_slot.rows, out_slot.cols);
  Eigen::Map<VectorXd> d_outb(out.grad.data() + outb_slot.offset, outb_slot.size());

  double nll = 0.0;
  for (const auto& s : batch) {
    const ForwardPass f = forward(p, s.ids);
    const Index n = f.x.cols();
    MatrixXd d_scores = f.log_prob.array().exp();
    for (Index t = 0; t < n; ++t) {
      const int y = s.labels[static_cast<std::size_t>(t)];
      nll -= f.log_prob(y, t);
      d_scores(y, t) -= 1.0;
    }
    d_scores *= scale;
    d_out.noalias() += d_scores * f.states.transpose();
    d_outb += d_scores.rowwise().sum();
    const MatrixXd d_states = p.output().transpose() * d_scores;
    MatrixXd d_x = MatrixXd::Zero(f.x.rows(), n);
    backward_direction(p, 0, f.x, f.dirs[0], d_states.topRows(h), out.grad, d_x);
    backward_direction(p, 1, f.x, f.dirs[1], d_states.bottomRows(h), out.grad, d_x);
    for (Index t = 0; t < n; ++t) d_emb.col(s.ids[static_cast<std::size_t>(t)]) += d_x.col(t);
  }
  out.loss = nll * scale + l2 * p.flat().squaredNorm();
  out.grad += 2.0 * l2 * p.flat();
  return out;
}

LossGrad blstm_loss_grad(const BlstmParams& p, std::span<const TaggedSentence> batch, const Vocab& vocab, double l2) {
  const auto enc = encode_corpus(batch, vocab);
  return blstm_loss_grad(p, enc, l2);
}

double blstm_mean_nll(const BlstmParams& p, std::span<const EncodedSentence> data) {
  double nll = 0.0;
  std::size_t n = 0;
  for (const auto& s : data) {
    const MatrixXd lp = blstm_forward(p, s.ids);
    for (std::size_t t = 0; t < s.ids.size(); ++t) nll -= lp(s.labels[t], static_cast<Index>(t));
    n += s.ids.size();
  }
  return n == 0 ? 0.0 : nll / static_cast<double>(n);
}

std::vector<BioTag> blstm_predict(const BlstmParams& p, std::span<const int> token_ids) {
  const MatrixXd lp = blstm_forward(p, token_ids);
  std::vector<BioTag> tags(token_ids.size());
  for (Index t = 0; t < lp.cols(); ++t) {
    Index best = 0;
    for (Index k = 1; k < lp.rows(); ++k)
      if (lp(k, t) > lp(best, t)) best = k;  // ties keep the lower label id
    tags[static_cast<std::size_t>(t)] = static_cast<BioTag>(best);
  }
  return repair_bio(tags);
}

std::vector<BioTag> BlstmModel::tag(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  return blstm_predict(params, vocab.encode(tokens));
}

BlstmModel train_blstm(std::span<const TaggedSentence> corpus, const TrainConfig& config, TrainHistory* history) {
  config.validate();
  if (corpus.size() < 2) throw ValidationError("train_blstm needs at least 2 sentences");
  Rng rng(config.seed);
  const auto split = detail::holdout(corpus.size(), config.dev_fraction, rng);

  std::vector<TaggedSentence> train_sents;
  for (auto i : split.train) train_sents.push_back(corpus[i]);
  BlstmModel model;
  model.vocab = build_vocab(train_sents, config.min_count);
  model.params = BlstmParams(BlstmDims{model.vocab.size(), config.d_emb, config.d_hid});
  model.params.init_random(rng.next());

  const auto encoded = encode_corpus(corpus, model.vocab);
  std::vector<EncodedSentence> train_enc, dev_enc;
  for (auto i : split.train) train_enc.push_back(encoded[i]);
  for (auto i : split.dev) dev_enc.push_back(encoded[i]);
  std::vector<std::size_t> items(train_enc.size());
  std::iota(items.begin(), items.end(), std::size_t{0});

  std::vector<EncodedSentence> batch;
  auto batch_fn = [&](std::span<const std::size_t> idx) {
    batch.clear();
    for (auto i : idx) batch.push_back(train_enc[i]);
    return blstm_loss_grad(model.params, batch, config.l2);
  };
  auto train_loss = [&] { return blstm_mean_nll(model.params, train_enc); };
  auto dev_loss = [&] { return blstm_mean_nll(model.params, dev_enc); };
  auto h = detail::run_training(model.params.flat(), items, config, rng, batch_fn, train_loss, dev_loss);
  if (history) *history = std::move(h);
  return model;
}

}  // namespace vtriage
