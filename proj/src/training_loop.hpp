#pragma once

// Shared mini-batch loop for the two taggers.

#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vtriage/error.hpp"
#include "vtriage/rng.hpp"
#include "vtriage/train_config.hpp"

namespace vtriage::detail {

/// Shuffles item indices with `rng` and holds out the tail as a dev slice.
struct DevSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
};

inline DevSplit holdout(std::size_t n, double dev_fraction, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(idx));
  std::size_t n_dev = static_cast<std::size_t>(std::lround(dev_fraction * static_cast<double>(n)));
  if (n_dev == 0) n_dev = 1;
  if (n_dev >= n) n_dev = n - 1;
  DevSplit s;
  s.train.assign(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(n_dev));
  s.dev.assign(idx.end() - static_cast<std::ptrdiff_t>(n_dev), idx.end());
  return s;
}

/// `batch_loss_grad(indices)` returns {loss, grad}; `train_loss()` and
/// `dev_loss()` evaluate the current `params`. Keeps the parameters with the
/// lowest dev loss.
template <typename BatchFn, typename TrainLossFn, typename DevLossFn>
TrainHistory run_training(Eigen::VectorXd& params, const std::vector<std::size_t>& train_items,
                          const TrainConfig& cfg, Rng& rng, BatchFn batch_loss_grad, TrainLossFn train_loss,
                          DevLossFn dev_loss) {
  TrainHistory h;
  Optimizer opt(cfg.optimizer, cfg.learning_rate, params.size());
  double best = dev_loss();
  Eigen::VectorXd best_params = params;
  h.train_loss.push_back(train_loss());
  h.dev_loss.push_back(best);
  if (!std::isfinite(best) || !std::isfinite(h.train_loss.back()))
    throw NumericError("loss is non-finite before training (epoch 0)");

  std::vector<std::size_t> order = train_items;
  int since_best = 0;
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      auto [loss, grad] = batch_loss_grad(std::span<const std::size_t>(order.data() + start, end - start));
      if (!std::isfinite(loss) || !grad.allFinite())
        throw NumericError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
      clip_by_norm(grad, cfg.clip_norm);
      opt.step(params, grad);
    }
    const double tl = train_loss();
    const double dl = dev_loss();
    if (!std::isfinite(tl) || !std::isfinite(dl) || !params.allFinite())
      throw NumericError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
    h.train_loss.push_back(tl);
    h.dev_loss.push_back(dl);
    h.epochs_run = epoch;
    if (dl < best) {
      best = dl;
      best_params = params;
      h.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  params = best_params;
  return h;
}

}  // namespace vtriage::detail
