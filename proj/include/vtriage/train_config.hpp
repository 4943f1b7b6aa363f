#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vtriage {

enum class OptimizerKind { adam, sgd };

/// Tagger training hyperparameters. Defaults are sized for desk-scale
/// corpora; every model file records the values it was trained with.
struct TrainConfig {
  std::uint64_t seed = 0;
  int epochs = 30;
  double learning_rate = 0.01;
  double l2 = 1e-4;
  int batch_size = 16;
  int d_emb = 50;
  int d_hid = 64;
  double clip_norm = 5.0;
  int patience = 5;
  double dev_fraction = 0.1;
  int min_count = 1;
  OptimizerKind optimizer = OptimizerKind::adam;

  /// Throws ValidationError for non-positive sizes or rates.
  void validate() const;
};

std::string to_string(OptimizerKind k);
OptimizerKind parse_optimizer(const std::string& s);

/// Per-epoch record of a training run. Index 0 is the untrained model.
struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> dev_loss;
  int best_epoch = 0;
  int epochs_run = 0;
};

/// Mini-batch first-order update over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, Eigen::Index n_params);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

 private:
  OptimizerKind kind_;
  double lr_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

/// Rescales `grad` in place so its L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
double clip_by_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace vtriage
