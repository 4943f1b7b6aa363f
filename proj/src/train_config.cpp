#include "vtriage/train_config.hpp"

#include <cmath>

#include "vtriage/error.hpp"

namespace vtriage {

void TrainConfig::validate() const {
  auto positive = [](bool ok, const char* name) {
    if (!ok) throw ValidationError(std::string("train config: '") + name + "' must be positive");
  };
  positive(epochs > 0, "epochs");
  positive(learning_rate > 0.0, "learning_rate");
  positive(l2 >= 0.0, "l2");
  positive(batch_size > 0, "batch_size");
  positive(d_emb > 0, "d_emb");
  positive(d_hid > 0, "d_hid");
  positive(clip_norm > 0.0, "clip_norm");
  positive(patience > 0, "patience");
  positive(min_count > 0, "min_count");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) throw ValidationError("train config: 'dev_fraction' must lie in (0,1)");
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  throw ValidationError("unknown optimizer '" + s + "' (expected adam or sgd)");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, Eigen::Index n_params)
    : kind_(kind), lr_(learning_rate) {
  if (kind_ == OptimizerKind::adam) {
    m_ = Eigen::VectorXd::Zero(n_params);
    v_ = Eigen::VectorXd::Zero(n_params);
  }
}

void Optimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (kind_ == OptimizerKind::sgd) {
    params -= lr_ * grad;
    return;
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++t_;
  m_ = beta1 * m_ + (1.0 - beta1) * grad;
  v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps);
}

double clip_by_norm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm) grad *= max_norm / norm;
  return norm;
}

}  // namespace vtriage
