#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vtriage/features.hpp"

namespace vtriage {

/// Regularized mean log-likelihood
///   J(b) = (1/n) sum_i [y_i eta_i - log(1 + exp(eta_i))] - (l2/2) |b_{1..}|^2
/// with eta = b_0 + X b_{1..}. The intercept b_0 is not penalized.
double logreg_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta, double l2);

/// dJ/db = [1 X]^T (y - p) / n - l2 * [0; b_{1..}].
Eigen::VectorXd logreg_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                double l2);

struct LogRegOptions {
  double tolerance = 1e-8;  // on the gradient norm
  int max_iterations = 200;
};

struct LogRegFit {
  Eigen::VectorXd beta;  // intercept first
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> objective;  // per iteration, starting at b = 0
};

/// Maximizes J from b = 0 by Newton steps with backtracking, so J never
/// decreases. Throws ValidationError unless y holds both classes and
/// NumericError if the tolerance is not reached.
LogRegFit fit_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l2, const LogRegOptions& opts = {});

struct WaldResult {
  Eigen::VectorXd se;  // intercept first
  Eigen::VectorXd z;
  Eigen::VectorXd p;
};

/// Standard errors from the inverse of X^T W X + n*l2*diag(0, 1, ..., 1)
/// (the information of the penalized sum log-likelihood), two-sided normal
/// p-values. Throws NumericError if the matrix is singular.
WaldResult wald_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, double l2);

double sigmoid(double x);

struct LrModel {
  static constexpr int kFormatVersion = 1;

  FeatureSpec spec;
  Scaler scaler;
  double l2 = 0.0;
  double intercept = 0.0;
  std::vector<double> coefficients;  // spec order, standardized scale
  double intercept_se = 0.0;
  double intercept_p = 1.0;
  std::vector<double> standard_errors;
  std::vector<double> p_values;

  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  int iterations = 0;
  std::vector<std::string> warnings;

  std::string to_json() const;
  static LrModel from_json(const std::string& text);
  void save(const std::string& path) const;
  static LrModel load(const std::string& path);
};

struct Prediction {
  double probability = 0.5;
  int label = 1;
};

/// p = sigmoid(intercept + b . standardized(x)), label 1 iff p >= 0.5.
/// Throws ValidationError naming the first missing feature.
Prediction predict(const LrModel& m, const FeatureVector& x);

/// Splits the rows annotated for `target` 80/20 by seeded shuffle of video
/// ids, fits the scaler and the model on the training side and attaches
/// Wald statistics. A negative `l2` selects 1/n_train.
LrModel train_classifier(std::span<const FeatureVector> rows, Target target, std::uint64_t seed,
                         double train_fraction = 0.8, double l2 = -1.0);

}  // namespace vtriage
