#include "vtriage/logreg.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/Cholesky>

#include "json.hpp"
#include "vtriage/error.hpp"
#include "vtriage/split.hpp"

namespace vtriage {

using nlohmann::json;

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  return (X * beta.tail(X.cols())).array() + beta[0];
}

void check_shapes(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  if (y.size() != X.rows() || beta.size() != X.cols() + 1)
    throw ValidationError("logistic regression: inconsistent shapes");
  if (X.rows() == 0) throw ValidationError("logistic regression: no rows");
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logreg_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta, double l2) {
  check_shapes(X, y, beta);
  const Eigen::VectorXd eta = linear_predictor(X, beta);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll / static_cast<double>(X.rows()) - 0.5 * l2 * beta.tail(X.cols()).squaredNorm();
}

Eigen::VectorXd logreg_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                                double l2) {
  check_shapes(X, y, beta);
  const Eigen::VectorXd eta = linear_predictor(X, beta);
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r[i] = y[i] - sigmoid(eta[i]);
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd g(beta.size());
  g[0] = r.sum() / n;
  g.tail(X.cols()) = X.transpose() * r / n - l2 * beta.tail(X.cols());
  return g;
}

LogRegFit fit_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double l2, const LogRegOptions& opts) {
  if (X.rows() < 2) throw ValidationError("logistic regression needs at least two rows");
  if (y.size() != X.rows()) throw ValidationError("logistic regression: label count does not match rows");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0) throw ValidationError("logistic regression labels must be 0 or 1");
  const double pos = y.sum();
  if (pos == 0.0 || pos == static_cast<double>(y.size()))
    throw ValidationError("logistic regression needs both classes in the training labels");
  if (!(l2 >= 0.0) || !X.allFinite()) throw ValidationError("logistic regression: invalid l2 or non-finite input");

  const auto n = X.rows(), k = X.cols();
  const double nd = static_cast<double>(n);
  LogRegFit fit;
  fit.beta = Eigen::VectorXd::Zero(k + 1);
  double J = logreg_objective(X, y, fit.beta, l2);
  fit.objective.push_back(J);

  Eigen::MatrixXd Xa(n, k + 1);
  Xa.col(0).setOnes();
  Xa.rightCols(k) = X;

  for (int it = 0;; ++it) {
    const Eigen::VectorXd g = logreg_gradient(X, y, fit.beta, l2);
    fit.gradient_norm = g.norm();
    fit.iterations = it;
    if (fit.gradient_norm <= opts.tolerance) return fit;
    if (it >= opts.max_iterations) break;

    // Negative Hessian of J.
    const Eigen::VectorXd eta = Xa * fit.beta;
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(eta[i]);
      w[i] = p * (1.0 - p);
    }
    Eigen::MatrixXd H = Xa.transpose() * w.asDiagonal() * Xa / nd;
    H.diagonal().tail(k).array() += l2;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step = ldlt.solve(g);
    double slope = g.dot(step);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || !(slope > 0.0)) {
      step = g;  // fall back to steepest ascent
      slope = g.squaredNorm();
    }

    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      const Eigen::VectorXd cand = fit.beta + t * step;
      const double Jc = logreg_objective(X, y, cand, l2);
      if (std::isfinite(Jc) && Jc >= J + 1e-4 * t * slope) {
        fit.beta = cand;
        J = Jc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    fit.objective.push_back(J);
  }
  fit.gradient_norm = logreg_gradient(X, y, fit.beta, l2).norm();
  if (fit.gradient_norm <= opts.tolerance) return fit;
  std::ostringstream msg;
  msg << "logistic regression did not converge after " << fit.iterations << " iterations (gradient norm "
      << fit.gradient_norm << "); try a stronger l2";
  throw NumericError(msg.str());
}

WaldResult wald_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, double l2) {
  const auto n = X.rows(), k = X.cols();
  if (beta.size() != k + 1) throw ValidationError("wald test: coefficient count does not match columns");
  Eigen::MatrixXd Xa(n, k + 1);
  Xa.col(0).setOnes();
  Xa.rightCols(k) = X;
  const Eigen::VectorXd eta = Xa * beta;
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = sigmoid(eta[i]);
    w[i] = p * (1.0 - p);
  }
  Eigen::MatrixXd H = Xa.transpose() * w.asDiagonal() * Xa;
  H.diagonal().tail(k).array() += static_cast<double>(n) * l2;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const auto& ev = eig.eigenvalues();
  if (eig.info() != Eigen::Success || !(ev.minCoeff() > 1e-10 * std::max(1.0, ev.maxCoeff())))
    throw NumericError("information matrix is singular; use a stronger l2 penalty");
  const Eigen::MatrixXd Hinv = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();

  WaldResult r;
  r.se = Hinv.diagonal().cwiseSqrt();
  r.z = beta.cwiseQuotient(r.se);
  r.p.resize(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) r.p[j] = std::erfc(std::abs(r.z[j]) / std::sqrt(2.0));
  return r;
}

Prediction predict(const LrModel& m, const FeatureVector& x) {
  const auto k = m.spec.features.size();
  if (m.coefficients.size() != k || m.scaler.mean.size() != k) throw ValidationError("classifier model is inconsistent");
  double eta = m.intercept;
  for (std::size_t j = 0; j < k; ++j) {
    const double v = x[m.spec.features[j]];
    if (!std::isfinite(v))
      throw ValidationError("video '" + x.video_id + "' is missing feature " +
                            std::string(feature_name(m.spec.features[j])));
    eta += m.coefficients[j] * (v - m.scaler.mean[j]) / m.scaler.sd[j];
  }
  Prediction p;
  p.probability = sigmoid(eta);
  p.label = p.probability >= 0.5 ? 1 : 0;
  return p;
}

LrModel train_classifier(std::span<const FeatureVector> rows, Target target, std::uint64_t seed,
                         double train_fraction, double l2) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("train fraction must lie in (0, 1)");
  std::map<std::string, const FeatureVector*> by_id;
  for (const auto& r : rows) {
    if (!target_label(r, target)) continue;
    if (!by_id.emplace(r.video_id, &r).second) throw ValidationError("duplicate video id '" + r.video_id + "' in features");
  }
  if (by_id.size() < 3) throw ValidationError("need at least three annotated videos to train a classifier");
  std::vector<std::string> ids;
  for (const auto& [id, _] : by_id) ids.push_back(id);
  auto split = split_ids(ids, train_fraction, seed);

  std::vector<FeatureVector> train;
  for (const auto& id : split.train) train.push_back(*by_id.at(id));
  LrModel m;
  m.spec = FeatureSpec::for_target(target);
  m.seed = seed;
  m.train_fraction = train_fraction;
  const Eigen::MatrixXd X = design_matrix(train, m.spec);
  Eigen::VectorXd y(X.rows());
  for (std::size_t i = 0; i < train.size(); ++i) y[static_cast<Eigen::Index>(i)] = *target_label(train[i], target);

  m.l2 = l2 < 0.0 ? 1.0 / static_cast<double>(X.rows()) : l2;
  m.scaler = standardize_fit(X, m.spec.features, &m.warnings);
  const Eigen::MatrixXd Z = m.scaler.apply(X);
  const LogRegFit fit = fit_logreg(Z, y, m.l2);
  const WaldResult wald = wald_test(Z, fit.beta, m.l2);

  m.intercept = fit.beta[0];
  m.intercept_se = wald.se[0];
  m.intercept_p = wald.p[0];
  for (Eigen::Index j = 1; j < fit.beta.size(); ++j) {
    m.coefficients.push_back(fit.beta[j]);
    m.standard_errors.push_back(wald.se[j]);
    m.p_values.push_back(wald.p[j]);
  }
  m.iterations = fit.iterations;
  m.train_ids = std::move(split.train);
  m.test_ids = std::move(split.test);
  return m;
}

std::string LrModel::to_json() const {
  json j;
  j["format"] = "vtriage-classifier";
  j["version"] = kFormatVersion;
  j["target"] = spec.name();
  json feats = json::array();
  for (std::size_t i = 0; i < spec.features.size(); ++i)
    feats.push_back({{"name", feature_name(spec.features[i])},
                     {"mean", scaler.mean[i]},
                     {"sd", scaler.sd[i]},
                     {"estimate", coefficients[i]},
                     {"se", standard_errors[i]},
                     {"p_value", p_values[i]}});
  j["features"] = feats;
  j["intercept"] = {{"estimate", intercept}, {"se", intercept_se}, {"p_value", intercept_p}};
  j["l2"] = l2;
  j["train"] = {{"seed", seed},
                {"train_fraction", train_fraction},
                {"n_train", train_ids.size()},
                {"n_test", test_ids.size()},
                {"train_ids", train_ids},
                {"test_ids", test_ids},
                {"iterations", iterations}};
  j["warnings"] = warnings;
  return j.dump(1);
}

LrModel LrModel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("classifier model: ") + e.what(), e.byte);
  }
  try {
    if (j.value("format", "") != "vtriage-classifier") throw SchemaError("not a classifier model file");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion) throw SchemaError("unsupported classifier model version " + std::to_string(version));
    LrModel m;
    m.spec.target = parse_target(j.at("target").get<std::string>());
    for (const auto& f : j.at("features")) {
      const auto name = f.at("name").get<std::string>();
      const auto feat = feature_from_name(name);
      if (!feat) throw SchemaError("unknown feature '" + name + "' in classifier model");
      m.spec.features.push_back(*feat);
      m.scaler.mean.push_back(f.at("mean").get<double>());
      m.scaler.sd.push_back(f.at("sd").get<double>());
      m.coefficients.push_back(f.at("estimate").get<double>());
      m.standard_errors.push_back(f.at("se").get<double>());
      m.p_values.push_back(f.at("p_value").get<double>());
    }
    m.scaler.features = m.spec.features;
    if (m.spec.features != FeatureSpec::for_target(m.spec.target).features)
      throw SchemaError("classifier model features do not match the " + m.spec.name() + " feature set");
    for (double sd : m.scaler.sd)
      if (!(sd > 0.0)) throw SchemaError("classifier model has a non-positive scale");
    const auto& ic = j.at("intercept");
    m.intercept = ic.at("estimate").get<double>();
    m.intercept_se = ic.at("se").get<double>();
    m.intercept_p = ic.at("p_value").get<double>();
    m.l2 = j.at("l2").get<double>();
    const auto& tr = j.at("train");
    m.seed = tr.at("seed").get<std::uint64_t>();
    m.train_fraction = tr.at("train_fraction").get<double>();
    m.train_ids = tr.at("train_ids").get<std::vector<std::string>>();
    m.test_ids = tr.at("test_ids").get<std::vector<std::string>>();
    m.iterations = tr.at("iterations").get<int>();
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("classifier model: ") + e.what());
  }
}

void LrModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << to_json() << '\n';
}

LrModel LrModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace vtriage
