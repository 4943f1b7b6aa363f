#include "vtriage/clf_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "vtriage/error.hpp"
#include "vtriage/tag_metrics.hpp"

namespace vtriage {

namespace {

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  const TagMetrics m = prf_from_counts({tp, fp, fn});
  return {m.precision, m.recall, m.f_measure};
}

std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);  // no "-0.00"
  return s;
}

}  // namespace

ClfMetrics metrics_from_counts(const ConfusionCounts& c) {
  if (c.total() == 0) throw ValidationError("cannot evaluate on an empty test set");
  ClfMetrics m;
  m.counts = c;
  m.positive = class_metrics(c.tp, c.fp, c.fn);
  m.negative = class_metrics(c.tn, c.fn, c.fp);
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return m;
}

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size())
    throw ValidationError("prediction/gold counts differ: " + std::to_string(predicted.size()) + " vs " +
                          std::to_string(gold.size()));
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] != 0, g = gold[i] != 0;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

ClfMetrics evaluate(std::span<const int> predicted, std::span<const int> gold) {
  return metrics_from_counts(confusion(predicted, gold));
}

ClfEvaluation evaluate_classifier(const LrModel& model, std::span<const FeatureVector> rows) {
  const std::set<std::string> test(model.test_ids.begin(), model.test_ids.end());
  ClfEvaluation ev;
  std::vector<int> pred, gold;
  for (const auto& r : rows) {
    if (!test.count(r.video_id)) continue;
    const auto y = target_label(r, model.spec.target);
    if (!y) continue;
    const Prediction p = predict(model, r);
    ev.video_ids.push_back(r.video_id);
    ev.predictions.push_back(p);
    pred.push_back(p.label);
    gold.push_back(*y);
  }
  if (gold.empty()) throw ValidationError("none of the model's test videos are present in the feature table");
  ev.metrics = evaluate(pred, gold);
  return ev;
}

std::string format_p_value(double p) {
  if (p < 0.01) return "<0.01";
  if (p < 0.05) return "<0.05";
  return fixed(p, 3);
}

std::string format_coefficient_table(std::span<const LrModel* const> models) {
  if (models.empty()) throw ValidationError("no models for the coefficient table");
  std::vector<std::map<Feature, std::size_t>> index(models.size());
  for (std::size_t m = 0; m < models.size(); ++m)
    for (std::size_t j = 0; j < models[m]->spec.features.size(); ++j) index[m][models[m]->spec.features[j]] = j;

  // Rows: first model's terms by estimate descending, then any remaining
  // terms of later models in roster order.
  std::vector<Feature> order = models[0]->spec.features;
  std::vector<double> est = models[0]->coefficients;
  std::vector<std::size_t> perm(order.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return est[a] > est[b]; });
  std::vector<Feature> rows;
  for (auto i : perm) rows.push_back(order[i]);
  for (Feature f : all_features())
    if (!index[0].count(f))
      for (std::size_t m = 1; m < models.size(); ++m)
        if (index[m].count(f)) {
          rows.push_back(f);
          break;
        }

  std::ostringstream out;
  out << "term";
  for (const auto* m : models) out << '\t' << m->spec.name() << "_estimate\t" << m->spec.name() << "_p_value";
  out << '\n' << "(intercept)";
  for (const auto* m : models) out << '\t' << fixed(m->intercept, 2) << '\t' << format_p_value(m->intercept_p);
  out << '\n';
  for (Feature f : rows) {
    out << feature_name(f);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto it = index[m].find(f);
      if (it == index[m].end()) out << "\t-\t-";
      else
        out << '\t' << fixed(models[m]->coefficients[it->second], 2) << '\t'
            << format_p_value(models[m]->p_values[it->second]);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_metric_table(std::span<const MetricRow> rows) {
  std::ostringstream out;
  out << "row\tprecision\trecall\tf_measure\toverall_accuracy\n";
  for (const auto& r : rows)
    out << r.name << '\t' << fixed(r.metrics.precision, 3) << '\t' << fixed(r.metrics.recall, 3) << '\t'
        << fixed(r.metrics.f_measure, 3) << '\t' << fixed(r.accuracy, 3) << '\n';
  return out.str();
}

}  // namespace vtriage
