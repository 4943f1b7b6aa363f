#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vtriage/logreg.hpp"

namespace vtriage {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct ClfMetrics {
  ClassMetrics positive;
  ClassMetrics negative;
  double accuracy = 0.0;
  ConfusionCounts counts;
};

/// Per-class P/R/F (the negative class swaps tp with tn and fp with fn) and
/// accuracy (tp + tn) / total. Throws ValidationError on an empty table.
ClfMetrics metrics_from_counts(const ConfusionCounts& c);

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> gold);
ClfMetrics evaluate(std::span<const int> predicted, std::span<const int> gold);

struct ClfEvaluation {
  ClfMetrics metrics;
  std::vector<std::string> video_ids;
  std::vector<Prediction> predictions;
};

/// Scores `model` on its own test ids. Throws ValidationError if none of
/// them are present in `rows`.
ClfEvaluation evaluate_classifier(const LrModel& model, std::span<const FeatureVector> rows);

/// "<0.01", "<0.05", else three decimals.
std::string format_p_value(double p);

/// Coefficient table: `term` column then estimate/p-value pairs, one per
/// model. The intercept comes first, other rows follow the first model's
/// estimates in descending order; a model lacking a term shows "-".
std::string format_coefficient_table(std::span<const LrModel* const> models);

struct MetricRow {
  std::string name;
  ClassMetrics metrics;
  double accuracy = 0.0;
};

/// `row, precision, recall, f_measure, overall_accuracy`, three decimals.
std::string format_metric_table(std::span<const MetricRow> rows);

}  // namespace vtriage
