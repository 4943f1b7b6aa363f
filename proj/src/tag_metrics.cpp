#include "vtriage/tag_metrics.hpp"

#include <set>
#include <string>
#include <utility>

#include "vtriage/error.hpp"

namespace vtriage {

namespace {

void check_aligned(std::span<const std::vector<BioTag>> predictions, std::span<const std::vector<BioTag>> gold) {
  if (predictions.size() != gold.size())
    throw ValidationError("prediction/gold sentence counts differ: " + std::to_string(predictions.size()) + " vs " +
                          std::to_string(gold.size()));
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (predictions[i].size() != gold[i].size())
      throw ValidationError("prediction/gold lengths differ in sentence " + std::to_string(i));
}

std::set<std::pair<std::size_t, std::size_t>> spans(const std::vector<BioTag>& tags) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  bool open = false;
  for (std::size_t i = 0; i <= tags.size(); ++i) {
    const BioTag t = i < tags.size() ? tags[i] : BioTag::O;
    const bool continues = open && t == BioTag::I;
    if (open && !continues) {
      out.emplace(start, i);
      open = false;
    }
    if (t == BioTag::B || (t == BioTag::I && !open)) {
      start = i;
      open = true;
    }
  }
  return out;
}

}  // namespace

TagMetrics prf_from_counts(const PrfCounts& c) {
  TagMetrics m;
  m.counts = c;
  const double tp = static_cast<double>(c.tp);
  m.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f_measure = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

TagMetrics evaluate_tagger(std::span<const std::vector<BioTag>> predictions, std::span<const std::vector<BioTag>> gold) {
  check_aligned(predictions, gold);
  PrfCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i)
    for (std::size_t t = 0; t < gold[i].size(); ++t) {
      const BioTag p = predictions[i][t], g = gold[i][t];
      if (p != BioTag::O && p == g) ++c.tp;
      if (p != BioTag::O && p != g) ++c.fp;
      if (g != BioTag::O && p != g) ++c.fn;
    }
  return prf_from_counts(c);
}

TagMetrics evaluate_spans(std::span<const std::vector<BioTag>> predictions, std::span<const std::vector<BioTag>> gold) {
  check_aligned(predictions, gold);
  PrfCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto ps = spans(predictions[i]), gs = spans(gold[i]);
    for (const auto& s : ps) (gs.count(s) ? c.tp : c.fp) += 1;
    for (const auto& s : gs)
      if (!ps.count(s)) ++c.fn;
  }
  return prf_from_counts(c);
}

}  // namespace vtriage
