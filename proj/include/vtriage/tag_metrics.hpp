#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vtriage/medterm.hpp"

namespace vtriage {

struct PrfCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct TagMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  PrfCounts counts;
};

/// P = tp/(tp+fp), R = tp/(tp+fn), F = 2PR/(P+R); each 0 when its
/// denominator is 0.
TagMetrics prf_from_counts(const PrfCounts& c);

/// Token-level scores on the entity tags (B-MED, I-MED) against O,
/// micro-averaged. Throws ValidationError on length mismatch.
TagMetrics evaluate_tagger(std::span<const std::vector<BioTag>> predictions, std::span<const std::vector<BioTag>> gold);

/// Exact-match span scores, reported alongside the token-level ones.
TagMetrics evaluate_spans(std::span<const std::vector<BioTag>> predictions, std::span<const std::vector<BioTag>> gold);

}  // namespace vtriage
