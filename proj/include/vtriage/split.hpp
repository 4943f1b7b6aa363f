#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vtriage {

struct TrainTestSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Seeded shuffle of the sorted ids, first round(fraction * n) to train.
/// Both sides are non-empty whenever there are at least two ids.
TrainTestSplit split_ids(std::vector<std::string> ids, double train_fraction, std::uint64_t seed);

}  // namespace vtriage
