#include "vtriage/split.hpp"

#include <algorithm>
#include <cmath>

#include "vtriage/error.hpp"
#include "vtriage/rng.hpp"

namespace vtriage {

TrainTestSplit split_ids(std::vector<std::string> ids, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("split fraction must lie in (0,1)");
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ids));
  const std::size_t n = ids.size();
  auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
  if (n >= 2) n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  TrainTestSplit s;
  s.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, n)));
  s.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, n)), ids.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace vtriage
