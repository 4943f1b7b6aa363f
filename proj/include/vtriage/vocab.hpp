#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vtriage/medterm.hpp"

namespace vtriage {

class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;

  Vocab();
  /// Rebuilds from an id-ordered word list whose first two entries are the
  /// reserved tokens.
  explicit Vocab(std::vector<std::string> words);

  int id(const std::string& word) const;
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }
  std::vector<int> encode(std::span<const std::string> tokens) const;

  bool operator==(const Vocab& o) const { return words_ == o.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

/// Words seen fewer than `min_count` times map to UNK. Ids follow
/// (frequency desc, word asc). Throws ValidationError on an empty corpus.
Vocab build_vocab(std::span<const TaggedSentence> corpus, int min_count);

}  // namespace vtriage
