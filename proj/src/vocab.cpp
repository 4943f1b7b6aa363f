#include "vtriage/vocab.hpp"

#include <algorithm>
#include <map>

#include "vtriage/error.hpp"

namespace vtriage {

Vocab::Vocab() : Vocab(std::vector<std::string>{"<unk>", "<pad>"}) {}

Vocab::Vocab(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.size() < 2 || words_[kUnk] != "<unk>" || words_[kPad] != "<pad>")
    throw ValidationError("vocabulary must start with <unk>, <pad>");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<int>(i)).second)
      throw ValidationError("duplicate vocabulary word '" + words_[i] + "'");
  }
}

int Vocab::id(const std::string& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

Vocab build_vocab(std::span<const TaggedSentence> corpus, int min_count) {
  std::size_t n_tokens = 0;
  std::map<std::string, long> freq;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) ++freq[t];
    n_tokens += s.tokens.size();
  }
  if (n_tokens == 0) throw ValidationError("build_vocab: empty corpus");
  std::vector<std::pair<std::string, long>> kept;
  for (auto& [w, n] : freq)
    if (n >= min_count && w != "<unk>" && w != "<pad>") kept.emplace_back(w, n);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words{"<unk>", "<pad>"};
  for (auto& [w, n] : kept) words.push_back(w);
  return Vocab(std::move(words));
}

}  // namespace vtriage
