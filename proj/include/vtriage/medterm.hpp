#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vtriage {

/// The closed set of semantic types a dictionary term may carry.
enum class SemanticType : std::uint8_t {
  topp, dsyn, pshu, bpoc, neop, orch, diap, hlca, chvf, prog, chvs, lbpr, blor,
  inpo, mobd, aapp, hcro, bodm, elii, nnon, hops, cgab, lbtr, bacs, drdd, acab,
  enzy, bdsy, antb, horm, vita, clnd, chem, medd, resa, sosy, inch, patf,
};

inline constexpr std::size_t kSemanticTypeCount = 38;

std::string_view code(SemanticType t);
std::string_view label(SemanticType t);
std::optional<SemanticType> semantic_type_from_code(std::string_view code);
const std::array<SemanticType, kSemanticTypeCount>& all_semantic_types();

enum class BioTag : std::uint8_t { B = 0, I = 1, O = 2 };
inline constexpr std::size_t kNumTags = 3;

std::string_view to_string(BioTag t);  // "B-MED", "I-MED", "O"
BioTag parse_bio_tag(std::string_view s);

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<BioTag> labels;
  bool operator==(const TaggedSentence&) const = default;
};

/// Equal lengths and no I-MED after O or at sentence start.
bool is_well_formed_bio(std::span<const BioTag> labels);
/// Turns every I-MED that opens a span into B-MED.
std::vector<BioTag> repair_bio(std::span<const BioTag> labels);

/// Strip punctuation and symbols, split on whitespace, lowercase, drop
/// stopwords, keep words longer than three characters.
std::set<std::string> clean_terms(std::span<const std::string> raw_terms, const std::set<std::string>& stopwords);

std::set<std::string> load_stopwords(const std::string& path);

enum class ProjectionMode { phrase, word };

/// Cleaned term -> semantic types. Keys with a space are multi-word phrases
/// kept whole for projection; the rest are single cleaned words.
class TermDictionary {
 public:
  using Entries = std::map<std::string, std::set<SemanticType>>;

  TermDictionary() = default;
  explicit TermDictionary(Entries entries);

  const Entries& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  std::size_t max_phrase_len() const { return max_len_; }

  /// Adds `raw_term` under `type`: its cleaned words, plus the whole
  /// normalized phrase when it spans several tokens.
  void add(std::string_view raw_term, SemanticType type, const std::set<std::string>& stopwords);

 private:
  Entries entries_;
  std::size_t max_len_ = 0;
};

struct DictionaryLoadReport {
  std::size_t rows = 0;
  std::size_t kept_rows = 0;
  std::size_t disallowed_rows = 0;
  std::vector<std::string> warnings;
};

/// TSV rows `term<TAB>code`. Unknown codes are skipped with a warning;
/// rows whose code is outside `allowed` are dropped; malformed rows throw
/// with their line number.
TermDictionary load_dictionary(const std::string& path, const std::set<SemanticType>& allowed,
                               const std::set<std::string>& stopwords, DictionaryLoadReport* report = nullptr);

/// Longest-match, left-to-right, non-overlapping projection of dictionary
/// keys onto token sequences.
std::vector<TaggedSentence> project_labels(const TermDictionary& dict,
                                           std::span<const std::vector<std::string>> sentences,
                                           ProjectionMode mode = ProjectionMode::phrase);
TaggedSentence project_sentence(const TermDictionary& dict, std::span<const std::string> tokens,
                                ProjectionMode mode = ProjectionMode::phrase);

/// Surface forms of the complete B/I spans of one sentence.
std::vector<std::string> extract_spans(const TaggedSentence& s);

/// Distinct span surface forms across one video's sentences, case-insensitive.
std::size_t unique_medical_terms(std::span<const TaggedSentence> tagged);

/// A tagged document (one video) for CoNLL-style corpora.
struct TaggedDocument {
  std::string doc_id;
  std::vector<TaggedSentence> sentences;
};

/// `token<TAB>tag` per line, blank line between sentences, and a
/// `-DOCSTART-<TAB>id` line opening each document.
void write_conll(const std::string& path, std::span<const TaggedDocument> docs);
std::vector<TaggedDocument> read_conll(const std::string& path);

}  // namespace vtriage
