#include "vtriage/medterm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vtriage/error.hpp"
#include "vtriage/textfeat.hpp"

namespace vtriage {

namespace {

struct TypeInfo {
  SemanticType type;
  std::string_view code;
  std::string_view label;
};

constexpr std::array<TypeInfo, kSemanticTypeCount> kTypes = {{
    {SemanticType::topp, "topp", "Therapeutic or Preventive Procedure"},
    {SemanticType::dsyn, "dsyn", "Disease or Syndrome"},
    {SemanticType::pshu, "pshu", "Pharmacologic Substance"},
    {SemanticType::bpoc, "bpoc", "Body Part, Organ, or Organ Component"},
    {SemanticType::neop, "neop", "Neoplastic Process"},
    {SemanticType::orch, "orch", "Organic Chemical"},
    {SemanticType::diap, "diap", "Diagnostic Procedure"},
    {SemanticType::hlca, "hlca", "Health Care Activity"},
    {SemanticType::chvf, "chvf", "Chemical Viewed Functionally"},
    {SemanticType::prog, "prog", "Professional or Occupational Group"},
    {SemanticType::chvs, "chvs", "Chemical Viewed Structurally"},
    {SemanticType::lbpr, "lbpr", "Laboratory Procedure"},
    {SemanticType::blor, "blor", "Body Location or Region"},
    {SemanticType::inpo, "inpo", "Injury or Poisoning"},
    {SemanticType::mobd, "mobd", "Mental or Behavioral Dysfunction"},
    {SemanticType::aapp, "aapp", "Amino Acid, Peptide, or Protein"},
    {SemanticType::hcro, "hcro", "Health Care Related Organization"},
    {SemanticType::bodm, "bodm", "Biomedical or Dental Material"},
    {SemanticType::elii, "elii", "Element, Ion, or Isotope"},
    {SemanticType::nnon, "nnon", "Nucleic Acid, Nucleoside, or Nucleotide"},
    {SemanticType::hops, "hops", "Hazardous or Poisonous Substance"},
    {SemanticType::cgab, "cgab", "Congenital Abnormality"},
    {SemanticType::lbtr, "lbtr", "Laboratory or Test Result"},
    {SemanticType::bacs, "bacs", "Biologically Active Substance"},
    {SemanticType::drdd, "drdd", "Drug Delivery Device"},
    {SemanticType::acab, "acab", "Acquired Abnormality"},
    {SemanticType::enzy, "enzy", "Enzyme"},
    {SemanticType::bdsy, "bdsy", "Body System"},
    {SemanticType::antb, "antb", "Antibiotic"},
    {SemanticType::horm, "horm", "Hormone"},
    {SemanticType::vita, "vita", "Vitamin"},
    {SemanticType::clnd, "clnd", "Clinical Drug"},
    {SemanticType::chem, "chem", "Chemical"},
    {SemanticType::medd, "medd", "Medical Device"},
    {SemanticType::resa, "resa", "Research Activity"},
    {SemanticType::sosy, "sosy", "Sign or Symptom"},
    {SemanticType::inch, "inch", "Inorganic Chemical"},
    {SemanticType::patf, "patf", "Pathologic Function"},
}};

std::string join(std::span<const std::string> tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view code(SemanticType t) { return kTypes[static_cast<std::size_t>(t)].code; }
std::string_view label(SemanticType t) { return kTypes[static_cast<std::size_t>(t)].label; }

std::optional<SemanticType> semantic_type_from_code(std::string_view c) {
  for (const auto& info : kTypes)
    if (info.code == c) return info.type;
  return std::nullopt;
}

const std::array<SemanticType, kSemanticTypeCount>& all_semantic_types() {
  static const auto all = [] {
    std::array<SemanticType, kSemanticTypeCount> a{};
    for (std::size_t i = 0; i < kSemanticTypeCount; ++i) a[i] = kTypes[i].type;
    return a;
  }();
  return all;
}

std::string_view to_string(BioTag t) {
  switch (t) {
    case BioTag::B: return "B-MED";
    case BioTag::I: return "I-MED";
    case BioTag::O: return "O";
  }
  return "O";
}

BioTag parse_bio_tag(std::string_view s) {
  if (s == "B-MED") return BioTag::B;
  if (s == "I-MED") return BioTag::I;
  if (s == "O") return BioTag::O;
  throw ValidationError("unknown tag '" + std::string(s) + "' (expected B-MED, I-MED or O)");
}

bool is_well_formed_bio(std::span<const BioTag> labels) {
  BioTag prev = BioTag::O;
  for (BioTag t : labels) {
    if (t == BioTag::I && prev == BioTag::O) return false;
    prev = t;
  }
  return true;
}

std::vector<BioTag> repair_bio(std::span<const BioTag> labels) {
  std::vector<BioTag> out(labels.begin(), labels.end());
  BioTag prev = BioTag::O;
  for (auto& t : out) {
    if (t == BioTag::I && prev == BioTag::O) t = BioTag::B;
    prev = t;
  }
  return out;
}

std::set<std::string> clean_terms(std::span<const std::string> raw_terms, const std::set<std::string>& stopwords) {
  std::set<std::string> out;
  for (const auto& raw : raw_terms) {
    std::string word;
    auto emit = [&] {
      if (!word.empty() && utf8_length(word) > 3 && !stopwords.count(word)) out.insert(word);
      word.clear();
    };
    for (char ch : raw) {
      const auto c = static_cast<unsigned char>(ch);
      if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
        word += ch;
      } else if (c >= 'A' && c <= 'Z') {
        word += static_cast<char>(c - 'A' + 'a');
      } else {
        // Whitespace, punctuation and symbols all separate words.
        emit();
      }
    }
    emit();
  }
  return out;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword list: " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string w = trim(line);
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!w.empty()) out.insert(std::move(w));
  }
  return out;
}

TermDictionary::TermDictionary(Entries entries) : entries_(std::move(entries)) {
  for (const auto& [key, types] : entries_)
    max_len_ = std::max<std::size_t>(max_len_, 1 + static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')));
}

void TermDictionary::add(std::string_view raw_term, SemanticType type, const std::set<std::string>& stopwords) {
  const std::string raw(raw_term);
  for (const auto& w : clean_terms(std::span<const std::string>(&raw, 1), stopwords)) {
    entries_[w].insert(type);
    max_len_ = std::max<std::size_t>(max_len_, 1);
  }
  const auto tokens = tokenize(raw_term).tokens;
  if (tokens.size() >= 2) {
    entries_[join(tokens)].insert(type);
    max_len_ = std::max(max_len_, tokens.size());
  }
}

TermDictionary load_dictionary(const std::string& path, const std::set<SemanticType>& allowed,
                               const std::set<std::string>& stopwords, DictionaryLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dictionary: " + path);
  DictionaryLoadReport rep;
  TermDictionary dict;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    ++rep.rows;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed row, expected term<TAB>semtype");
    const std::string term = trim(std::string_view(line).substr(0, tab));
    std::string c = trim(std::string_view(line).substr(tab + 1));
    std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (term.empty() || c.empty())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed row, empty term or semantic type");
    const auto type = semantic_type_from_code(c);
    if (!type) {
      rep.warnings.push_back(path + ":" + std::to_string(lineno) + ": unknown semantic type '" + c + "', row skipped");
      continue;
    }
    if (!allowed.count(*type)) {
      ++rep.disallowed_rows;
      continue;
    }
    ++rep.kept_rows;
    dict.add(term, *type, stopwords);
  }
  if (report) *report = std::move(rep);
  return dict;
}

TaggedSentence project_sentence(const TermDictionary& dict, std::span<const std::string> tokens, ProjectionMode mode) {
  TaggedSentence out;
  out.tokens.assign(tokens.begin(), tokens.end());
  out.labels.assign(tokens.size(), BioTag::O);
  const std::size_t max_len = mode == ProjectionMode::word ? 1 : dict.max_phrase_len();
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(max_len, tokens.size() - i); len >= 1; --len) {
      if (dict.contains(join(tokens.subspan(i, len)))) {
        matched = len;
        break;
      }
    }
    if (matched == 0) {
      ++i;
      continue;
    }
    out.labels[i] = BioTag::B;
    for (std::size_t k = 1; k < matched; ++k) out.labels[i + k] = BioTag::I;
    i += matched;
  }
  return out;
}

std::vector<TaggedSentence> project_labels(const TermDictionary& dict,
                                           std::span<const std::vector<std::string>> sentences, ProjectionMode mode) {
  std::vector<TaggedSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(project_sentence(dict, s, mode));
  return out;
}

std::vector<std::string> extract_spans(const TaggedSentence& s) {
  std::vector<std::string> spans;
  std::string cur;
  bool open = false;
  auto close = [&] {
    if (open) spans.push_back(cur);
    cur.clear();
    open = false;
  };
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const BioTag t = i < s.labels.size() ? s.labels[i] : BioTag::O;
    if (t == BioTag::B || (t == BioTag::I && !open)) {
      close();
      cur = s.tokens[i];
      open = true;
    } else if (t == BioTag::I) {
      cur += ' ';
      cur += s.tokens[i];
    } else {
      close();
    }
  }
  close();
  return spans;
}

std::size_t unique_medical_terms(std::span<const TaggedSentence> tagged) {
  std::set<std::string> forms;
  for (const auto& s : tagged)
    for (auto span : extract_spans(s)) {
      std::transform(span.begin(), span.end(), span.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      forms.insert(std::move(span));
    }
  return forms.size();
}

void write_conll(const std::string& path, std::span<const TaggedDocument> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CoNLL file: " + path);
  for (const auto& d : docs) {
    out << "-DOCSTART-\t" << d.doc_id << "\n\n";
    for (const auto& s : d.sentences) {
      for (std::size_t i = 0; i < s.tokens.size(); ++i) out << s.tokens[i] << '\t' << to_string(s.labels[i]) << '\n';
      out << '\n';
    }
  }
  if (!out) throw IoError("failed writing CoNLL file: " + path);
}

std::vector<TaggedDocument> read_conll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CoNLL file: " + path);
  std::vector<TaggedDocument> docs;
  TaggedSentence cur;
  auto flush = [&] {
    if (cur.tokens.empty()) return;
    if (docs.empty()) docs.push_back({});
    docs.back().sentences.push_back(std::move(cur));
    cur = {};
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected token<TAB>tag");
    if (line.compare(0, tab, "-DOCSTART-") == 0) {
      flush();
      docs.push_back({line.substr(tab + 1), {}});
      continue;
    }
    try {
      cur.labels.push_back(parse_bio_tag(std::string_view(line).substr(tab + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    cur.tokens.push_back(line.substr(0, tab));
  }
  flush();
  return docs;
}

}  // namespace vtriage
