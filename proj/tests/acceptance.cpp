// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Expected values are computed here independently of the library
// (brute-force enumeration, finite differences, hand arithmetic).
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vtriage/blstm.hpp"
#include "vtriage/clf_metrics.hpp"
#include "vtriage/crf.hpp"
#include "vtriage/features.hpp"
#include "vtriage/logreg.hpp"
#include "vtriage/medterm.hpp"
#include "vtriage/rng.hpp"
#include "vtriage/synth.hpp"
#include "vtriage/textfeat.hpp"
#include "vtriage/vocab.hpp"

using namespace vtriage;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Records the first few failures of a check.
struct Checker {
  Outcome out;
  int failures = 0;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    out.ok = false;
    if (++failures <= 3) out.detail += (out.detail.empty() ? "" : "; ") + what;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Eigen::VectorXd central_diff(const std::function<double(const VectorXd&)>& f, VectorXd x, double eps = 1e-5) {
  VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double up = f(x);
    x[i] = orig - eps;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2 * eps);
  }
  return g;
}

double rel_err(const VectorXd& a, const VectorXd& b) {
  const double den = a.norm() + b.norm();
  return den == 0.0 ? 0.0 : (a - b).norm() / den;
}

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(VT_CLI) + " " + args + " >>" + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Runs the whole synthetic pipeline through the CLI into `work`.
bool run_pipeline(const std::string& work, const std::string& extra, Checker& c, bool both_taggers = true) {
  const std::string log = work + ".log";
  fs::remove_all(work);
  fs::remove(log);
  const std::string common = " --seed 7 --work-dir " + work + " --corpus-dir " + work + "/synth" + extra;
  std::vector<std::string> steps = {"synth --videos 50", "ingest", "featurize", "build-ner-corpus",
                                    "train-tagger --arch crf"};
  if (both_taggers) steps.push_back("train-tagger --arch blstm");
  for (const char* rest : {"tag --arch crf", "assemble --arch crf", "train-clf --target recommendation",
                           "train-clf --target medical_info", "train-clf --target understandability", "classify",
                           "eval", "report --table 5", "report --table 6", "report --table 7"})
    steps.push_back(rest);
  if (both_taggers) steps.push_back("report --table 2");
  for (const auto& s : steps) {
    const int rc = run_cli(s + common, log);
    if (rc != 0) {
      c.expect(false, "'" + s + "' exited " + std::to_string(rc) + " (see " + log + ")");
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- criteria

Outcome crf_oracle() {
  Checker c;
  Rng rng(2024);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 1 + static_cast<int>(rng.below(6));
    // Integer weights on every other instance make exact score ties common.
    const bool integral = inst % 2 == 1;
    auto draw = [&] { return integral ? static_cast<double>(rng.below(11)) - 5.0 : rng.uniform(-5.0, 5.0); };
    CrfScores s{MatrixXd(n, 3), MatrixXd(3, 3)};
    for (Eigen::Index i = 0; i < s.emission.size(); ++i) s.emission(i) = draw();
    for (Eigen::Index i = 0; i < 9; ++i) s.transition(i) = draw();

    // Enumerate sequences in lexicographic order; a strict comparison keeps
    // the lexicographically smallest among equal scores.
    std::vector<int> y(n, 0), best;
    double best_score = -INFINITY, max_score = -INFINITY;
    std::vector<double> scores;
    for (;;) {
      double sc = s.emission(0, y[0]);
      for (int t = 1; t < n; ++t) sc += s.transition(y[t - 1], y[t]) + s.emission(t, y[t]);
      scores.push_back(sc);
      if (sc > best_score) {
        best_score = sc;
        best = y;
      }
      int k = n - 1;
      while (k >= 0 && y[k] == 2) y[k--] = 0;
      if (k < 0) break;
      ++y[k];
    }
    max_score = best_score;
    double sum = 0.0;
    for (double sc : scores) sum += std::exp(sc - max_score);
    const double brute_log_z = max_score + std::log(sum);

    const double log_z = log_partition(s);
    c.expect(std::abs(log_z - brute_log_z) <= 1e-8,
             "instance " + std::to_string(inst) + ": log Z off by " + std::to_string(log_z - brute_log_z));
    const auto v = viterbi(s);
    c.expect(v.labels == best, "instance " + std::to_string(inst) + ": Viterbi path differs");
  }
  if (c.out.ok) c.out.detail = "200 instances";
  return c.out;
}

Outcome gradient_checks() {
  Checker c;
  // BLSTM: vocab 10, d_emb 3, d_hid 4, one five-token sentence.
  BlstmParams bp({10, 3, 4});
  bp.init_random(5, 0.5);
  std::vector<EncodedSentence> batch = {{{1, 4, 9, 2, 7}, {0, 1, 2, 0, 2}}};
  const auto ba = blstm_loss_grad(bp, batch, 1e-3);
  const auto bn = central_diff(
      [&](const VectorXd& th) {
        BlstmParams q = bp;
        q.flat() = th;
        return blstm_loss_grad(q, batch, 1e-3).loss;
      },
      bp.flat());
  const double e_blstm = rel_err(ba.grad, bn);
  c.expect(e_blstm < 1e-4, "BLSTM relative error " + std::to_string(e_blstm));

  // CRF: five attributes.
  CrfParams cp({"f0", "f1", "f2", "f3", "f4"});
  Rng rng(6);
  for (Eigen::Index i = 0; i < cp.weights().size(); ++i) cp.weights()[i] = rng.uniform(-1, 1);
  std::vector<CrfInstance> cb = {{{{0, 1}, {2}, {3, 4}, {1}}, {0, 1, 2, 0}}, {{{4}, {0, 3}}, {2, 0}}};
  const auto ca = crf_loss_grad(cp, cb, 1e-2);
  const auto cn = central_diff(
      [&](const VectorXd& w) {
        CrfParams q = cp;
        q.weights() = w;
        return crf_loss_grad(q, cb, 1e-2).loss;
      },
      cp.weights());
  const double e_crf = rel_err(ca.grad, cn);
  c.expect(e_crf < 1e-4, "CRF relative error " + std::to_string(e_crf));

  // Logistic regression.
  MatrixXd X(60, 4);
  VectorXd y(60), beta(5);
  for (Eigen::Index i = 0; i < X.size(); ++i) X(i) = rng.normal();
  for (Eigen::Index i = 0; i < 60; ++i) y[i] = rng.bernoulli(0.4);
  for (Eigen::Index i = 0; i < 5; ++i) beta[i] = rng.uniform(-1, 1);
  const auto la = logreg_gradient(X, y, beta, 0.02);
  const auto ln = central_diff([&](const VectorXd& b) { return logreg_objective(X, y, b, 0.02); }, beta);
  const double e_lr = rel_err(la, ln);
  c.expect(e_lr < 1e-6, "LR relative error " + std::to_string(e_lr));

  if (c.out.ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "rel. errors blstm %.2e, crf %.2e, logreg %.2e", e_blstm, e_crf, e_lr);
    c.out.detail = buf;
  }
  return c.out;
}

Outcome table2_reproduction(const std::string& root) {
  Checker c;
  const std::string work = root + "/table2";
  if (!run_pipeline(work, "", c)) return c.out;

  const auto corpus = read_conll(work + "/ner/corpus.conll");
  std::size_t sentences = 0;
  for (const auto& d : corpus) sentences += d.sentences.size();
  c.expect(sentences == 500, "corpus has " + std::to_string(sentences) + " sentences");

  const std::string table = read_file(work + "/reports/table2.tsv");
  const std::regex layout(
      "model\tprecision\trecall\tf_measure\n"
      "crf\t[01]\\.\\d{3}\t[01]\\.\\d{3}\t([01]\\.\\d{3})\n"
      "blstm\t[01]\\.\\d{3}\t[01]\\.\\d{3}\t([01]\\.\\d{3})\n");
  std::smatch m;
  if (!std::regex_match(table, m, layout)) {
    c.expect(false, "table2.tsv layout mismatch");
    return c.out;
  }
  const double f_crf = std::stod(m[1]), f_blstm = std::stod(m[2]);
  c.expect(f_crf >= 0.90, "CRF F " + m[1].str());
  c.expect(f_blstm >= 0.90, "BLSTM F " + m[2].str());
  if (c.out.ok) c.out.detail = "500 sentences, F crf " + m[1].str() + ", blstm " + m[2].str();
  return c.out;
}

Outcome metric_fixtures() {
  Checker c;
  const auto m = metrics_from_counts({22, 2, 1, 32});
  auto near = [&](double got, double want, const char* what) {
    c.expect(std::abs(got - want) <= 0.001, std::string(what) + " = " + std::to_string(got));
  };
  near(m.positive.precision, 0.917, "P");
  near(m.positive.recall, 0.957, "R");
  near(m.positive.f_measure, 0.936, "F");
  near(m.negative.precision, 0.970, "neg P");
  near(m.negative.recall, 0.941, "neg R");
  near(m.negative.f_measure, 0.955, "neg F");
  near(m.accuracy, 0.947, "accuracy");
  c.expect(m.counts.total() == 57, "table total");
  if (c.out.ok) c.out.detail = "P .917 R .957 F .936, accuracy .947";
  return c.out;
}

Outcome sign_recovery() {
  Checker c;
  const auto spec = FeatureSpec::for_target(Target::recommendation);
  // Recommendation coefficients in roster order, intercept -3.66.
  const std::vector<std::pair<Feature, double>> table = {
      {Feature::medical_info_high, 0.0},       {Feature::understandable, 1.78},
      {Feature::ocr_confidence, 3.09},         {Feature::n_active_verbs_v, 0.28},
      {Feature::readability_v, -0.54},         {Feature::n_sentences_v, -0.06},
      {Feature::n_shots, -0.46},               {Feature::shot_change_confidence, -0.45},
      {Feature::n_summary_words_v, -0.51},     {Feature::transcription_confidence, -0.88},
      {Feature::n_transition_words_v, 1.10},   {Feature::n_words_v, 0.00},
      {Feature::n_unique_words_v, -0.81},      {Feature::has_title, -0.45},
      {Feature::has_description, 0.00},        {Feature::has_tags, -0.05},
      {Feature::n_unique_medical_terms, 0.12}, {Feature::readability_m, -0.16},
      {Feature::n_sentences_m, 0.53},          {Feature::n_words_m, -0.43},
      {Feature::n_unique_words_m, -0.43},      {Feature::n_transition_words_m, -0.31},
      {Feature::n_summary_words_m, -0.15},     {Feature::n_active_verbs_m, -0.44},
      {Feature::duration_s, -0.68},
  };
  std::vector<double> coefs(spec.features.size(), NAN);
  for (const auto& [f, b] : table) {
    const auto it = std::find(spec.features.begin(), spec.features.end(), f);
    if (it == spec.features.end()) {
      c.expect(false, std::string(feature_name(f)) + " missing from the recommendation spec");
      return c.out;
    }
    coefs[static_cast<std::size_t>(it - spec.features.begin())] = b;
  }

  const std::size_t n = 2000;
  std::vector<int> agree(coefs.size(), 0);
  for (int rep = 0; rep < 20; ++rep) {
    Rng rng(1000 + static_cast<std::uint64_t>(rep));
    const auto rows = simulate_logistic_rows(spec, -3.66, coefs, n, rng);
    const MatrixXd X = design_matrix(rows, spec);
    VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = *target_label(rows[i], spec.target);
    const auto scaler = standardize_fit(X, spec.features);
    const auto fit = fit_logreg(standardize_apply(scaler, X), y, 1.0 / static_cast<double>(n));
    for (std::size_t j = 0; j < coefs.size(); ++j) {
      // Scaling divides by a positive sd, so signs compare directly.
      const double b = fit.beta[static_cast<Eigen::Index>(j) + 1];
      if ((b > 0) == (coefs[j] > 0) && b != 0.0) ++agree[j];
    }
  }
  int strong = 0, worst = 20;
  for (std::size_t j = 0; j < coefs.size(); ++j) {
    if (std::abs(coefs[j]) < 0.4) continue;
    ++strong;
    worst = std::min(worst, agree[j]);
    c.expect(agree[j] >= 19, std::string(feature_name(spec.features[j])) + " sign kept in " +
                                 std::to_string(agree[j]) + "/20");
  }
  if (c.out.ok) c.out.detail = std::to_string(strong) + " coefficients, worst " + std::to_string(worst) + "/20";
  return c.out;
}

Outcome text_fixtures(const std::string& data_dir) {
  Checker c;
  const double cat = readability("The cat sat on the mat.");
  c.expect(std::abs(cat - (-1.45)) <= 0.01, "readability " + std::to_string(cat));
  std::string run_on;
  for (int i = 0; i < 100; ++i) run_on += i ? " cat" : "cat";
  const double long_grade = readability(run_on);
  c.expect(std::abs(long_grade - 35.21) <= 0.01, "run-on readability " + std::to_string(long_grade));

  const Lexicon lex("transition", {"first", "then", "finally", "in addition"});
  c.expect(lexicon_count(tokenize("first we then finally"), lex) == 3, "lexicon count [first,we,then,finally]");
  c.expect(lexicon_count(tokenize("in addition we begin"), lex) == 1, "lexicon count [in,addition,we,begin]");
  c.expect(lexicon_count(tokenize(""), lex) == 0, "lexicon count on empty text");

  const auto verbs = Lexicon::load(data_dir + "/active_verbs.txt");
  c.expect(active_verb_count(tokenize("the doctor removes polyps"), verbs) == 1, "active verbs, active sentence");
  c.expect(active_verb_count(tokenize("polyps are removed"), verbs) == 0, "active verbs, passive sentence");
  c.expect(active_verb_count(tokenize(""), verbs) == 0, "active verbs on empty text");
  if (c.out.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "readability %.2f and %.2f", cat, long_grade);
    c.out.detail = buf;
  }
  return c.out;
}

Outcome clean_terms_properties(const std::string& data_dir) {
  Checker c;
  const auto stop = load_stopwords(data_dir + "/stopwords.txt");
  static const char* pieces[] = {"Colon", "cancer", "(oral)", "the", "of", "ion", "gap", "bowel-prep", "X-Ray",
                                 "polyps!", "AND", "ct", "Rectal", "bleeding,", "about", "5mg", "aspirin;", "with"};
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> raw;
    for (std::size_t n = rng.below(6); n > 0; --n) {
      std::string term;
      for (std::size_t k = 1 + rng.below(4); k > 0; --k)
        term += (term.empty() ? "" : " ") + std::string(pieces[rng.below(std::size(pieces))]);
      raw.push_back(term);
    }
    const auto out = clean_terms(raw, stop);
    const std::vector<std::string> again(out.begin(), out.end());
    c.expect(clean_terms(again, stop) == out, "not idempotent on trial " + std::to_string(trial));
    for (const auto& w : out) {
      c.expect(w.size() > 3, "short word '" + w + "'");
      c.expect(!stop.count(w), "stopword '" + w + "'");
      c.expect(std::none_of(w.begin(), w.end(), [](unsigned char ch) { return std::isupper(ch); }),
               "uppercase in '" + w + "'");
      c.expect(std::all_of(w.begin(), w.end(), [](unsigned char ch) { return std::isalnum(ch); }),
               "punctuation in '" + w + "'");
    }
  }
  if (c.out.ok) c.out.detail = "1000 random lists";
  return c.out;
}

Outcome determinism(const std::string& root) {
  Checker c;
  const std::string small = " --set tagger.epochs=4 --set tagger.d_emb=12 --set tagger.d_hid=12";
  const std::string a = root + "/det_a", b = root + "/det_b";
  if (!run_pipeline(a, small, c, true) || !run_pipeline(b, small, c, true)) return c.out;
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    const auto other = fs::path(b) / rel;
    ++files;
    c.expect(fs::exists(other), rel.string() + " missing in second run");
    if (fs::exists(other)) c.expect(read_file(e.path()) == read_file(other.string()), rel.string() + " differs");
  }
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) c.expect(fs::exists(fs::path(a) / fs::relative(e.path(), b)), "extra file in second run");
  if (c.out.ok) c.out.detail = std::to_string(files) + " artifacts identical";
  return c.out;
}

Outcome bio_well_formed() {
  Checker c;
  static const char* words[] = {"colon", "cancer", "polyp", "the", "screening", "test", "blood", "rectal", "x"};
  Rng rng(99);

  // Taggers trained briefly on projected data, so their raw outputs are imperfect.
  std::vector<TaggedSentence> corpus;
  const TermDictionary train_dict(TermDictionary::Entries{{"colon cancer", {SemanticType::neop}},
                                                          {"polyp", {SemanticType::dsyn}},
                                                          {"blood test", {SemanticType::lbpr}}});
  for (int i = 0; i < 60; ++i) {
    std::vector<std::string> toks;
    for (std::size_t k = 2 + rng.below(6); k > 0; --k) toks.push_back(words[rng.below(std::size(words))]);
    corpus.push_back(project_sentence(train_dict, toks));
  }
  TrainConfig cfg;
  cfg.seed = 4;
  cfg.epochs = 2;
  cfg.d_emb = 4;
  cfg.d_hid = 4;
  const auto crf = train_crf(corpus, cfg);
  const auto blstm = train_blstm(corpus, cfg);

  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    TermDictionary::Entries e;
    for (std::size_t k = rng.below(6); k > 0; --k) {
      std::string key = words[rng.below(std::size(words))];
      for (std::size_t extra = rng.below(3); extra > 0; --extra) key += std::string(" ") + words[rng.below(std::size(words))];
      e[key] = {SemanticType::dsyn};
    }
    std::vector<std::string> toks;
    for (std::size_t k = 1 + rng.below(10); k > 0; --k) toks.push_back(words[rng.below(std::size(words))]);
    const auto mode = trial % 2 ? ProjectionMode::word : ProjectionMode::phrase;
    const auto proj = project_sentence(TermDictionary(e), toks, mode);
    c.expect(is_well_formed_bio(proj.labels), "projection trial " + std::to_string(trial));
    c.expect(is_well_formed_bio(crf_tag(crf, toks)), "CRF tagging trial " + std::to_string(trial));
    c.expect(is_well_formed_bio(blstm.tag(toks)), "BLSTM tagging trial " + std::to_string(trial));
    std::vector<BioTag> noise;
    for (std::size_t k = 0; k < toks.size(); ++k) noise.push_back(static_cast<BioTag>(rng.below(3)));
    c.expect(is_well_formed_bio(repair_bio(noise)), "repair trial " + std::to_string(trial));
    checked += 4;
  }
  if (c.out.ok) c.out.detail = std::to_string(checked) + " sequences";
  return c.out;
}

}  // namespace

int main() {
  const std::string data_dir = VTRIAGE_DATA_DIR;
  const fs::path root = fs::temp_directory_path() / "vtriage_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "CRF log-partition and Viterbi match brute force", 10, crf_oracle},
      {2, "analytic gradients match central differences", 30, gradient_checks},
      {3, "synthetic tagger comparison, F >= 0.90, table 2 layout", 180, [&] { return table2_reproduction(root.string()); }},
      {4, "classifier metric fixtures", 0, metric_fixtures},
      {5, "coefficient sign recovery", 60, sign_recovery},
      {6, "text feature fixtures", 0, [&] { return text_fixtures(data_dir); }},
      {7, "clean_terms properties", 0, [&] { return clean_terms_properties(data_dir); }},
      {8, "same-seed runs give byte-identical artifacts", 0, [&] { return determinism(root.string()); }},
      {9, "BIO well-formedness after repair", 0, bio_well_formed},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_s > 0 && secs > cr.limit_s) {
      o.ok = false;
      o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the time limit");
    }
    std::printf("[%s] %d %s (%.1fs)%s%s\n", o.ok ? "PASS" : "FAIL", cr.id, cr.name, secs, o.detail.empty() ? "" : ": ",
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  if (failed == 0) fs::remove_all(root);
  return failed == 0 ? 0 : 1;
}
