// Command-line front end. Talks to the library only through vtriage.h.
#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vtriage/vtriage.h"

namespace {

constexpr int kExitUsage = 64;

const char* kUsage =
    "usage: vtriage <command> [options]\n"
    "\n"
    "commands:\n"
    "  ingest            load and validate the JSONL corpus into <work-dir>/corpus\n"
    "  featurize         text features for every video\n"
    "  build-ner-corpus  dictionary-projected CoNLL corpus from titles and descriptions\n"
    "  train-tagger      --arch blstm|crf (needs --seed)\n"
    "  tag               tag every video and count unique medical terms\n"
    "  assemble          per-video feature table\n"
    "  train-clf         --target recommendation|medical_info|understandability (needs --seed)\n"
    "  classify          predictions for every video [--impute-annotations]\n"
    "  eval              evaluate every trained model\n"
    "  eval-tagger       token-level P/R/F of the taggers on their held-out videos\n"
    "  eval-clf          classifier metrics on the held-out videos\n"
    "  report            --table 2|5|6|7\n"
    "  synth             write a synthetic corpus (needs --seed)\n"
    "\n"
    "run 'vtriage <command> --help' for options\n";

// Global options that take a value, so their values are not mistaken for
// the command name.
const std::vector<std::string> kValueOptions = {"--config", "--seed", "--work-dir", "--corpus-dir", "--data-dir",
                                                "--dictionary", "--split", "--set"};

std::string find_command(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.empty() || a[0] != '-') return a;
    if (a.find('=') == std::string::npos &&
        std::find(kValueOptions.begin(), kValueOptions.end(), a) != kValueOptions.end())
      ++i;
  }
  return {};
}

int fail(vt_status st) {
  std::fprintf(stderr, "error: %s\n", vt_last_error());
  switch (st) {
    case VT_ERR_VALIDATION: return 1;
    case VT_ERR_UNKNOWN_COMMAND: return kExitUsage;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command = find_command(argc, argv);
  bool wants_help = false;
  for (int i = 1; i < argc; ++i)
    if (!std::strcmp(argv[i], "--help") || !std::strcmp(argv[i], "-h")) wants_help = true;
  if (command.empty() && wants_help) {
    std::fputs(kUsage, stdout);
    return 0;
  }
  if (command.empty() || !vt_is_command(command.c_str())) {
    if (!command.empty()) std::fprintf(stderr, "error: unknown command '%s'\n", command.c_str());
    std::fputs(kUsage, stderr);
    return kExitUsage;
  }

  CLI::App app{"Colonoscopy video triage pipeline", "vtriage"};
  std::string config_path, work_dir, corpus_dir, data_dir, dictionary, seed, split;
  std::vector<std::string> settings;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed (required by train commands and synth)");
  app.add_option("--work-dir", work_dir, "directory for all stage outputs");
  app.add_option("--corpus-dir", corpus_dir, "directory with videos/transcripts/ocr/labels .jsonl");
  app.add_option("--data-dir", data_dir, "lexicons, stopwords and keywords");
  app.add_option("--dictionary", dictionary, "term dictionary TSV");
  app.add_option("--split", split, "train fraction for video-level splits");
  app.add_option("--set", settings, "extra setting key=value (e.g. tagger.epochs=20)");

  std::map<std::string, std::string> opts;
  bool impute = false;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"ingest", "featurize", "build-ner-corpus", "train-tagger", "tag", "assemble", "train-clf",
                           "classify", "eval", "eval-tagger", "eval-clf", "report", "synth"})
    subs[name] = app.add_subcommand(name);
  app.require_subcommand(1);

  subs["ingest"]->add_option("--keywords", opts["keywords"], "keyword list to validate search results against");
  subs["ingest"]->add_option("--search-results", opts["search_results"], "JSONL search results to validate");
  subs["train-tagger"]->add_option("--arch", opts["arch"], "blstm or crf")->required();
  subs["tag"]->add_option("--arch", opts["arch"], "blstm (default) or crf");
  subs["tag"]->add_option("--model", opts["model"], "tagger model file");
  subs["assemble"]->add_option("--arch", opts["arch"], "tagger whose term counts to use (default blstm)");
  subs["train-clf"]->add_option("--target", opts["target"], "recommendation, medical_info or understandability")
      ->required();
  subs["classify"]->add_option("--target", opts["target"], "only this classifier");
  subs["classify"]->add_flag("--impute-annotations", impute,
                             "predict missing annotation features with the other two classifiers");
  subs["eval-tagger"]->add_option("--arch", opts["arch"], "only this tagger");
  subs["eval-clf"]->add_option("--target", opts["target"], "only this classifier");
  subs["report"]->add_option("--table", opts["table"], "2, 5, 6 or 7")->required();
  subs["synth"]->add_option("--out", opts["out"], "output directory (default <work-dir>/synth)");
  subs["synth"]->add_option("--videos", opts["videos_count"], "number of videos");
  for (auto& [_, s] : subs) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  vt_pipeline* p = nullptr;
  vt_status st = vt_pipeline_create(&p);
  if (st != VT_OK) return fail(st);
  auto set = [&](const char* key, const std::string& value) {
    if (st == VT_OK && !value.empty()) st = vt_pipeline_set(p, key, value.c_str());
  };
  if (!config_path.empty()) st = vt_pipeline_load_config(p, config_path.c_str());
  set("seed", seed);
  set("work_dir", work_dir);
  set("corpus_dir", corpus_dir);
  set("data_dir", data_dir);
  set("dictionary", dictionary);
  set("split_fraction", split);
  for (const auto& kv : settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      vt_pipeline_destroy(p);
      return 1;
    }
    set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
  }
  if (impute) opts["impute_annotations"] = "1";
  for (const auto& [k, v] : opts)
    if (st == VT_OK && !v.empty()) st = vt_pipeline_set_option(p, k.c_str(), v.c_str());

  const char* summary = nullptr;
  if (st == VT_OK) st = vt_pipeline_run(p, command.c_str(), &summary);
  const char* warnings = vt_pipeline_warnings(p);
  if (warnings && *warnings) {
    std::string w = warnings;
    std::size_t start = 0;
    while (start <= w.size()) {
      const auto nl = w.find('\n', start);
      std::fprintf(stderr, "warning: %s\n", w.substr(start, nl - start).c_str());
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }
  int code = 0;
  if (st == VT_OK) std::printf("%s\n", summary);
  else code = fail(st);
  vt_pipeline_destroy(p);
  return code;
}
