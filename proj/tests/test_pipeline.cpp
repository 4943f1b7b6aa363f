#include <filesystem>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vtriage/error.hpp"
#include "vtriage/pipeline.hpp"

using namespace vtriage;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VT_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(PipelineConfigTest, SetAndValidate) {
  PipelineConfig c;
  c.set("seed", "7");
  c.set("tagger.epochs", "3");
  c.set("tagger.optimizer", "sgd");
  c.set("projection", "word");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.tagger.epochs, 3);
  EXPECT_EQ(c.tagger.optimizer, OptimizerKind::sgd);
  EXPECT_EQ(c.projection, ProjectionMode::word);
  EXPECT_THROW(c.set("tagger.epochs", "three"), ValidationError);
  EXPECT_THROW(c.set("no_such_key", "1"), ValidationError);
  c.set("split_fraction", "1.5");
  EXPECT_THROW(c.validate(), ValidationError);

  vt_test::TempDir dir("cfg");
  vt_test::write_file(dir.file("c.json"), R"({"seed": 11, "tagger": {"d_hid": 8}})");
  PipelineConfig f;
  f.load_file(dir.file("c.json"));
  EXPECT_EQ(f.seed, 11u);
  EXPECT_EQ(f.tagger.d_hid, 8);
}

TEST(PipelineRun, EndToEndOnSyntheticCorpus) {
  vt_test::TempDir dir("pipe");
  Pipeline p;
  p.config().work_dir = dir.str();
  p.config().seed = 3;
  p.config().corpus_dir = dir.file("synth");
  p.config().tagger.epochs = 3;
  p.set_option("videos_count", "40");
  EXPECT_NE(p.run("synth").find("40 videos"), std::string::npos);
  p.clear_options();

  EXPECT_EQ(p.run("ingest").substr(0, 10), "40 videos,");
  p.run("featurize");
  p.run("build-ner-corpus");
  p.set_option("arch", "crf");
  p.run("train-tagger");
  p.run("tag");
  p.run("assemble");
  p.clear_options();
  for (const char* t : {"recommendation", "medical_info", "understandability"}) {
    p.set_option("target", t);
    p.run("train-clf");
  }
  p.clear_options();
  p.run("classify");
  p.run("eval");
  for (const char* t : {"5", "6", "7"}) {
    p.set_option("table", t);
    p.run("report");
  }
  for (const char* f : {"features.tsv", "predictions.tsv", "models/tagger_crf.json", "eval/tagger_crf.tsv",
                        "reports/table5.tsv", "reports/table6.tsv", "reports/table7.tsv"})
    EXPECT_TRUE(fs::exists(dir.file(f))) << f;
  const auto t7 = vt_test::read_file(dir.file("reports/table7.tsv"));
  EXPECT_EQ(t7.substr(0, t7.find('\n')), "row\tprecision\trecall\tf_measure\toverall_accuracy");

  // Table 2 needs both taggers.
  p.set_option("table", "2");
  EXPECT_THROW(p.run("report"), ValidationError);
}

TEST(PipelineRun, MissingSeedAndInputs) {
  vt_test::TempDir dir("pipe_err");
  Pipeline p;
  p.config().work_dir = dir.str();
  p.set_option("arch", "crf");
  EXPECT_THROW(p.run("train-tagger"), ValidationError);
  p.config().corpus_dir = dir.file("nowhere");
  EXPECT_THROW(p.run("ingest"), ValidationError);
  EXPECT_FALSE(Pipeline::is_command("frobnicate"));
  EXPECT_THROW(p.run("frobnicate"), Error);
}

TEST(Cli, ExitCodes) {
  vt_test::TempDir dir("cli");
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 64);
  EXPECT_EQ(run_cli("frobnicate"), 64);
  EXPECT_EQ(run_cli("ingest --work-dir " + dir.str() + " --corpus-dir " + dir.file("missing")), 1);
  EXPECT_EQ(run_cli("synth --work-dir " + dir.str()), 1);
  EXPECT_EQ(run_cli("ingest --work-dir " + dir.str() + " --corpus-dir " + vt_test::fixture("ingest5")), 0);
  EXPECT_EQ(run_cli("train-tagger --arch crf --work-dir " + dir.str()), 1);
  EXPECT_EQ(run_cli("report --table 9 --work-dir " + dir.str()), 1);
}
