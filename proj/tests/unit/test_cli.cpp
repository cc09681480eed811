#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "clsm/commands.hpp"
#include "support/synthetic.hpp"
#include "support/test_util.hpp"

using namespace clsm;
using clsm::testing::slurp;
using clsm::testing::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "clsm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

clsm::testing::SyntheticData small_data() {
  clsm::testing::SyntheticOptions o;
  o.articles = 12;
  o.sentences_per_side = 6;
  o.aligned_per_article = 4;
  o.topic_pool = 20;
  o.filler_words = 200;
  return clsm::testing::make_synthetic(o);
}

}  // namespace

TEST_CASE("config keys") {
  RunConfig c;
  c.set("learning-rate", "0.5");
  CHECK(c.learning_rate == 0.5);
  c.set("fine_tune", "true");
  CHECK(c.fine_tune);
  c.set("threshold", "-inf");
  CHECK(std::isinf(c.threshold));
  CHECK_THROWS_KIND(c.set("no_such_key", "1"), ErrorKind::ConfigError);
  CHECK_THROWS_KIND(c.set("epochs", "ten"), ErrorKind::ConfigError);
  CHECK_THROWS_KIND(c.set("fine_tune", "maybe"), ErrorKind::ConfigError);
  for (const auto& k : RunConfig::keys()) CHECK_MESSAGE(!RunConfig::describe(k).empty(), k);

  TempDir dir("cli_config");
  auto path = dir.write("run.cfg", "# comment\nepochs = 3\n\nseed = 11  # trailing\n");
  RunConfig f;
  f.load_file(path);
  CHECK(f.epochs == 3);
  CHECK(f.seed == 11);
  auto bad = dir.write("bad.cfg", "epochs = 3\nwindow\n");
  try {
    f.load_file(bad);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
  }
}

TEST_CASE("errors are reported on one line with exit code 2") {
  TempDir dir("cli_errors");
  auto r = cli({"build-dataset", "--out-dir", dir.file("out")});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error: ConfigError: ", 0) == 0);
  CHECK(r.err.find("corpus") != std::string::npos);

  auto data = small_data();
  auto corpus = dir.write("corpus.tsv", data.corpus_tsv());
  r = cli({"build-dataset", "--corpus", corpus, "--pairs", dir.file("missing.tsv"), "--out-dir",
           dir.file("out")});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error: IoError: ", 0) == 0);
  CHECK(r.err.find("missing.tsv") != std::string::npos);

  r = cli({"train", "--window", "5", "--model", dir.file("m")});
  CHECK(r.code == 2);
  CHECK(r.err.find("allow_window_override") != std::string::npos);

  r = cli({"train", "--bogus-flag", "1"});
  CHECK(r.code != 0);
  r = cli({});
  CHECK(r.code != 0);
}

TEST_CASE("build-dataset and train rerun byte-identically") {
  TempDir dir("cli_determinism");
  auto data = small_data();
  auto corpus = dir.write("corpus.tsv", data.corpus_tsv());
  auto pairs = dir.write("pairs.tsv", data.pairs_tsv());

  auto build = [&](const std::string& out) {
    return cli({"build-dataset", "--corpus", corpus, "--pairs", pairs, "--out-dir", dir.file(out),
                "--n-within", "5", "--val-fraction", "0.25", "--min-freq", "1", "--seed", "3"});
  };
  auto b1 = build("d1");
  auto b2 = build("d2");
  REQUIRE_MESSAGE(b1.code == 0, b1.err);
  REQUIRE(b2.code == 0);
  CHECK(b1.out == b2.out);
  CHECK_MESSAGE(b1.out.find("articles=12 pairs=48 train_samples=72 val_samples=24") != std::string::npos, b1.out);
  for (const char* f : {"train.samples.tsv", "val.samples.tsv", "vocab.tsv", "word_freq.tsv"})
    CHECK_MESSAGE(slurp(dir.file(std::string("d1/") + f)) == slurp(dir.file(std::string("d2/") + f)), f);

  auto train = [&](const std::string& model) {
    return cli({"train", "--corpus", corpus, "--train-samples", dir.file("d1/train.samples.tsv"),
                "--val-samples", dir.file("d1/val.samples.tsv"), "--vocab", dir.file("d1/vocab.tsv"),
                "--conv-dim", "12", "--semantic-dim", "6", "--epochs", "2", "--learning-rate", "0.05",
                "--model", dir.file(model), "--seed", "3"});
  };
  auto t1 = train("m1");
  auto t2 = train("m2");
  REQUIRE_MESSAGE(t1.code == 0, t1.err);
  CHECK(t1.out == t2.out);
  CHECK(slurp(dir.file("m1")) == slurp(dir.file("m2")));
  CHECK(slurp(dir.file("m1.log")) == slurp(dir.file("m2.log")));
  CHECK(t1.out.find("best_epoch=") != std::string::npos);

  auto t3 = cli({"train", "--corpus", corpus, "--train-samples", dir.file("d1/train.samples.tsv"),
                 "--vocab", dir.file("d1/vocab.tsv"), "--conv-dim", "12", "--semantic-dim", "6",
                 "--epochs", "2", "--learning-rate", "0.05", "--model", dir.file("m3"), "--seed", "4"});
  REQUIRE(t3.code == 0);
  CHECK(slurp(dir.file("m1")) != slurp(dir.file("m3")));

  // downstream commands run on the trained model
  auto score = cli({"score", "--corpus", corpus, "--model", dir.file("m1"), "--output", dir.file("s.tsv")});
  REQUIRE_MESSAGE(score.code == 0, score.err);
  auto gold = dir.write("gold.tsv", data.gold_tsv());
  auto align = cli({"align", "--corpus", corpus, "--model", dir.file("m1"), "--output", dir.file("a.tsv")});
  REQUIRE_MESSAGE(align.code == 0, align.err);
  auto eval = cli({"eval", "--alignment", dir.file("a.tsv"), "--gold", gold});
  REQUIRE_MESSAGE(eval.code == 0, eval.err);
  CHECK(eval.out.rfind("P=", 0) == 0);
  auto curve = cli({"pr-curve", "--corpus", corpus, "--scorer", "table", "--scores-a", dir.file("s.tsv"),
                    "--gold", gold});
  REQUIRE_MESSAGE(curve.code == 0, curve.err);
  CHECK(curve.out.find("best threshold=") != std::string::npos);
  auto trace = cli({"trace", "--model", dir.file("m1"), "--sentence-a", "alpha beta gamma",
                    "--sentence-b", "alpha beta delta", "--top-k", "3"});
  REQUIRE_MESSAGE(trace.code == 0, trace.err);
}

TEST_CASE("seed precedence: config < CLSM_SEED < flag") {
  TempDir dir("cli_seed");
  auto data = small_data();
  auto corpus = dir.write("corpus.tsv", data.corpus_tsv());
  auto pairs = dir.write("pairs.tsv", data.pairs_tsv());
  auto cfg = dir.write("run.cfg", "seed = 1\nn_within = 5\nval_fraction = 0.25\n");
  auto build = [&](const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"build-dataset", "--config", cfg, "--corpus", corpus,
                                     "--pairs", pairs, "--out-dir", dir.file(out)};
    args.insert(args.end(), extra.begin(), extra.end());
    auto r = cli(args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return slurp(dir.file(out + "/train.samples.tsv"));
  };
  const auto cfg1 = build("c1");
  const auto flag2 = build("f2", {"--seed", "2"});
  CHECK(cfg1 != flag2);
  setenv("CLSM_SEED", "2", 1);
  const auto env2 = build("e2");
  const auto env_flag1 = build("ef1", {"--seed", "1"});
  unsetenv("CLSM_SEED");
  CHECK(env2 == flag2);
  CHECK(env_flag1 == cfg1);
}

TEST_CASE("gradcheck subcommand") {
  auto r = cli({"gradcheck", "--gc-trials", "20", "--conv-dim", "6", "--semantic-dim", "4"});
  CHECK_MESSAGE(r.code == 0, r.out, r.err);
  CHECK(r.out.find("PASS") != std::string::npos);
}
