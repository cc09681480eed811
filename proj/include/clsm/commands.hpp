#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clsm {

/// Every knob of every subcommand. Precedence, lowest first: built-in
/// defaults, the `--config` file, the CLSM_SEED environment variable,
/// command-line flags.
struct RunConfig {
  // paths
  std::string corpus, pairs, negative_scores, embeddings, parses, wordsim, model, vocab,
      train_samples, val_samples, out_dir, output, log, gold, alignment, scores_a, scores_b,
      matrix_dump;

  // architecture
  std::size_t conv_dim = 300;
  std::size_t semantic_dim = 120;
  std::size_t window = 3;
  bool allow_window_override = false;
  std::string input_mode = "letter_trigram";
  std::size_t d_emb = 0;  // 0: take the embedding file's dimension
  std::size_t min_freq = 5;

  // dataset
  std::size_t n_within = 9;
  std::size_t n_cross = 0;
  double negative_threshold = 0.67;
  double prune_threshold = 0.45;
  std::string on_insufficient = "fail";
  double val_fraction = 0.1;

  // training
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  double temperature = 1.0;
  std::size_t batch_size = 1;
  bool fine_tune = false;
  bool resample_epochs = false;
  bool checkpoints = false;
  std::uint64_t seed = 0;

  // alignment / evaluation
  std::string scorer = "clsm";
  double threshold = -std::numeric_limits<double>::infinity();
  std::string threshold_mode = "normalized";
  double alpha = 0.5;
  std::string thresholds;  // comma-separated, ascending
  std::string positive_labels = "good";
  bool per_article = false;
  unsigned jobs = 1;

  // trace
  std::string sentence_a, sentence_b, trace_article;
  int simple_index = -1;
  int standard_index = -1;
  std::size_t top_k = 5;

  // gradient check
  std::size_t gc_trials = 100;
  double gc_epsilon = 1e-5;
  double gc_tolerance = 1e-4;
  std::string gc_mode = "letter_trigram";
  bool gc_fine_tune = false;

  /// Sets one key; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Flat `key = value` lines; `#` starts a comment.
  void load_file(const std::string& path);
  static const std::vector<std::string>& keys();
  static std::string describe(const std::string& key);
};

/// Runs the command line; returns the process exit code. Errors print one
/// line `error: <Kind>: <message>` to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_build_dataset(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_score(const RunConfig& config, std::ostream& out);
int cmd_align(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_pr_curve(const RunConfig& config, std::ostream& out);
int cmd_rescore(const RunConfig& config, std::ostream& out);
int cmd_trace(const RunConfig& config, std::ostream& out);
int cmd_gradcheck(const RunConfig& config, std::ostream& out);

}  // namespace clsm
