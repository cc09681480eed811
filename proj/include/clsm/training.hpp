#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clsm/corpus.hpp"
#include "clsm/network.hpp"

namespace clsm {

struct LossConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  double temperature = 1.0;
  bool fine_tune_embeddings = false;
  std::uint64_t seed = 0;
  std::size_t batch_size = 1;

  /// Throws ConfigError unless learning_rate > 0, temperature > 0, batch_size > 0.
  void validate() const;
};

/// Gradient of the ranking loss. Convolution gradients are kept per touched
/// column, since a trigram window only reaches the columns of its trigrams.
struct Gradients {
  std::map<Eigen::Index, Eigen::VectorXd> conv_columns;
  Eigen::MatrixXd semantic;
  std::map<int, Eigen::VectorXd> embedding_rows;

  static Gradients zeros_like(const ClsmModel& model);
  Eigen::MatrixXd dense_conv(const ClsmModel& model) const;
  void add(const Gradients& other, double scale = 1.0);
  void scale(double factor);
  bool all_finite() const;
};

/// Softmax of score / temperature with max subtraction.
std::vector<double> candidate_probabilities(std::span<const double> scores, double temperature = 1.0);

/// -log softmax(scores / temperature)[0]; the positive comes first.
double ranking_loss(std::span<const double> scores, double temperature = 1.0);

/// Probability assigned to the first candidate (the positive).
double pair_probability(const ForwardTrace& target, std::span<const ForwardTrace> candidates,
                        double temperature = 1.0);

double sample_loss(const TrainingSample& sample, const ClsmModel& model, double temperature = 1.0);

struct LossAndGradients {
  double loss = 0.0;
  Gradients gradients;
};

/// Analytic gradient of sample_loss. Max pooling routes gradient to the
/// winning positions only.
LossAndGradients loss_and_gradients(const TrainingSample& sample, const ClsmModel& model,
                                    double temperature = 1.0, bool fine_tune_embeddings = false);

Gradients backward(const TrainingSample& sample, const ClsmModel& model,
                   double temperature = 1.0, bool fine_tune_embeddings = false);

/// params -= learning_rate * grads. Embedding rows move only when the
/// model's table is trainable.
void sgd_step(ClsmModel& model, const Gradients& grads, double learning_rate);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_accuracy;
};

/// `epoch  train_loss  val_accuracy` with 6 fractional digits; a missing
/// validation score prints as "nan".
std::string format_epoch_line(const EpochMetrics& m);

struct TrainHooks {
  /// When set, replaces the sample list at the start of each epoch (1-based).
  std::function<std::vector<TrainingSample>(std::size_t epoch)> resample;
  std::function<void(const EpochMetrics&, const ClsmModel&)> on_epoch;
};

struct TrainResult {
  ClsmModel model;
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch ran or no validation set
};

/// SGD over shuffled samples. With a validation set the returned model is
/// the one from the epoch with the best selection accuracy (earliest wins
/// ties); without one it is the final model.
TrainResult train(std::vector<TrainingSample> samples, ClsmModel model, const LossConfig& config,
                  std::span<const TrainingSample> validation = {}, const TrainHooks& hooks = {});

struct GradCheckOptions {
  InputMode input_mode = InputMode::LetterTrigram;
  std::size_t trigram_dim = 20;
  std::size_t embedding_dim = 4;
  std::size_t conv_dim = 6;
  std::size_t semantic_dim = 4;
  std::size_t max_tokens = 5;
  std::size_t negatives = 3;
  std::size_t trials = 100;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  double temperature = 1.0;
  bool fine_tune_embeddings = false;
  std::uint64_t seed = 0;
  /// Applied to the analytic gradient before comparison (mutation testing).
  std::function<void(Gradients&)> tamper;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t trials = 0;
  std::size_t parameters_checked = 0;
  /// Entries whose +-epsilon probes select different max-pool winners; the
  /// loss has a kink there, so they are not compared.
  std::size_t kinks_skipped = 0;
  bool passed = false;
  std::string worst;  // location of the largest error
};

/// Relative error |a - n| / max(|a|, |n|, 1e-6). The floor keeps entries
/// whose true gradient is ~0 from dividing rounding noise by itself.
double gradient_relative_error(double analytic, double numeric);

/// Central-difference check of every parameter on random tiny models.
/// Fails if more than 1% of entries had to be skipped as kinks.
GradCheckReport gradient_check(const GradCheckOptions& options);
std::string format_gradcheck(const GradCheckReport& report);

}  // namespace clsm
