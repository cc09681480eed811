#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clsm/corpus.hpp"
#include "clsm/features.hpp"

namespace clsm {

enum class InputMode { LetterTrigram, Embedding };

const char* to_string(InputMode mode);
InputMode parse_input_mode(std::string_view text);

inline constexpr std::size_t kDefaultConvDim = 300;
inline constexpr std::size_t kDefaultSemanticDim = 120;

/// Shared (siamese) network parameters plus the word representation they
/// consume. No bias terms.
struct ClsmModel {
  InputMode input_mode = InputMode::LetterTrigram;
  std::optional<TrigramVocab> vocab;
  std::optional<EmbeddingTable> embedding;
  Eigen::MatrixXd conv;      // K x d_window
  Eigen::MatrixXd semantic;  // L x K

  std::size_t conv_dim() const { return static_cast<std::size_t>(conv.rows()); }
  std::size_t semantic_dim() const { return static_cast<std::size_t>(semantic.rows()); }
  std::size_t window_dim() const { return static_cast<std::size_t>(conv.cols()); }
  /// Words per context window, derived from the convolution width.
  std::size_t window_size() const;

  Featurizer featurizer() const;
  /// Throws DimensionMismatch on inconsistent shapes or non-finite entries.
  void validate() const;
};

/// Uniform init in [-r, r], r = sqrt(6 / (fan_in + fan_out)).
ClsmModel make_trigram_model(TrigramVocab vocab, std::size_t conv_dim,
                             std::size_t semantic_dim, std::uint64_t seed,
                             std::size_t window = kWindowSize);
ClsmModel make_embedding_model(EmbeddingTable table, std::size_t conv_dim,
                               std::size_t semantic_dim, std::uint64_t seed,
                               std::size_t window = kWindowSize);

struct ForwardTrace {
  std::vector<ContextWindow> windows;
  std::vector<Eigen::VectorXd> h;     // local features, one per position
  Eigen::VectorXd v;                  // max-pooled
  std::vector<std::size_t> argmax_t;  // winning position per pooled unit
  Eigen::VectorXd y;                  // semantic vector
};

double tanh_activation(double x);

/// h_t = tanh(W_c l_t). Sparse trigram slots touch only their columns.
std::vector<Eigen::VectorXd> convolve(std::span<const ContextWindow> windows,
                                      const Eigen::MatrixXd& conv);

struct PoolResult {
  Eigen::VectorXd v;
  std::vector<std::size_t> argmax_t;
};

/// Per-unit max over positions; ties go to the earliest position.
PoolResult max_pool(std::span<const Eigen::VectorXd> h);

Eigen::VectorXd semantic_project(const Eigen::VectorXd& v, const Eigen::MatrixXd& semantic);

ForwardTrace forward(const Sentence& sentence, const ClsmModel& model);

/// Throws ZeroVector when either argument has zero norm.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

double similarity(const Sentence& a, const Sentence& b, const ClsmModel& model);

/// `CLSM v1` text format; values printed with 17 significant digits.
std::string format_model(const ClsmModel& model);
ClsmModel parse_model(std::string_view text, const std::string& origin = "<memory>");
void save_model(const ClsmModel& model, const std::string& path);
ClsmModel load_model(const std::string& path);

}  // namespace clsm
