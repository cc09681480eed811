#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clsm/corpus.hpp"

namespace clsm {

/// Scores of every (simple, standard) sentence pair of one article.
struct SimilarityMatrix {
  std::string article_id;
  std::string scorer_id;
  Eigen::MatrixXd scores;  // |simple| x |standard|
  std::vector<int> simple_ids;
  std::vector<int> standard_ids;

  int simple_id(std::size_t row) const;
  int standard_id(std::size_t col) const;
};

struct AlignedPair {
  std::size_t simple_index = 0;    // row position
  std::size_t standard_index = 0;  // column position
  double score = 0.0;
  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

struct AlignmentResult {
  std::string article_id;
  std::vector<AlignedPair> pairs;  // emission order
  Side unmatched_side = Side::Standard;
  std::vector<std::size_t> unmatched;  // positions on the longer side
  // Position -> sentence id; empty means identity.
  std::vector<int> simple_ids;
  std::vector<int> standard_ids;

  int simple_id(std::size_t pos) const;
  int standard_id(std::size_t pos) const;
};

using SentenceScorer = std::function<double(const Sentence&, const Sentence&)>;

SimilarityMatrix score_matrix(const ArticlePair& article, const SentenceScorer& scorer,
                              std::string scorer_id = "");

/// Scores every article; with jobs > 1 articles are split across threads,
/// output order always follows the corpus.
std::vector<SimilarityMatrix> score_corpus(const Corpus& corpus, const SentenceScorer& scorer,
                                           std::string scorer_id = "", unsigned jobs = 1);

/// Repeatedly takes the best remaining cell and removes its row and column
/// until the shorter side is exhausted. Ties: smaller row, then smaller column.
AlignmentResult greedy_align(const SimilarityMatrix& matrix);

/// Keeps pairs with score >= threshold.
AlignmentResult apply_threshold(AlignmentResult result, double threshold);

/// Min-max scaling to [0, 1]; a constant matrix maps to 0.5 everywhere.
SimilarityMatrix normalize_minmax(const SimilarityMatrix& m);

/// alpha * norm(a) + (1 - alpha) * norm(b).
SimilarityMatrix rescore(const SimilarityMatrix& a, const SimilarityMatrix& b, double alpha);

/// `article_id  simple_index  standard_index  score`, emission order.
std::string format_alignments(std::span<const AlignmentResult> results);
std::vector<AlignmentResult> parse_alignments(std::string_view text,
                                              const std::string& origin = "<memory>");

/// Every cell of every matrix in the alignment TSV layout.
std::string format_score_table(std::span<const SimilarityMatrix> matrices);
/// Rebuilds per-article matrices for `corpus` from a score table; missing
/// cells are an error.
std::vector<SimilarityMatrix> matrices_from_table(const ScoreTable& table, const Corpus& corpus,
                                                  std::string scorer_id = "table");

std::string format_matrix_dump(std::span<const SimilarityMatrix> matrices);

}  // namespace clsm
