#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "clsm/alignment.hpp"
#include "clsm/corpus.hpp"
#include "clsm/network.hpp"

namespace clsm {

enum class MatchLabel { Good, GoodPartial, Partial, Bad };

const char* to_string(MatchLabel label);
MatchLabel parse_label(std::string_view text);

struct AnnotatedPair {
  std::string article_id;
  int simple_id = 0;
  int standard_id = 0;
  MatchLabel label = MatchLabel::Bad;
};

/// Gold TSV: `article_id  simple_index  standard_index  label`.
std::vector<AnnotatedPair> load_gold(const std::string& path);
std::vector<AnnotatedPair> parse_gold(std::string_view text, const std::string& origin = "<memory>");

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

PRF make_prf(std::size_t tp, std::size_t fp, std::size_t fn);
/// `P=<x> R=<y> F1=<z> tp=<a> fp=<b> fn=<c>`
std::string format_prf(const PRF& prf);

using LabelSet = std::set<MatchLabel>;
inline const LabelSet kGoodOnly = {MatchLabel::Good};

/// Every predicted article must appear in `gold` (MissingGold otherwise);
/// false negatives are counted over all gold positives.
PRF evaluate_alignment(std::span<const AlignmentResult> predicted,
                       std::span<const AnnotatedPair> gold,
                       const LabelSet& positive_labels = kGoodOnly);

/// Same counts restricted to each gold article.
std::map<std::string, PRF> evaluate_alignment_by_article(std::span<const AlignmentResult> predicted,
                                                         std::span<const AnnotatedPair> gold,
                                                         const LabelSet& positive_labels = kGoodOnly);

/// Fraction of samples whose positive strictly outscores every negative.
double selection_accuracy(const SentenceScorer& scorer, std::span<const TrainingSample> samples);
double selection_accuracy(const ClsmModel& model, std::span<const TrainingSample> samples);

struct ActivationMatch {
  std::size_t neuron_index = 0;
  double value_a = 0.0;
  double value_b = 0.0;
  std::size_t position_a = 0;  // winning window centre
  std::size_t position_b = 0;
  std::vector<std::string> words_a;  // centre word with its +-1 neighbours
  std::vector<std::string> words_b;
};

/// Pooled units ranked by min(v_a, v_b) descending (ties: lower index).
std::vector<ActivationMatch> trace_activations(const Sentence& a, const Sentence& b,
                                               const ClsmModel& model, std::size_t top_k);

/// `i  v_a  v_b  window_a  window_b` per line.
std::string format_trace(std::span<const ActivationMatch> matches);

struct CurvePoint {
  double threshold = 0.0;
  PRF prf;
};

/// Greedy alignment of every matrix, then one thresholded evaluation per
/// threshold (thresholds must be ascending).
std::vector<CurvePoint> precision_recall_curve(std::span<const SimilarityMatrix> matrices,
                                               std::span<const AnnotatedPair> gold,
                                               std::span<const double> thresholds,
                                               const LabelSet& positive_labels = kGoodOnly);

/// Highest F1 point; earlier threshold wins ties.
const CurvePoint& best_f1(std::span<const CurvePoint> curve);

}  // namespace clsm
