#include "clsm/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <tuple>

#include "clsm/error.hpp"

namespace clsm {

const char* to_string(MatchLabel label) {
  switch (label) {
    case MatchLabel::Good: return "good";
    case MatchLabel::GoodPartial: return "good_partial";
    case MatchLabel::Partial: return "partial";
    case MatchLabel::Bad: return "bad";
  }
  return "bad";
}

MatchLabel parse_label(std::string_view text) {
  std::string t;
  for (char c : text) t += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  if (t == "good") return MatchLabel::Good;
  if (t == "good_partial" || t == "goodpartial" || t == "good-partial" || t == "good partial")
    return MatchLabel::GoodPartial;
  if (t == "partial") return MatchLabel::Partial;
  if (t == "bad") return MatchLabel::Bad;
  throw Error(ErrorKind::ParseError, "unknown label '" + std::string(text) + "'");
}

std::vector<AnnotatedPair> parse_gold(std::string_view text, const std::string& origin) {
  std::vector<AnnotatedPair> gold;
  std::size_t line_no = 0;
  for (auto line : split_char(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    auto f = split_char(line, '\t');
    if (f.size() != 4) throw ParseError(origin, line_no, "expected 4 tab-separated fields");
    AnnotatedPair p;
    p.article_id = std::string(trim(f[0]));
    try {
      p.simple_id = std::stoi(std::string(f[1]));
      p.standard_id = std::stoi(std::string(f[2]));
      p.label = parse_label(trim(f[3]));
    } catch (const Error& e) {
      throw ParseError(origin, line_no, e.what());
    } catch (const std::exception&) {
      throw ParseError(origin, line_no, "bad sentence index");
    }
    gold.push_back(std::move(p));
  }
  return gold;
}

std::vector<AnnotatedPair> load_gold(const std::string& path) {
  return parse_gold(read_file(path), path);
}

PRF make_prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  PRF r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

std::string format_prf(const PRF& prf) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "P=%.6f R=%.6f F1=%.6f tp=%zu fp=%zu fn=%zu", prf.precision,
                prf.recall, prf.f1, prf.tp, prf.fp, prf.fn);
  return buf;
}

namespace {

using PairKey = std::tuple<std::string, int, int>;

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

std::map<std::string, Counts> count_by_article(std::span<const AlignmentResult> predicted,
                                               std::span<const AnnotatedPair> gold,
                                               const LabelSet& positive_labels) {
  std::set<std::string> gold_articles;
  std::set<PairKey> positives;
  for (const auto& g : gold) {
    gold_articles.insert(g.article_id);
    if (positive_labels.count(g.label)) positives.insert({g.article_id, g.simple_id, g.standard_id});
  }

  std::map<std::string, Counts> counts;
  for (const auto& a : gold_articles) counts[a];
  std::set<PairKey> found;
  for (const auto& r : predicted) {
    if (!gold_articles.count(r.article_id))
      throw Error(ErrorKind::MissingGold, "no gold annotation for article '" + r.article_id + "'");
    for (const auto& p : r.pairs) {
      PairKey key{r.article_id, r.simple_id(p.simple_index), r.standard_id(p.standard_index)};
      if (positives.count(key)) {
        // one-to-one predictions cannot repeat a key; guard against merged inputs anyway
        if (found.insert(key).second) ++counts[r.article_id].tp;
      } else {
        ++counts[r.article_id].fp;
      }
    }
  }
  for (const auto& key : positives)
    if (!found.count(key)) ++counts[std::get<0>(key)].fn;
  return counts;
}

}  // namespace

PRF evaluate_alignment(std::span<const AlignmentResult> predicted,
                       std::span<const AnnotatedPair> gold, const LabelSet& positive_labels) {
  Counts total;
  for (const auto& [article, c] : count_by_article(predicted, gold, positive_labels)) {
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  return make_prf(total.tp, total.fp, total.fn);
}

std::map<std::string, PRF> evaluate_alignment_by_article(std::span<const AlignmentResult> predicted,
                                                         std::span<const AnnotatedPair> gold,
                                                         const LabelSet& positive_labels) {
  std::map<std::string, PRF> out;
  for (const auto& [article, c] : count_by_article(predicted, gold, positive_labels))
    out[article] = make_prf(c.tp, c.fp, c.fn);
  return out;
}

double selection_accuracy(const SentenceScorer& scorer, std::span<const TrainingSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::ConfigError, "selection accuracy of zero samples");
  std::size_t correct = 0;
  for (const auto& s : samples) {
    const double pos = scorer(s.target, s.positive);
    bool wins = true;
    for (const auto& n : s.negatives) {
      if (scorer(s.target, n) >= pos) {
        wins = false;
        break;
      }
    }
    if (wins) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

double selection_accuracy(const ClsmModel& model, std::span<const TrainingSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::ConfigError, "selection accuracy of zero samples");
  std::size_t correct = 0;
  for (const auto& s : samples) {
    const Eigen::VectorXd target = forward(s.target, model).y;
    const double pos = cosine_similarity(target, forward(s.positive, model).y);
    bool wins = true;
    for (const auto& n : s.negatives) {
      if (cosine_similarity(target, forward(n, model).y) >= pos) {
        wins = false;
        break;
      }
    }
    if (wins) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

namespace {

std::vector<std::string> window_words(const Sentence& s, std::size_t center, std::size_t half) {
  std::vector<std::string> words;
  const std::size_t lo = center < half ? 0 : center - half;
  const std::size_t hi = std::min(center + half, s.size() - 1);
  for (std::size_t t = lo; t <= hi; ++t) words.push_back(s.tokens[t]);
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

std::vector<ActivationMatch> trace_activations(const Sentence& a, const Sentence& b,
                                               const ClsmModel& model, std::size_t top_k) {
  const ForwardTrace ta = forward(a, model);
  const ForwardTrace tb = forward(b, model);
  const auto k = static_cast<std::size_t>(ta.v.size());

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto strength = [&](std::size_t i) {
    return std::min(ta.v(static_cast<Eigen::Index>(i)), tb.v(static_cast<Eigen::Index>(i)));
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return strength(x) > strength(y); });
  order.resize(std::min(top_k, k));

  std::vector<ActivationMatch> out;
  for (std::size_t i : order) {
    ActivationMatch m;
    m.neuron_index = i;
    m.value_a = ta.v(static_cast<Eigen::Index>(i));
    m.value_b = tb.v(static_cast<Eigen::Index>(i));
    m.position_a = ta.argmax_t[i];
    m.position_b = tb.argmax_t[i];
    m.words_a = window_words(a, m.position_a, model.window_size() / 2);
    m.words_b = window_words(b, m.position_b, model.window_size() / 2);
    out.push_back(std::move(m));
  }
  return out;
}

std::string format_trace(std::span<const ActivationMatch> matches) {
  std::string out;
  char buf[96];
  for (const auto& m : matches) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f\t", m.neuron_index, m.value_a, m.value_b);
    out += buf;
    out += join(m.words_a) + '\t' + join(m.words_b) + '\n';
  }
  return out;
}

std::vector<CurvePoint> precision_recall_curve(std::span<const SimilarityMatrix> matrices,
                                               std::span<const AnnotatedPair> gold,
                                               std::span<const double> thresholds,
                                               const LabelSet& positive_labels) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw Error(ErrorKind::ConfigError, "thresholds must be sorted ascending");
  std::vector<AlignmentResult> aligned;
  aligned.reserve(matrices.size());
  for (const auto& m : matrices) aligned.push_back(greedy_align(m));

  std::vector<CurvePoint> curve;
  for (double th : thresholds) {
    std::vector<AlignmentResult> kept;
    kept.reserve(aligned.size());
    for (const auto& r : aligned) kept.push_back(apply_threshold(r, th));
    curve.push_back({th, evaluate_alignment(kept, gold, positive_labels)});
  }
  return curve;
}

const CurvePoint& best_f1(std::span<const CurvePoint> curve) {
  if (curve.empty()) throw Error(ErrorKind::ConfigError, "empty precision-recall curve");
  const CurvePoint* best = &curve[0];
  for (const auto& p : curve)
    if (p.prf.f1 > best->prf.f1) best = &p;
  return *best;
}

}  // namespace clsm
