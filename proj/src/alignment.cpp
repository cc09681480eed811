#include "clsm/alignment.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "clsm/error.hpp"

namespace clsm {

int SimilarityMatrix::simple_id(std::size_t row) const {
  return simple_ids.empty() ? static_cast<int>(row) : simple_ids.at(row);
}

int SimilarityMatrix::standard_id(std::size_t col) const {
  return standard_ids.empty() ? static_cast<int>(col) : standard_ids.at(col);
}

int AlignmentResult::simple_id(std::size_t pos) const {
  return simple_ids.empty() ? static_cast<int>(pos) : simple_ids.at(pos);
}

int AlignmentResult::standard_id(std::size_t pos) const {
  return standard_ids.empty() ? static_cast<int>(pos) : standard_ids.at(pos);
}

SimilarityMatrix score_matrix(const ArticlePair& article, const SentenceScorer& scorer,
                              std::string scorer_id) {
  const auto& simple = article.simple_sentences;
  const auto& standard = article.standard_sentences;
  if (simple.empty() || standard.empty())
    throw Error(ErrorKind::EmptySentence,
                "article '" + article.article_id + "' needs sentences on both sides");
  SimilarityMatrix m;
  m.article_id = article.article_id;
  m.scorer_id = std::move(scorer_id);
  m.scores.resize(static_cast<Eigen::Index>(simple.size()),
                  static_cast<Eigen::Index>(standard.size()));
  for (std::size_t i = 0; i < simple.size(); ++i) {
    m.simple_ids.push_back(simple[i].sentence_id);
    for (std::size_t j = 0; j < standard.size(); ++j)
      m.scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scorer(simple[i], standard[j]);
  }
  for (const auto& s : standard) m.standard_ids.push_back(s.sentence_id);
  return m;
}

std::vector<SimilarityMatrix> score_corpus(const Corpus& corpus, const SentenceScorer& scorer,
                                           std::string scorer_id, unsigned jobs) {
  std::vector<SimilarityMatrix> out(corpus.size());
  if (jobs <= 1 || corpus.size() < 2) {
    for (std::size_t a = 0; a < corpus.size(); ++a)
      out[a] = score_matrix(corpus[a], scorer, scorer_id);
    return out;
  }
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(corpus.size()));
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t a = w; a < corpus.size(); a += jobs)
          out[a] = score_matrix(corpus[a], scorer, scorer_id);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

AlignmentResult greedy_align(const SimilarityMatrix& matrix) {
  const auto rows = static_cast<std::size_t>(matrix.scores.rows());
  const auto cols = static_cast<std::size_t>(matrix.scores.cols());
  if (!matrix.scores.allFinite())
    throw Error(ErrorKind::DimensionMismatch,
                "similarity matrix for '" + matrix.article_id + "' has non-finite entries");

  AlignmentResult result;
  result.article_id = matrix.article_id;
  result.simple_ids = matrix.simple_ids;
  result.standard_ids = matrix.standard_ids;

  // Row-major cell order plus a stable sort on score gives the
  // (row, column) tie-break for free.
  std::vector<std::size_t> cells(rows * cols);
  std::iota(cells.begin(), cells.end(), std::size_t{0});
  auto score_of = [&](std::size_t c) {
    return matrix.scores(static_cast<Eigen::Index>(c / cols), static_cast<Eigen::Index>(c % cols));
  };
  std::stable_sort(cells.begin(), cells.end(),
                   [&](std::size_t a, std::size_t b) { return score_of(a) > score_of(b); });

  std::vector<bool> row_used(rows, false), col_used(cols, false);
  const std::size_t target = std::min(rows, cols);
  for (std::size_t c : cells) {
    if (result.pairs.size() == target) break;
    const std::size_t i = c / cols, j = c % cols;
    if (row_used[i] || col_used[j]) continue;
    row_used[i] = col_used[j] = true;
    result.pairs.push_back({i, j, score_of(c)});
  }

  result.unmatched_side = rows > cols ? Side::Simple : Side::Standard;
  const auto& used = rows > cols ? row_used : col_used;
  for (std::size_t k = 0; k < used.size(); ++k)
    if (!used[k]) result.unmatched.push_back(k);
  return result;
}

AlignmentResult apply_threshold(AlignmentResult result, double threshold) {
  std::erase_if(result.pairs, [&](const AlignedPair& p) { return !(p.score >= threshold); });
  return result;
}

SimilarityMatrix normalize_minmax(const SimilarityMatrix& m) {
  SimilarityMatrix out = m;
  if (m.scores.size() == 0) return out;
  const double lo = m.scores.minCoeff();
  const double hi = m.scores.maxCoeff();
  if (hi == lo) {
    out.scores.setConstant(0.5);
  } else {
    out.scores = (m.scores.array() - lo) / (hi - lo);
  }
  return out;
}

SimilarityMatrix rescore(const SimilarityMatrix& a, const SimilarityMatrix& b, double alpha) {
  if (a.scores.rows() != b.scores.rows() || a.scores.cols() != b.scores.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "rescoring matrices of different shapes for article '" + a.article_id + "'");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorKind::ConfigError, "alpha must lie in [0, 1]");
  SimilarityMatrix out = normalize_minmax(a);
  out.scores = alpha * out.scores + (1.0 - alpha) * normalize_minmax(b).scores;
  out.scorer_id = "rescore(" + a.scorer_id + "," + b.scorer_id + ")";
  return out;
}

namespace {

std::string format_score(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9f", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

}  // namespace

std::string format_alignments(std::span<const AlignmentResult> results) {
  std::string out;
  for (const auto& r : results)
    for (const auto& p : r.pairs)
      out += r.article_id + '\t' + std::to_string(r.simple_id(p.simple_index)) + '\t' +
             std::to_string(r.standard_id(p.standard_index)) + '\t' + format_score(p.score) + '\n';
  return out;
}

std::vector<AlignmentResult> parse_alignments(std::string_view text, const std::string& origin) {
  std::vector<AlignmentResult> out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& row : parse_pairs(text, origin)) {
    if (!row.score)
      throw Error(ErrorKind::ParseError, origin + ": alignment rows need a score column");
    auto [it, inserted] = index.emplace(row.article_id, out.size());
    if (inserted) out.push_back(AlignmentResult{row.article_id, {}, Side::Standard, {}, {}, {}});
    // positions are the sentence ids themselves (identity mapping)
    out[it->second].pairs.push_back({static_cast<std::size_t>(row.simple_id),
                                     static_cast<std::size_t>(row.standard_id), *row.score});
  }
  return out;
}

std::string format_score_table(std::span<const SimilarityMatrix> matrices) {
  std::string out;
  for (const auto& m : matrices)
    for (Eigen::Index i = 0; i < m.scores.rows(); ++i)
      for (Eigen::Index j = 0; j < m.scores.cols(); ++j)
        out += m.article_id + '\t' + std::to_string(m.simple_id(static_cast<std::size_t>(i))) +
               '\t' + std::to_string(m.standard_id(static_cast<std::size_t>(j))) + '\t' +
               format_score(m.scores(i, j)) + '\n';
  return out;
}

std::vector<SimilarityMatrix> matrices_from_table(const ScoreTable& table, const Corpus& corpus,
                                                  std::string scorer_id) {
  std::vector<SimilarityMatrix> out;
  for (const auto& article : corpus) {
    SimilarityMatrix m = score_matrix(
        article,
        [&](const Sentence& a, const Sentence& b) {
          auto s = table.get(article.article_id, a.sentence_id, b.sentence_id);
          if (!s)
            throw Error(ErrorKind::ParseError,
                        "score table has no entry for article '" + article.article_id +
                            "' pair (" + std::to_string(a.sentence_id) + ", " +
                            std::to_string(b.sentence_id) + ")");
          return *s;
        },
        scorer_id);
    out.push_back(std::move(m));
  }
  return out;
}

std::string format_matrix_dump(std::span<const SimilarityMatrix> matrices) {
  std::string out;
  for (const auto& m : matrices) {
    out += "article " + m.article_id + ' ' + std::to_string(m.scores.rows()) + ' ' +
           std::to_string(m.scores.cols()) + '\n';
    for (Eigen::Index i = 0; i < m.scores.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.scores.cols(); ++j) {
        if (j) out += ' ';
        out += format_score(m.scores(i, j));
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace clsm
