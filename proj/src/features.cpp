#include "clsm/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "clsm/error.hpp"

namespace clsm {

namespace {

std::vector<std::string> utf8_chars(const std::string& word) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto lead = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, word.size() - i);
    chars.push_back(word.substr(i, len));
    i += len;
  }
  return chars;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split_char(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
  }
  while (!out.empty() && trim(out.back()).empty()) out.pop_back();
  return out;
}

bool parse_double(std::string_view s, double& out) {
  std::string buf(s);
  if (buf.empty()) return false;
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size();
}

}  // namespace

std::vector<std::string> word_to_trigrams(const std::string& word) {
  std::vector<std::string> chars = utf8_chars(word);
  chars.insert(chars.begin(), "#");
  chars.push_back("#");
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 2 < chars.size(); ++i)
    out.push_back(chars[i] + chars[i + 1] + chars[i + 2]);
  return out;
}

TrigramVocab::TrigramVocab(const std::vector<std::string>& trigrams, std::size_t min_freq)
    : by_index_(trigrams), min_freq_(min_freq) {
  for (std::size_t i = 0; i < by_index_.size(); ++i) {
    if (!index_.emplace(by_index_[i], static_cast<int>(i)).second)
      throw Error(ErrorKind::ParseError, "duplicate trigram '" + by_index_[i] + "'");
  }
  unk_index_ = static_cast<int>(by_index_.size());
}

int TrigramVocab::lookup(const std::string& trigram) const {
  auto it = index_.find(trigram);
  return it == index_.end() ? unk_index_ : it->second;
}

std::map<std::string, std::size_t> count_trigrams(const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& article : corpus)
    for (Side side : {Side::Simple, Side::Standard})
      for (const auto& s : article.side(side))
        for (const auto& tok : s.tokens)
          for (auto& tri : word_to_trigrams(tok)) ++counts[tri];
  return counts;
}

TrigramVocab build_trigram_vocab(const std::map<std::string, std::size_t>& trigram_counts,
                                 std::size_t min_freq) {
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tri, n] : trigram_counts)
    if (n >= min_freq) kept.emplace_back(tri, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> order;
  order.reserve(kept.size());
  for (auto& [tri, n] : kept) order.push_back(tri);
  return TrigramVocab(order, min_freq);
}

TrigramVocab build_trigram_vocab(const Corpus& corpus, std::size_t min_freq) {
  return build_trigram_vocab(count_trigrams(corpus), min_freq);
}

std::string format_vocab(const TrigramVocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.trigrams().size(); ++i)
    out += vocab.trigrams()[i] + '\t' + std::to_string(i) + '\n';
  out += std::string(kUnkToken) + '\t' + std::to_string(vocab.unk_index()) + '\n';
  return out;
}

TrigramVocab parse_vocab(std::string_view text, const std::string& origin) {
  std::vector<std::string> order;
  bool saw_unk = false;
  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (saw_unk) throw ParseError(origin, line_no, "entries after <UNK> sentinel");
    auto f = split_char(line, '\t');
    if (f.size() != 2) throw ParseError(origin, line_no, "expected `trigram<TAB>index`");
    double idx = 0;
    if (!parse_double(f[1], idx) || idx != static_cast<double>(order.size()))
      throw ParseError(origin, line_no, "vocab indices must be dense and ordered");
    if (f[0] == kUnkToken) {
      saw_unk = true;
      continue;
    }
    order.emplace_back(f[0]);
  }
  if (!saw_unk) throw ParseError(origin, line_no, "missing <UNK> sentinel");
  return TrigramVocab(order);
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXd vectors,
                               bool trainable)
    : row_words_(std::move(words)), vectors_(std::move(vectors)), trainable_(trainable) {
  if (static_cast<Eigen::Index>(row_words_.size()) != vectors_.rows())
    throw Error(ErrorKind::DimensionMismatch, "embedding words and rows differ in count");
  std::optional<int> unk;
  for (std::size_t i = 0; i < row_words_.size(); ++i) {
    if (row_words_[i] == kUnkToken) {
      unk = static_cast<int>(i);
      continue;
    }
    if (!index_.emplace(row_words_[i], static_cast<int>(i)).second)
      throw Error(ErrorKind::ParseError, "DuplicateWord: '" + row_words_[i] + "'");
  }
  if (!vectors_.allFinite())
    throw Error(ErrorKind::ParseError, "embedding table has non-finite entries");
  if (unk) {
    unk_row_ = *unk;
  } else {
    unk_row_ = static_cast<int>(vectors_.rows());
    vectors_.conservativeResize(vectors_.rows() + 1, vectors_.cols());
    vectors_.row(unk_row_).setZero();
    row_words_.push_back(kUnkToken);
  }
}

int EmbeddingTable::lookup(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? unk_row_ : it->second;
}

bool EmbeddingTable::indexed(std::size_t row) const {
  if (row >= row_words_.size() || static_cast<int>(row) == unk_row_) return false;
  auto it = index_.find(row_words_[row]);
  return it != index_.end() && it->second == static_cast<int>(row);
}

void EmbeddingTable::restrict_vocabulary(const std::map<std::string, std::size_t>& frequencies,
                                         std::size_t min_freq) {
  for (auto it = index_.begin(); it != index_.end();) {
    auto f = frequencies.find(it->first);
    const std::size_t n = f == frequencies.end() ? 0 : f->second;
    it = n < min_freq ? index_.erase(it) : std::next(it);
  }
}

void EmbeddingTable::drop_word(const std::string& word) { index_.erase(word); }

EmbeddingTable parse_embeddings(std::string_view text, const std::string& origin) {
  auto lines = lines_of(text);
  if (lines.empty()) throw ParseError(origin, 1, "empty embedding file");
  auto header = split_whitespace(lines[0]);
  double v_d = 0, d_d = 0;
  if (header.size() != 2 || !parse_double(header[0], v_d) || !parse_double(header[1], d_d) ||
      v_d < 0 || d_d < 1 || v_d != std::floor(v_d) || d_d != std::floor(d_d))
    throw ParseError(origin, 1, "expected header `V d_emb`");
  const auto vocab_size = static_cast<std::size_t>(v_d);
  const auto dim = static_cast<Eigen::Index>(d_d);
  if (lines.size() - 1 != vocab_size)
    throw ParseError(origin, lines.size(),
                     "header declares " + std::to_string(vocab_size) + " rows, found " +
                         std::to_string(lines.size() - 1));

  std::vector<std::string> words;
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(vocab_size), dim);
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 0; r < vocab_size; ++r) {
    const std::size_t line_no = r + 2;
    auto f = split_whitespace(lines[r + 1]);
    if (f.empty()) throw ParseError(origin, line_no, "empty embedding row");
    if (static_cast<Eigen::Index>(f.size() - 1) != dim)
      throw Error(ErrorKind::DimensionMismatch,
                  origin + ":" + std::to_string(line_no) + ": row has " +
                      std::to_string(f.size() - 1) + " values, header declares " +
                      std::to_string(dim));
    std::string word(f[0]);
    if (!seen.emplace(word, line_no).second)
      throw ParseError(origin, line_no, "DuplicateWord: '" + word + "'");
    for (Eigen::Index c = 0; c < dim; ++c) {
      double x = 0;
      if (!parse_double(f[static_cast<std::size_t>(c) + 1], x) || !std::isfinite(x))
        throw ParseError(origin, line_no, "bad value '" + std::string(f[c + 1]) + "'");
      vectors(static_cast<Eigen::Index>(r), c) = x;
    }
    words.push_back(std::move(word));
  }
  return EmbeddingTable(std::move(words), std::move(vectors));
}

EmbeddingTable load_embeddings(const std::string& path) {
  return parse_embeddings(read_file(path), path);
}

WordFeature Featurizer::operator()(const std::string& word) const {
  if (const auto* const* vocab = std::get_if<const TrigramVocab*>(&source_)) {
    std::vector<int> ids;
    for (const auto& tri : word_to_trigrams(word)) ids.push_back((*vocab)->lookup(tri));
    std::sort(ids.begin(), ids.end());
    TrigramCounts counts;
    for (int id : ids) {
      if (!counts.entries.empty() && counts.entries.back().first == id)
        counts.entries.back().second += 1.0;
      else
        counts.entries.emplace_back(id, 1.0);
    }
    return counts;
  }
  const EmbeddingTable& table = *std::get<const EmbeddingTable*>(source_);
  EmbeddingRow row;
  row.row = table.lookup(word);
  row.values = table.vectors().row(row.row).transpose();
  return row;
}

std::size_t Featurizer::dimension() const {
  return std::visit([](const auto* src) { return src->dimension(); }, source_);
}

WordFeature featurize_word(const std::string& word, const Featurizer& featurizer) {
  return featurizer(word);
}

Eigen::VectorXd ContextWindow::dense() const {
  Eigen::VectorXd l = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (!slots[s]) continue;
    const auto offset = static_cast<Eigen::Index>(s * feature_dim);
    if (const auto* counts = std::get_if<TrigramCounts>(&*slots[s])) {
      for (auto [idx, n] : counts->entries) l(offset + idx) += n;
    } else {
      const auto& row = std::get<EmbeddingRow>(*slots[s]);
      l.segment(offset, row.values.size()) = row.values;
    }
  }
  return l;
}

std::vector<ContextWindow> make_windows(const Sentence& sentence, const Featurizer& featurizer,
                                        std::size_t window) {
  if (window == 0 || window % 2 == 0)
    throw Error(ErrorKind::DimensionMismatch, "context window size must be odd");
  std::vector<WordFeature> features;
  features.reserve(sentence.size());
  for (const auto& tok : sentence.tokens) features.push_back(featurizer(tok));

  const std::size_t dim = featurizer.dimension();
  std::vector<ContextWindow> windows(features.size());
  for (std::size_t t = 0; t < features.size(); ++t) {
    ContextWindow& w = windows[t];
    w.feature_dim = dim;
    w.center = t;
    w.slots.resize(window);
    const std::size_t half = window / 2;
    for (std::size_t s = 0; s < window; ++s) {
      // position t - half + s, when inside the sentence
      if (t + s < half || t + s - half >= features.size()) continue;
      w.slots[s] = features[t + s - half];
    }
  }
  return windows;
}

}  // namespace clsm
