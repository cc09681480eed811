#include "clsm/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "clsm/error.hpp"
#include "clsm/rng.hpp"

namespace clsm {

const char* to_string(InputMode mode) {
  return mode == InputMode::LetterTrigram ? "letter_trigram" : "embedding";
}

InputMode parse_input_mode(std::string_view text) {
  if (text == "letter_trigram" || text == "letter") return InputMode::LetterTrigram;
  if (text == "embedding" || text == "word2vec") return InputMode::Embedding;
  throw Error(ErrorKind::ConfigError, "unknown input mode '" + std::string(text) + "'");
}

Featurizer ClsmModel::featurizer() const {
  if (input_mode == InputMode::LetterTrigram) {
    if (!vocab) throw Error(ErrorKind::DimensionMismatch, "trigram model without vocabulary");
    return Featurizer(*vocab);
  }
  if (!embedding) throw Error(ErrorKind::DimensionMismatch, "embedding model without table");
  return Featurizer(*embedding);
}

std::size_t ClsmModel::window_size() const {
  const std::size_t per_word = featurizer().dimension();
  return per_word == 0 ? 0 : window_dim() / per_word;
}

void ClsmModel::validate() const {
  const std::size_t per_word = featurizer().dimension();
  const std::size_t window = window_size();
  if (per_word == 0 || window_dim() != window * per_word || window % 2 == 0)
    throw Error(ErrorKind::DimensionMismatch,
                "convolution has " + std::to_string(window_dim()) +
                    " columns, not an odd multiple of the word feature dimension " +
                    std::to_string(per_word));
  if (semantic.cols() != conv.rows())
    throw Error(ErrorKind::DimensionMismatch, "semantic matrix columns must equal K");
  if (conv.rows() == 0 || semantic.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "K and L must be positive");
  if (!conv.allFinite() || !semantic.allFinite())
    throw Error(ErrorKind::DimensionMismatch, "model parameters must be finite");
}

namespace {

Eigen::MatrixXd scaled_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // row-major fill order so the draw sequence does not depend on storage
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = uniform(rng, -r, r);
  return m;
}

void init_parameters(ClsmModel& model, std::size_t conv_dim, std::size_t semantic_dim,
                     std::uint64_t seed, std::size_t window_words) {
  if (window_words == 0 || window_words % 2 == 0)
    throw Error(ErrorKind::ConfigError, "context window size must be odd");
  const std::size_t window = window_words * model.featurizer().dimension();
  Rng conv_rng(derive_seed(seed, "init.conv"));
  Rng sem_rng(derive_seed(seed, "init.semantic"));
  model.conv = scaled_uniform(conv_dim, window, conv_rng);
  model.semantic = scaled_uniform(semantic_dim, conv_dim, sem_rng);
}

}  // namespace

ClsmModel make_trigram_model(TrigramVocab vocab, std::size_t conv_dim,
                             std::size_t semantic_dim, std::uint64_t seed, std::size_t window) {
  ClsmModel model;
  model.input_mode = InputMode::LetterTrigram;
  model.vocab = std::move(vocab);
  init_parameters(model, conv_dim, semantic_dim, seed, window);
  return model;
}

ClsmModel make_embedding_model(EmbeddingTable table, std::size_t conv_dim,
                               std::size_t semantic_dim, std::uint64_t seed, std::size_t window) {
  ClsmModel model;
  model.input_mode = InputMode::Embedding;
  model.embedding = std::move(table);
  init_parameters(model, conv_dim, semantic_dim, seed, window);
  return model;
}

double tanh_activation(double x) { return std::tanh(x); }

std::vector<Eigen::VectorXd> convolve(std::span<const ContextWindow> windows,
                                      const Eigen::MatrixXd& conv) {
  std::vector<Eigen::VectorXd> h;
  h.reserve(windows.size());
  for (const auto& w : windows) {
    if (static_cast<Eigen::Index>(w.dimension()) != conv.cols())
      throw Error(ErrorKind::DimensionMismatch,
                  "window dimension " + std::to_string(w.dimension()) +
                      " does not match convolution columns " + std::to_string(conv.cols()));
    Eigen::VectorXd pre = Eigen::VectorXd::Zero(conv.rows());
    for (std::size_t s = 0; s < w.slots.size(); ++s) {
      if (!w.slots[s]) continue;
      const auto offset = static_cast<Eigen::Index>(s * w.feature_dim);
      if (const auto* counts = std::get_if<TrigramCounts>(&*w.slots[s])) {
        for (auto [idx, n] : counts->entries) pre.noalias() += n * conv.col(offset + idx);
      } else {
        const auto& row = std::get<EmbeddingRow>(*w.slots[s]);
        pre.noalias() += conv.middleCols(offset, row.values.size()) * row.values;
      }
    }
    h.push_back(pre.unaryExpr([](double x) { return tanh_activation(x); }));
  }
  return h;
}

PoolResult max_pool(std::span<const Eigen::VectorXd> h) {
  if (h.empty()) throw Error(ErrorKind::EmptySentence, "max_pool over zero positions");
  PoolResult out;
  out.v = h[0];
  out.argmax_t.assign(static_cast<std::size_t>(h[0].size()), 0);
  for (std::size_t t = 1; t < h.size(); ++t) {
    if (h[t].size() != out.v.size())
      throw Error(ErrorKind::DimensionMismatch, "local feature vectors differ in length");
    for (Eigen::Index i = 0; i < out.v.size(); ++i) {
      if (h[t](i) > out.v(i)) {
        out.v(i) = h[t](i);
        out.argmax_t[static_cast<std::size_t>(i)] = t;
      }
    }
  }
  return out;
}

Eigen::VectorXd semantic_project(const Eigen::VectorXd& v, const Eigen::MatrixXd& semantic) {
  if (v.size() != semantic.cols())
    throw Error(ErrorKind::DimensionMismatch,
                "pooled vector length " + std::to_string(v.size()) +
                    " does not match semantic columns " + std::to_string(semantic.cols()));
  Eigen::VectorXd y = semantic * v;
  return y.unaryExpr([](double x) { return tanh_activation(x); });
}

ForwardTrace forward(const Sentence& sentence, const ClsmModel& model) {
  if (sentence.tokens.empty()) throw Error(ErrorKind::EmptySentence, "forward on empty sentence");
  ForwardTrace trace;
  trace.windows = make_windows(sentence, model.featurizer(), model.window_size());
  trace.h = convolve(trace.windows, model.conv);
  PoolResult pooled = max_pool(trace.h);
  trace.v = std::move(pooled.v);
  trace.argmax_t = std::move(pooled.argmax_t);
  trace.y = semantic_project(trace.v, model.semantic);
  return trace;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::DimensionMismatch, "cosine of vectors with different lengths");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw Error(ErrorKind::ZeroVector, "cosine similarity of a zero vector");
  const double c = a.dot(b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

double similarity(const Sentence& a, const Sentence& b, const ClsmModel& model) {
  return cosine_similarity(forward(a, model).y, forward(b, model).y);
}

// ---- model file ------------------------------------------------------------

namespace {

void append_row(std::string& out, const Eigen::MatrixXd& m, Eigen::Index r) {
  char buf[40];
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::snprintf(buf, sizeof buf, c ? " %.17g" : "%.17g", m(r, c));
    out += buf;
  }
  out += '\n';
}

class LineCursor {
 public:
  LineCursor(std::string_view text, std::string origin)
      : lines_(split_char(text, '\n')), origin_(std::move(origin)) {
    for (auto& l : lines_)
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }

  std::string_view next() {
    if (pos_ >= lines_.size()) fail("unexpected end of file");
    return lines_[pos_++];
  }
  bool done() const {
    for (std::size_t i = pos_; i < lines_.size(); ++i)
      if (!trim(lines_[i]).empty()) return false;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(origin_, pos_, what);
  }
  std::size_t keyed_count(std::string_view key) {
    auto f = split_whitespace(next());
    if (f.size() != 2 || f[0] != key) fail("expected `" + std::string(key) + " <n>`");
    return to_count(f[1]);
  }
  std::size_t to_count(std::string_view s) const {
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || p != s.data() + s.size()) fail("bad count '" + std::string(s) + "'");
    return n;
  }
  double to_double(std::string_view s) const {
    std::string buf(s);
    char* end = nullptr;
    double x = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(x))
      fail("bad value '" + buf + "'");
    return x;
  }
  void read_matrix(Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      auto f = split_whitespace(next());
      if (static_cast<Eigen::Index>(f.size()) != m.cols())
        fail("expected " + std::to_string(m.cols()) + " values");
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = to_double(f[static_cast<std::size_t>(c)]);
    }
  }

 private:
  std::vector<std::string_view> lines_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_model(const ClsmModel& model) {
  model.validate();
  std::string out = "CLSM v1\n";
  out += std::string("input_mode ") + to_string(model.input_mode) + '\n';
  out += "K " + std::to_string(model.conv_dim()) + '\n';
  out += "L " + std::to_string(model.semantic_dim()) + '\n';
  out += "d_window " + std::to_string(model.window_dim()) + '\n';
  out += "W_c\n";
  for (Eigen::Index r = 0; r < model.conv.rows(); ++r) append_row(out, model.conv, r);
  out += "W_s\n";
  for (Eigen::Index r = 0; r < model.semantic.rows(); ++r) append_row(out, model.semantic, r);
  if (model.vocab) {
    out += "vocab " + std::to_string(model.vocab->dimension()) + '\n';
    out += format_vocab(*model.vocab);
  }
  if (model.embedding) {
    const auto& t = *model.embedding;
    out += "embedding " + std::to_string(t.rows()) + ' ' + std::to_string(t.dimension()) + ' ' +
           (t.trainable() ? "1" : "0") + '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
      out += t.row_words()[r];
      out += t.indexed(r) || static_cast<int>(r) == t.unk_row() ? "\t1\t" : "\t0\t";
      append_row(out, t.vectors(), static_cast<Eigen::Index>(r));
    }
  }
  out += "end\n";
  return out;
}

ClsmModel parse_model(std::string_view text, const std::string& origin) {
  LineCursor in(text, origin);
  if (trim(in.next()) != "CLSM v1") in.fail("missing `CLSM v1` header");
  ClsmModel model;
  {
    auto f = split_whitespace(in.next());
    if (f.size() != 2 || f[0] != "input_mode") in.fail("expected `input_mode <mode>`");
    try {
      model.input_mode = parse_input_mode(f[1]);
    } catch (const Error& e) {
      in.fail(e.what());
    }
  }
  const std::size_t k = in.keyed_count("K");
  const std::size_t l = in.keyed_count("L");
  const std::size_t d = in.keyed_count("d_window");
  if (trim(in.next()) != "W_c") in.fail("expected `W_c`");
  model.conv.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  in.read_matrix(model.conv);
  if (trim(in.next()) != "W_s") in.fail("expected `W_s`");
  model.semantic.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
  in.read_matrix(model.semantic);

  while (true) {
    auto line = trim(in.next());
    if (line == "end") break;
    auto f = split_whitespace(line);
    if (f.size() == 2 && f[0] == "vocab") {
      const std::size_t n = in.to_count(f[1]);
      std::string block;
      for (std::size_t i = 0; i < n; ++i) {
        block += in.next();
        block += '\n';
      }
      model.vocab = parse_vocab(block, origin);
    } else if (f.size() == 4 && f[0] == "embedding") {
      const std::size_t rows = in.to_count(f[1]);
      const std::size_t dim = in.to_count(f[2]);
      std::vector<std::string> words;
      std::vector<std::string> dropped;
      Eigen::MatrixXd vectors(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
      for (std::size_t r = 0; r < rows; ++r) {
        auto cols = split_char(in.next(), '\t');
        if (cols.size() != 3) in.fail("expected `word<TAB>indexed<TAB>values`");
        auto vals = split_whitespace(cols[2]);
        if (vals.size() != dim) in.fail("embedding row has wrong dimension");
        for (std::size_t c = 0; c < dim; ++c)
          vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              in.to_double(vals[c]);
        words.emplace_back(cols[0]);
        if (cols[1] == "0") dropped.emplace_back(cols[0]);
      }
      EmbeddingTable table(std::move(words), std::move(vectors), f[3] == "1");
      for (const auto& w : dropped) table.drop_word(w);
      model.embedding = std::move(table);
    } else {
      in.fail("unknown section '" + std::string(line) + "'");
    }
  }
  if (!in.done()) in.fail("content after `end`");
  model.validate();
  return model;
}

void save_model(const ClsmModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write model file: " + path);
  out << format_model(model);
  if (!out) throw Error(ErrorKind::IoError, "failed writing model file: " + path);
}

ClsmModel load_model(const std::string& path) { return parse_model(read_file(path), path); }

}  // namespace clsm
