#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "clsm/corpus.hpp"

namespace clsm {

inline constexpr std::size_t kWindowSize = 3;
inline constexpr std::size_t kDefaultMinFreq = 5;
inline constexpr const char* kUnkToken = "<UNK>";

/// '#'-padded letter trigrams of a word, one per character (UTF-8 aware).
std::vector<std::string> word_to_trigrams(const std::string& word);

/// Dense letter-trigram index with a shared UNK slot.
class TrigramVocab {
 public:
  TrigramVocab() = default;
  /// Indices follow the order of `trigrams`; UNK takes the next index.
  explicit TrigramVocab(const std::vector<std::string>& trigrams,
                        std::size_t min_freq = kDefaultMinFreq);

  int lookup(const std::string& trigram) const;
  int unk_index() const { return unk_index_; }
  /// Feature dimension including the UNK slot.
  std::size_t dimension() const { return static_cast<std::size_t>(unk_index_) + 1; }
  std::size_t min_freq() const { return min_freq_; }
  /// Trigrams ordered by index (UNK excluded).
  const std::vector<std::string>& trigrams() const { return by_index_; }

  /// Same trigram-to-index mapping; min_freq is build metadata only.
  friend bool operator==(const TrigramVocab& a, const TrigramVocab& b) {
    return a.by_index_ == b.by_index_;
  }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> by_index_;
  int unk_index_ = 0;
  std::size_t min_freq_ = kDefaultMinFreq;
};

/// Keeps trigrams seen at least `min_freq` times, ordered by
/// (frequency desc, trigram asc).
TrigramVocab build_trigram_vocab(const Corpus& corpus, std::size_t min_freq = kDefaultMinFreq);
TrigramVocab build_trigram_vocab(const std::map<std::string, std::size_t>& trigram_counts,
                                 std::size_t min_freq = kDefaultMinFreq);
std::map<std::string, std::size_t> count_trigrams(const Corpus& corpus);

std::string format_vocab(const TrigramVocab& vocab);
TrigramVocab parse_vocab(std::string_view text, const std::string& origin = "<memory>");

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  /// Rows are taken as given; a zero UNK row is appended unless `words`
  /// already contains "<UNK>".
  EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXd vectors,
                 bool trainable = false);

  int lookup(const std::string& word) const;
  int unk_row() const { return unk_row_; }
  std::size_t rows() const { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(vectors_.cols()); }
  bool trainable() const { return trainable_; }
  void set_trainable(bool t) { trainable_ = t; }

  /// Words with corpus frequency below `min_freq` fall back to UNK.
  void restrict_vocabulary(const std::map<std::string, std::size_t>& frequencies,
                           std::size_t min_freq);
  /// Stop resolving `word`; its row is kept.
  void drop_word(const std::string& word);

  const Eigen::MatrixXd& vectors() const { return vectors_; }
  Eigen::MatrixXd& vectors() { return vectors_; }
  /// Row words in row order; UNK row reads "<UNK>". Restricted words keep
  /// their row but no longer resolve through lookup().
  const std::vector<std::string>& row_words() const { return row_words_; }
  bool indexed(std::size_t row) const;

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> row_words_;
  Eigen::MatrixXd vectors_;
  int unk_row_ = 0;
  bool trainable_ = false;
};

/// Text format: header `V d`, then `word v1 .. vd` per line.
EmbeddingTable load_embeddings(const std::string& path);
EmbeddingTable parse_embeddings(std::string_view text, const std::string& origin = "<memory>");

/// Letter-trigram counts, sorted by index, duplicates accumulated.
struct TrigramCounts {
  std::vector<std::pair<int, double>> entries;
  friend bool operator==(const TrigramCounts&, const TrigramCounts&) = default;
};

struct EmbeddingRow {
  int row = 0;
  Eigen::VectorXd values;
  friend bool operator==(const EmbeddingRow& a, const EmbeddingRow& b) {
    return a.row == b.row && a.values == b.values;
  }
};

using WordFeature = std::variant<TrigramCounts, EmbeddingRow>;

/// Non-owning handle on whichever word representation a model uses.
class Featurizer {
 public:
  explicit Featurizer(const TrigramVocab& vocab) : source_(&vocab) {}
  explicit Featurizer(const EmbeddingTable& table) : source_(&table) {}

  WordFeature operator()(const std::string& word) const;
  std::size_t dimension() const;
  bool is_trigram() const { return std::holds_alternative<const TrigramVocab*>(source_); }

 private:
  std::variant<const TrigramVocab*, const EmbeddingTable*> source_;
};

WordFeature featurize_word(const std::string& word, const Featurizer& featurizer);

/// l_t: features of positions t-1, t, t+1 (wider for larger odd windows);
/// missing neighbours are zero.
struct ContextWindow {
  std::vector<std::optional<WordFeature>> slots;
  std::size_t feature_dim = 0;
  std::size_t center = 0;  // token position

  std::size_t dimension() const { return slots.size() * feature_dim; }
  Eigen::VectorXd dense() const;
};

/// `window` must be odd.
std::vector<ContextWindow> make_windows(const Sentence& sentence, const Featurizer& featurizer,
                                        std::size_t window = kWindowSize);

}  // namespace clsm
