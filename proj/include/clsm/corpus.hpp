#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace clsm {

enum class Side { Simple, Standard };

const char* to_string(Side side);
Side parse_side(std::string_view text);  // throws Error(ParseError)
Side opposite(Side side);

struct Sentence {
  std::vector<std::string> tokens;
  std::string article_id;
  Side side = Side::Simple;
  int sentence_id = 0;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct ArticlePair {
  std::string article_id;
  std::vector<Sentence> simple_sentences;
  std::vector<Sentence> standard_sentences;

  const std::vector<Sentence>& side(Side s) const {
    return s == Side::Simple ? simple_sentences : standard_sentences;
  }
  std::vector<Sentence>& side(Side s) {
    return s == Side::Simple ? simple_sentences : standard_sentences;
  }
  /// Position of `sentence_id` within the given side, if present.
  std::optional<std::size_t> position(Side s, int sentence_id) const;
};

using Corpus = std::vector<ArticlePair>;

enum class Direction { SimpleToStandard, StandardToSimple };

const char* to_string(Direction d);
Direction parse_direction(std::string_view text);

struct TrainingSample {
  Sentence target;
  Sentence positive;
  std::vector<Sentence> negatives;
  Direction direction = Direction::SimpleToStandard;

  std::size_t candidate_count() const { return negatives.size() + 1; }
  friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

/// Lowercase and whitespace-split a raw line.
Sentence tokenize(std::string_view raw_line);

enum class CorpusFormat { Tsv };

/// Reads the corpus TSV: `article_id  side  sentence_index  text`.
/// Articles appear in first-seen order; sentences keep file order.
Corpus load_corpus(const std::string& path, CorpusFormat format = CorpusFormat::Tsv);
Corpus parse_corpus(std::string_view text, const std::string& origin = "<memory>");

struct PositivePair {
  std::string article_id;
  int simple_id = 0;
  int standard_id = 0;
  std::optional<double> score;

  friend bool operator==(const PositivePair&, const PositivePair&) = default;
};

/// Reads `article_id  simple_index  standard_index [score]`.
std::vector<PositivePair> load_pairs(const std::string& path);
std::vector<PositivePair> parse_pairs(std::string_view text,
                                      const std::string& origin = "<memory>");

/// Per-pair similarity scores keyed by (article, simple id, standard id).
/// Shares the alignment TSV layout.
class ScoreTable {
 public:
  void set(const std::string& article_id, int simple_id, int standard_id,
           double score);
  std::optional<double> get(const std::string& article_id, int simple_id,
                            int standard_id) const;
  std::size_t size() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }

  const std::map<std::tuple<std::string, int, int>, double>& entries() const {
    return scores_;
  }

 private:
  std::map<std::tuple<std::string, int, int>, double> scores_;
};

ScoreTable score_table_from_pairs(const std::vector<PositivePair>& rows);

enum class NegativePolicy { Fail, Skip };

struct SampleOptions {
  std::size_t n_within = 9;
  std::size_t n_cross = 0;
  std::uint64_t seed = 0;
  NegativePolicy on_insufficient = NegativePolicy::Fail;
  /// When set, within-article negatives must score below `negative_threshold`.
  const ScoreTable* negative_scores = nullptr;
  double negative_threshold = 0.67;
};

/// Two samples per positive pair, one per direction. Within-article and
/// cross-article negatives use separate sub-seeded streams per pair.
std::vector<TrainingSample> build_samples(const std::vector<PositivePair>& pairs,
                                          const Corpus& articles,
                                          const SampleOptions& options);

std::map<std::string, std::size_t> count_word_frequencies(const Corpus& corpus);

/// Split on runs of ASCII whitespace.
std::vector<std::string_view> split_whitespace(std::string_view s);
/// Split on a single character, keeping empty fields.
std::vector<std::string_view> split_char(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string read_file(const std::string& path);

/// Sample file: one line per sample,
/// `direction  target_article  target_id  positive_article  positive_id  negatives`
/// where negatives is a space-separated list of `article_id:sentence_id`.
std::string format_samples(const std::vector<TrainingSample>& samples);
std::vector<TrainingSample> parse_samples(std::string_view text,
                                          const Corpus& corpus,
                                          const std::string& origin = "<memory>");

}  // namespace clsm
