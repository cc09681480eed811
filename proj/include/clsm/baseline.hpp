#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "clsm/corpus.hpp"

namespace clsm {

/// Closed set of coarse dependency-relation categories.
class RelationCategories {
 public:
  /// subject, object, modifier, complement, root, other
  RelationCategories();
  explicit RelationCategories(std::set<std::string> categories);

  bool contains(const std::string& c) const { return categories_.count(c) > 0; }
  const std::set<std::string>& names() const { return categories_; }

 private:
  std::set<std::string> categories_;
};

struct DependencyTriplet {
  std::string word;
  std::string head;
  std::string relation;
  std::string relation_category;
};

/// Symmetric word similarity; identical words score 1, unknown pairs 0.
class WordSimTable {
 public:
  void set(const std::string& a, const std::string& b, double sigma);
  double operator()(const std::string& a, const std::string& b) const;
  std::size_t size() const { return table_.size(); }

 private:
  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b);
  std::map<std::pair<std::string, std::string>, double> table_;
};

/// `word1  word2  sigma` per line; sigma must lie in [0, 1].
WordSimTable load_wordsim(const std::string& path);
WordSimTable parse_wordsim(std::string_view text, const std::string& origin = "<memory>");

struct ParsedSentence {
  Sentence sentence;
  std::vector<DependencyTriplet> triplets;  // one per token
};

/// Each word is its own head under category "root".
ParsedSentence degenerate_parse(const Sentence& sentence);

/// 0.5 for the same category, 0 otherwise. Throws UnknownCategory for
/// names outside `categories`.
double relation_similarity(const std::string& r1, const std::string& r2,
                           const RelationCategories& categories = RelationCategories());

/// sigma(w1, w2) + sigma(h1, h2) * sigma_r(r1, r2), in [0, 1.5].
double structural_word_similarity(const DependencyTriplet& t1, const DependencyTriplet& t2,
                                  const WordSimTable& table,
                                  const RelationCategories& categories = RelationCategories());

/// Mean over the shorter sentence's words of their best structural match in
/// the other sentence, divided by 1.5. Equal lengths average both directions.
double sentence_similarity(const ParsedSentence& p1, const ParsedSentence& p2,
                           const WordSimTable& table,
                           const RelationCategories& categories = RelationCategories());

/// Parses keyed by (article_id, side, sentence_index).
class ParseBank {
 public:
  using Key = std::tuple<std::string, Side, int>;

  RelationCategories categories;

  void add(const Key& key, std::vector<DependencyTriplet> triplets);
  /// Stored parse when its length matches the sentence, else the degenerate one.
  ParsedSentence parsed(const Sentence& sentence) const;
  std::size_t size() const { return parses_.size(); }

 private:
  std::map<Key, std::vector<DependencyTriplet>> parses_;
};

/// Parse TSV:
/// `article_id side sentence_index token_index word head relation category`.
/// An optional `#categories c1 c2 ...` header replaces the default set.
ParseBank load_parses(const std::string& path);
ParseBank parse_parses(std::string_view text, const std::string& origin = "<memory>");

}  // namespace clsm
