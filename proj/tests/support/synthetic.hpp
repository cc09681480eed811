#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "clsm/corpus.hpp"

namespace clsm::testing {

// Articles whose aligned sentence pairs share one "signature" topic word.
// Topics come from a small pool spelled with letters that never occur in
// filler words; within an article every sentence carries a distinct topic.
struct SyntheticOptions {
  std::size_t articles = 200;
  std::size_t sentences_per_side = 12;
  std::size_t aligned_per_article = 10;
  std::size_t min_words = 6;
  std::size_t max_words = 12;
  std::size_t signature_length = 6;
  std::size_t topic_pool = 60;
  std::size_t filler_words = 4000;
  bool inject_signatures = true;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  Corpus corpus;
  std::vector<PositivePair> pairs;
  // (article, side, sentence id) -> signature word, for every sentence
  std::map<std::tuple<std::string, Side, int>, std::string> signature;

  std::string corpus_tsv() const;
  std::string pairs_tsv() const;
  std::string gold_tsv() const;
};

SyntheticData make_synthetic(const SyntheticOptions& options);

}  // namespace clsm::testing
