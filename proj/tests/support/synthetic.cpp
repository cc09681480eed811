#include "synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "clsm/error.hpp"
#include "clsm/rng.hpp"

namespace clsm::testing {

namespace {

const std::string kFillerLetters = "abcdeilmnoprstuy";
const std::string kSignatureLetters = "fghjkqvwxz";

std::string random_word(Rng& rng, const std::string& letters, std::size_t len) {
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += letters[uniform_index(rng, letters.size())];
  return w;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticOptions& o) {
  Rng rng(o.seed);
  if (o.topic_pool < o.sentences_per_side * 2)
    throw Error(ErrorKind::ConfigError, "topic_pool too small for sentences_per_side");
  std::vector<std::string> filler;
  {
    std::set<std::string> seen;
    while (filler.size() < o.filler_words) {
      auto w = random_word(rng, kFillerLetters, 3 + uniform_index(rng, 5));
      if (seen.insert(w).second) filler.push_back(w);
    }
  }
  std::vector<std::string> topics;
  {
    std::set<std::string> seen;
    while (topics.size() < o.topic_pool) {
      auto w = random_word(rng, kSignatureLetters, o.signature_length);
      if (seen.insert(w).second) topics.push_back(w);
    }
  }
  // topics are unique within an article, reused across articles
  std::set<std::string> used;
  auto fresh_signature = [&] {
    for (;;) {
      const auto& w = topics[uniform_index(rng, topics.size())];
      if (used.insert(w).second) return w;
    }
  };
  auto sentence = [&](const std::string& sig) {
    std::vector<std::string> words;
    const std::size_t n = o.min_words + uniform_index(rng, o.max_words - o.min_words + 1);
    for (std::size_t i = 0; i < n; ++i) words.push_back(filler[uniform_index(rng, filler.size())]);
    if (o.inject_signatures) {
      const auto at = words.begin() + static_cast<long>(uniform_index(rng, n + 1));
      words.insert(at, sig);
    }
    return words;
  };

  SyntheticData data;
  for (std::size_t a = 0; a < o.articles; ++a) {
    ArticlePair article;
    article.article_id = "art" + std::to_string(a);
    std::vector<int> standard_order(o.sentences_per_side);
    std::iota(standard_order.begin(), standard_order.end(), 0);
    shuffle(standard_order, rng);
    used.clear();
    std::vector<std::string> simple_sig(o.sentences_per_side), standard_sig(o.sentences_per_side);
    for (std::size_t i = 0; i < o.sentences_per_side; ++i) simple_sig[i] = fresh_signature();
    for (std::size_t i = 0; i < o.sentences_per_side; ++i) standard_sig[i] = fresh_signature();
    for (std::size_t i = 0; i < o.aligned_per_article; ++i) {
      standard_sig[static_cast<std::size_t>(standard_order[i])] = simple_sig[i];
      data.pairs.push_back({article.article_id, static_cast<int>(i), standard_order[i], std::nullopt});
    }
    for (Side side : {Side::Simple, Side::Standard}) {
      auto& sigs = side == Side::Simple ? simple_sig : standard_sig;
      auto& dest = side == Side::Simple ? article.simple_sentences : article.standard_sentences;
      for (std::size_t i = 0; i < o.sentences_per_side; ++i) {
        Sentence s;
        s.tokens = sentence(sigs[i]);
        s.article_id = article.article_id;
        s.side = side;
        s.sentence_id = static_cast<int>(i);
        data.signature[{article.article_id, side, s.sentence_id}] = sigs[i];
        dest.push_back(std::move(s));
      }
    }
    data.corpus.push_back(std::move(article));
  }
  return data;
}

std::string SyntheticData::corpus_tsv() const {
  std::string out;
  for (const auto& a : corpus)
    for (Side side : {Side::Simple, Side::Standard})
      for (const auto& s : a.side(side))
        out += a.article_id + '\t' + to_string(side) + '\t' + std::to_string(s.sentence_id) + '\t' +
               join(s.tokens) + '\n';
  return out;
}

std::string SyntheticData::pairs_tsv() const {
  std::string out;
  for (const auto& p : pairs)
    out += p.article_id + '\t' + std::to_string(p.simple_id) + '\t' + std::to_string(p.standard_id) + '\n';
  return out;
}

std::string SyntheticData::gold_tsv() const {
  std::string out;
  for (const auto& p : pairs)
    out += p.article_id + '\t' + std::to_string(p.simple_id) + '\t' + std::to_string(p.standard_id) +
           "\tgood\n";
  return out;
}

}  // namespace clsm::testing
