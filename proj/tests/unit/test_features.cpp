#include "doctest.h"

#include <cmath>

#include "clsm/features.hpp"
#include "support/test_util.hpp"

using namespace clsm;
using clsm::testing::make_sentence;

TEST_CASE("word_to_trigrams pads with #") {
  CHECK(word_to_trigrams("boy") == std::vector<std::string>{"#bo", "boy", "oy#"});
  CHECK(word_to_trigrams("a") == std::vector<std::string>{"#a#"});
  CHECK(word_to_trigrams("to") == std::vector<std::string>{"#to", "to#"});
  CHECK(word_to_trigrams("aaaa").size() == 4);
  // one trigram per character, multi-byte characters kept whole
  CHECK(word_to_trigrams("né") == std::vector<std::string>{"#né", "né#"});
}

TEST_CASE("trigram vocabulary keeps frequent trigrams in frequency order") {
  std::map<std::string, std::size_t> counts = {{"abc", 3}, {"#ab", 7}, {"bc#", 3}, {"zzz", 1}};
  auto vocab = build_trigram_vocab(counts, 2);
  CHECK(vocab.trigrams() == std::vector<std::string>{"#ab", "abc", "bc#"});
  CHECK(vocab.lookup("#ab") == 0);
  CHECK(vocab.lookup("bc#") == 2);
  CHECK(vocab.lookup("zzz") == vocab.unk_index());
  CHECK(vocab.unk_index() == 3);
  CHECK(vocab.dimension() == 4);
}

TEST_CASE("vocabulary file round-trips, including #-prefixed trigrams") {
  auto vocab = build_trigram_vocab({{"#bo", 9}, {"boy", 9}, {"oy#", 8}}, 1);
  auto text = format_vocab(vocab);
  CHECK(text == "#bo\t0\nboy\t1\noy#\t2\n<UNK>\t3\n");
  auto back = parse_vocab(text);
  CHECK(back.trigrams() == vocab.trigrams());
  CHECK(back.unk_index() == 3);
  CHECK_THROWS_KIND(parse_vocab("abc\t0\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_vocab("abc\t1\n<UNK>\t2\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_vocab("abc\t0\nabc\t1\n<UNK>\t2\n"), ErrorKind::ParseError);
}

TEST_CASE("build_trigram_vocab counts over the corpus") {
  Corpus c = parse_corpus("a\tsimple\t0\tboy boy\na\tstandard\t0\tboy toy\n");
  auto counts = count_trigrams(c);
  CHECK(counts["boy"] == 3);
  CHECK(counts["oy#"] == 4);
  auto vocab = build_trigram_vocab(c, 3);
  CHECK(vocab.trigrams() == std::vector<std::string>{"oy#", "#bo", "boy"});
}

TEST_CASE("featurizer produces accumulated trigram counts") {
  TrigramVocab vocab({"#aa", "aaa", "aa#"}, 1);
  Featurizer f(vocab);
  auto counts = std::get<TrigramCounts>(f("aaaa"));
  CHECK(counts.entries == std::vector<std::pair<int, double>>{{0, 1.0}, {1, 2.0}, {2, 1.0}});
  auto unknown = std::get<TrigramCounts>(f("xy"));
  CHECK(unknown.entries == std::vector<std::pair<int, double>>{{3, 2.0}});
  CHECK(f.dimension() == 4);
  CHECK(f.is_trigram());
}

TEST_CASE("embedding file parsing") {
  auto table = parse_embeddings("3 2\ncat 1 2\ndog 3 4\nmat -1 0.5\n");
  CHECK(table.rows() == 4);  // UNK appended
  CHECK(table.dimension() == 2);
  CHECK(table.lookup("dog") == 1);
  CHECK(table.lookup("bird") == table.unk_row());
  CHECK(table.vectors().row(table.unk_row()).isZero());
  CHECK(table.vectors()(2, 1) == 0.5);

  auto with_unk = parse_embeddings("2 1\n<UNK> 9\ncat 1\n");
  CHECK(with_unk.rows() == 2);
  CHECK(with_unk.unk_row() == 0);

  CHECK_THROWS_KIND(parse_embeddings("2 2\ncat 1 2\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_embeddings("1 2\ncat 1 2 3\n"), ErrorKind::DimensionMismatch);
  CHECK_THROWS_KIND(parse_embeddings("2 1\ncat 1\ncat 2\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_embeddings("1 1\ncat nan\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_embeddings("one two\n"), ErrorKind::ParseError);
}

TEST_CASE("restrict_vocabulary maps rare words to UNK but keeps rows") {
  auto table = parse_embeddings("2 1\ncat 1\ndog 2\n");
  table.restrict_vocabulary({{"cat", 10}, {"dog", 2}}, 5);
  CHECK(table.lookup("cat") == 0);
  CHECK(table.lookup("dog") == table.unk_row());
  CHECK(table.rows() == 3);
  CHECK_FALSE(table.indexed(1));
  CHECK(table.indexed(0));
}

TEST_CASE("context windows zero-pad at sentence edges") {
  TrigramVocab vocab({"#a#", "#b#", "#c#"}, 1);
  Featurizer f(vocab);
  auto windows = make_windows(make_sentence("a b c"), f);
  REQUIRE(windows.size() == 3);
  CHECK(windows[0].dimension() == 12);
  CHECK_FALSE(windows[0].slots[0].has_value());
  CHECK(windows[0].slots[1].has_value());
  CHECK_FALSE(windows[2].slots[2].has_value());

  Eigen::VectorXd l1 = windows[1].dense();
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(12);
  expect(0) = 1;      // a in the left slot
  expect(4 + 1) = 1;  // b in the centre slot
  expect(8 + 2) = 1;  // c in the right slot
  CHECK(l1 == expect);

  auto single = make_windows(make_sentence("b"), f);
  REQUIRE(single.size() == 1);
  CHECK(single[0].dense().sum() == 1.0);

  auto wide = make_windows(make_sentence("a b c"), f, 5);
  CHECK(wide[0].dimension() == 20);
  CHECK_THROWS_KIND(make_windows(make_sentence("a"), f, 2), ErrorKind::DimensionMismatch);
}

TEST_CASE("embedding windows hold the word vectors") {
  auto table = parse_embeddings("2 2\nx 1 2\ny 3 4\n");
  Featurizer f(table);
  auto windows = make_windows(make_sentence("x y zz"), f);
  Eigen::VectorXd l = windows[1].dense();
  CHECK(l.size() == 6);
  CHECK(l(0) == 1);
  CHECK(l(1) == 2);
  CHECK(l(2) == 3);
  CHECK(l(3) == 4);
  CHECK(l(4) == 0);  // UNK row
  CHECK(l(5) == 0);
}
