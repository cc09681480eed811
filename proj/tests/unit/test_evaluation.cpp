#include "doctest.h"

#include "clsm/evaluation.hpp"
#include "support/fixtures.hpp"
#include "support/test_util.hpp"

using namespace clsm;
using clsm::testing::make_sentence;

TEST_CASE("labels parse in several spellings") {
  CHECK(parse_label("good") == MatchLabel::Good);
  CHECK(parse_label("Good Partial") == MatchLabel::GoodPartial);
  CHECK(parse_label("good_partial") == MatchLabel::GoodPartial);
  CHECK(parse_label("PARTIAL") == MatchLabel::Partial);
  CHECK(parse_label("bad") == MatchLabel::Bad);
  CHECK_THROWS_KIND(parse_label("great"), ErrorKind::ParseError);
}

TEST_CASE("gold files") {
  auto gold = parse_gold("a\t0\t1\tgood\na\t1\t0\tbad\n");
  REQUIRE(gold.size() == 2);
  CHECK(gold[0].standard_id == 1);
  CHECK(gold[1].label == MatchLabel::Bad);
  CHECK_THROWS_KIND(parse_gold("a\t0\t1\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_gold("a\tx\t1\tgood\n"), ErrorKind::ParseError);
  CHECK_THROWS_KIND(parse_gold("a\t0\t1\tsuperb\n"), ErrorKind::ParseError);
}

TEST_CASE("PRF on the hand-counted fixture") {
  auto prf = evaluate_alignment(clsm::testing::prf_prediction(), clsm::testing::prf_gold());
  CHECK(prf.tp == 2);
  CHECK(prf.fp == 1);
  CHECK(prf.fn == 2);
  CHECK(std::abs(prf.precision - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(prf.recall - 0.5) < 1e-12);
  CHECK(std::abs(prf.f1 - 4.0 / 7.0) < 1e-12);
  CHECK(format_prf(prf) == "P=0.666667 R=0.500000 F1=0.571429 tp=2 fp=1 fn=2");

  // counting Partial as positive turns the false positive into a hit
  LabelSet loose = {MatchLabel::Good, MatchLabel::Partial};
  auto wider = evaluate_alignment(clsm::testing::prf_prediction(), clsm::testing::prf_gold(), loose);
  CHECK(wider.tp == 3);
  CHECK(wider.fp == 0);
  CHECK(wider.fn == 2);

  auto per = evaluate_alignment_by_article(clsm::testing::prf_prediction(), clsm::testing::prf_gold());
  CHECK(per.at("A").tp == 2);
  CHECK(per.at("A").fn == 1);
  CHECK(per.at("B").fn == 1);
  CHECK(per.at("B").precision == 0.0);
}

TEST_CASE("PRF edge cases") {
  auto none = make_prf(0, 0, 3);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  auto perfect = make_prf(4, 0, 0);
  CHECK(perfect.f1 == 1.0);

  AlignmentResult stray;
  stray.article_id = "Z";
  stray.pairs = {{0, 0, 1.0}};
  CHECK_THROWS_KIND(evaluate_alignment(std::vector<AlignmentResult>{stray}, clsm::testing::prf_gold()),
                    ErrorKind::MissingGold);
}

TEST_CASE("threshold sweep has nonincreasing recall") {
  Eigen::MatrixXd s(3, 3);
  s << 0.9, 0.2, 0.1,
       0.3, 0.4, 0.8,
       0.1, 0.7, 0.2;
  SimilarityMatrix m;
  m.article_id = "A";
  m.scores = s;
  std::vector<AnnotatedPair> gold = {{"A", 0, 0, MatchLabel::Good},
                                     {"A", 1, 2, MatchLabel::Good},
                                     {"A", 2, 0, MatchLabel::Good}};
  std::vector<double> thresholds = {0.0, 0.5, 0.75, 0.85, 0.95};
  auto curve = precision_recall_curve(std::vector<SimilarityMatrix>{m}, gold, thresholds);
  REQUIRE(curve.size() == 5);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].prf.recall <= curve[i - 1].prf.recall);
  // greedy picks (0,0) 0.9, (1,2) 0.8, (2,1) 0.7
  CHECK(curve[0].prf.tp == 2);
  CHECK(curve[0].prf.fp == 1);
  CHECK(curve[2].prf.fp == 0);
  CHECK(curve[4].prf.tp == 0);
  CHECK(best_f1(curve).threshold == 0.75);

  std::vector<double> unsorted = {0.5, 0.1};
  CHECK_THROWS_KIND(precision_recall_curve(std::vector<SimilarityMatrix>{m}, gold, unsorted),
                    ErrorKind::ConfigError);
}

TEST_CASE("selection accuracy counts strict wins only") {
  TrainingSample s;
  s.target = make_sentence("a b");
  s.positive = make_sentence("a b");
  s.negatives = {make_sentence("c"), make_sentence("d")};
  auto overlap = [](const Sentence& x, const Sentence& y) {
    double n = 0;
    for (const auto& t : x.tokens)
      for (const auto& u : y.tokens) n += t == u;
    return n;
  };
  CHECK(selection_accuracy(overlap, std::vector<TrainingSample>{s}) == 1.0);
  auto tie = s;
  tie.negatives.push_back(make_sentence("a b"));
  CHECK(selection_accuracy(overlap, std::vector<TrainingSample>{s, tie}) == 0.5);
  CHECK_THROWS_KIND(selection_accuracy(overlap, std::vector<TrainingSample>{}), ErrorKind::ConfigError);
}

TEST_CASE("activation trace mirrors the forward pass") {
  std::map<std::string, std::size_t> counts;
  for (const char* w : {"the", "cat", "sat", "on", "mat", "dog"})
    for (auto& t : word_to_trigrams(w)) ++counts[t];
  auto model = make_trigram_model(build_trigram_vocab(counts, 1), 10, 4, 6);
  auto a = make_sentence("the cat sat on the mat");
  auto b = make_sentence("a dog sat");
  auto trace = trace_activations(a, b, model, 4);
  REQUIRE(trace.size() == 4);
  auto fa = forward(a, model);
  auto fb = forward(b, model);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(trace[k].neuron_index);
    CHECK(trace[k].value_a == fa.v(i));
    CHECK(trace[k].value_b == fb.v(i));
    CHECK(trace[k].position_a == fa.argmax_t[trace[k].neuron_index]);
    if (k) CHECK(std::min(trace[k].value_a, trace[k].value_b) <=
                 std::min(trace[k - 1].value_a, trace[k - 1].value_b));
    CHECK(trace[k].words_b.size() <= 3);
  }
  CHECK(trace_activations(a, b, model, 0).empty());
  CHECK(trace_activations(a, b, model, 100).size() == 10);

  auto same = trace_activations(a, a, model, 10);
  for (const auto& m : same) {
    CHECK(m.position_a == m.position_b);
    CHECK(m.words_a == m.words_b);
  }
  auto text = format_trace(std::vector<ActivationMatch>{trace[0]});
  CHECK(text.find(std::to_string(trace[0].neuron_index) + "\t") == 0);
}
