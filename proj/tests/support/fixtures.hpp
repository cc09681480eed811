#pragma once

#include <string>
#include <vector>

#include "clsm/alignment.hpp"
#include "clsm/baseline.hpp"
#include "clsm/evaluation.hpp"

namespace clsm::testing {

inline WordSimTable hand_wordsim() {
  WordSimTable t;
  t.set("car", "automobile", 0.9);
  t.set("drive", "operate", 0.6);
  t.set("big", "large", 0.8);
  t.set("dog", "cat", 0.3);
  t.set("run", "walk", 0.5);
  t.set("house", "home", 1.0);
  return t;
}

// Hand-entered components: word similarity, head similarity, relation
// agreement. Expected value is sw + sh * sr.
struct StructuralCase {
  DependencyTriplet a, b;
  double sw, sh, sr;
  double expected() const { return sw + sh * sr; }
};

inline std::vector<StructuralCase> structural_cases() {
  auto t = [](const char* w, const char* h, const char* r) { return DependencyTriplet{w, h, r, r}; };
  return {
      {t("car", "drive", "subject"), t("car", "drive", "subject"), 1.0, 1.0, 0.5},
      {t("car", "drive", "subject"), t("automobile", "operate", "subject"), 0.9, 0.6, 0.5},
      {t("car", "drive", "subject"), t("automobile", "operate", "object"), 0.9, 0.6, 0.0},
      {t("car", "drive", "subject"), t("automobile", "drive", "subject"), 0.9, 1.0, 0.5},
      {t("car", "drive", "object"), t("car", "drive", "modifier"), 1.0, 1.0, 0.0},
      {t("dog", "run", "subject"), t("cat", "walk", "subject"), 0.3, 0.5, 0.5},
      {t("dog", "run", "subject"), t("cat", "walk", "other"), 0.3, 0.5, 0.0},
      {t("dog", "run", "subject"), t("tree", "sky", "subject"), 0.0, 0.0, 0.5},
      {t("big", "house", "modifier"), t("large", "home", "modifier"), 0.8, 1.0, 0.5},
      {t("big", "house", "modifier"), t("large", "home", "complement"), 0.8, 1.0, 0.0},
      {t("house", "house", "root"), t("home", "home", "root"), 1.0, 1.0, 0.5},
      {t("house", "house", "root"), t("house", "house", "other"), 1.0, 1.0, 0.0},
      {t("run", "dog", "complement"), t("walk", "cat", "complement"), 0.5, 0.3, 0.5},
      {t("run", "dog", "complement"), t("walk", "cat", "subject"), 0.5, 0.3, 0.0},
      {t("car", "house", "object"), t("automobile", "home", "object"), 0.9, 1.0, 0.5},
      {t("tree", "car", "object"), t("sky", "automobile", "object"), 0.0, 0.9, 0.5},
      {t("tree", "car", "object"), t("sky", "automobile", "modifier"), 0.0, 0.9, 0.0},
      {t("big", "dog", "modifier"), t("big", "cat", "modifier"), 1.0, 0.3, 0.5},
      {t("walk", "run", "other"), t("run", "walk", "other"), 0.5, 0.5, 0.5},
      {t("operate", "drive", "root"), t("drive", "operate", "root"), 0.6, 0.6, 0.5},
  };
}

// Two articles, four Good gold pairs; the prediction hits two of them and
// adds one pair that is only labelled Partial: tp=2, fp=1, fn=2.
inline std::vector<AnnotatedPair> prf_gold() {
  return {
      {"A", 0, 0, MatchLabel::Good},    {"A", 1, 1, MatchLabel::Good},
      {"A", 2, 2, MatchLabel::Good},    {"A", 3, 3, MatchLabel::Partial},
      {"B", 0, 1, MatchLabel::Good},    {"B", 1, 0, MatchLabel::Bad},
  };
}

inline std::vector<AlignmentResult> prf_prediction() {
  AlignmentResult a;
  a.article_id = "A";
  a.pairs = {{0, 0, 0.9}, {1, 1, 0.8}, {3, 3, 0.7}};
  AlignmentResult b;
  b.article_id = "B";
  return {a, b};
}

}  // namespace clsm::testing
