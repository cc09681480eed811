#include "clsm/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "clsm/error.hpp"

namespace clsm {

RelationCategories::RelationCategories()
    : categories_{"subject", "object", "modifier", "complement", "root", "other"} {}

RelationCategories::RelationCategories(std::set<std::string> categories)
    : categories_(std::move(categories)) {
  if (categories_.empty()) throw Error(ErrorKind::ConfigError, "empty relation category set");
}

std::pair<std::string, std::string> WordSimTable::key(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void WordSimTable::set(const std::string& a, const std::string& b, double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0))
    throw Error(ErrorKind::ParseError, "word similarity must lie in [0, 1]");
  table_[key(a, b)] = sigma;
}

double WordSimTable::operator()(const std::string& a, const std::string& b) const {
  if (a == b) return 1.0;
  auto it = table_.find(key(a, b));
  return it == table_.end() ? 0.0 : it->second;
}

WordSimTable parse_wordsim(std::string_view text, const std::string& origin) {
  WordSimTable table;
  std::size_t line_no = 0;
  for (auto line : split_char(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    auto f = split_char(line, '\t');
    if (f.size() != 3) throw ParseError(origin, line_no, "expected `word1<TAB>word2<TAB>sigma`");
    std::string buf(trim(f[2]));
    char* end = nullptr;
    const double sigma = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !(sigma >= 0.0 && sigma <= 1.0))
      throw ParseError(origin, line_no, "sigma must be a number in [0, 1]");
    table.set(std::string(trim(f[0])), std::string(trim(f[1])), sigma);
  }
  return table;
}

WordSimTable load_wordsim(const std::string& path) { return parse_wordsim(read_file(path), path); }

ParsedSentence degenerate_parse(const Sentence& sentence) {
  ParsedSentence p{sentence, {}};
  for (const auto& w : sentence.tokens) p.triplets.push_back({w, w, "root", "root"});
  return p;
}

double relation_similarity(const std::string& r1, const std::string& r2,
                           const RelationCategories& categories) {
  for (const auto* r : {&r1, &r2})
    if (!categories.contains(*r))
      throw Error(ErrorKind::UnknownCategory, "unknown relation category '" + *r + "'");
  return r1 == r2 ? 0.5 : 0.0;
}

double structural_word_similarity(const DependencyTriplet& t1, const DependencyTriplet& t2,
                                  const WordSimTable& table,
                                  const RelationCategories& categories) {
  return table(t1.word, t2.word) +
         table(t1.head, t2.head) *
             relation_similarity(t1.relation_category, t2.relation_category, categories);
}

namespace {

double directed_similarity(const ParsedSentence& from, const ParsedSentence& to,
                           const WordSimTable& table, const RelationCategories& categories) {
  if (from.triplets.empty() || to.triplets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& a : from.triplets) {
    double best = 0.0;
    for (const auto& b : to.triplets)
      best = std::max(best, structural_word_similarity(a, b, table, categories));
    sum += best;
  }
  return sum / (1.5 * static_cast<double>(from.triplets.size()));
}

}  // namespace

double sentence_similarity(const ParsedSentence& p1, const ParsedSentence& p2,
                           const WordSimTable& table, const RelationCategories& categories) {
  const std::size_t n1 = p1.triplets.size(), n2 = p2.triplets.size();
  if (n1 < n2) return directed_similarity(p1, p2, table, categories);
  if (n2 < n1) return directed_similarity(p2, p1, table, categories);
  return 0.5 * (directed_similarity(p1, p2, table, categories) +
                directed_similarity(p2, p1, table, categories));
}

void ParseBank::add(const Key& key, std::vector<DependencyTriplet> triplets) {
  parses_[key] = std::move(triplets);
}

ParsedSentence ParseBank::parsed(const Sentence& sentence) const {
  auto it = parses_.find({sentence.article_id, sentence.side, sentence.sentence_id});
  if (it == parses_.end() || it->second.size() != sentence.size()) return degenerate_parse(sentence);
  return ParsedSentence{sentence, it->second};
}

ParseBank parse_parses(std::string_view text, const std::string& origin) {
  ParseBank bank;
  std::map<ParseBank::Key, std::vector<std::pair<int, DependencyTriplet>>> rows;
  std::size_t line_no = 0;
  for (auto line : split_char(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      auto f = split_whitespace(line);
      if (!f.empty() && f[0] == "#categories") {
        std::set<std::string> cats;
        for (std::size_t i = 1; i < f.size(); ++i) cats.emplace(f[i]);
        if (cats.empty()) throw ParseError(origin, line_no, "empty #categories header");
        bank.categories = RelationCategories(std::move(cats));
      }
      continue;
    }
    auto f = split_char(line, '\t');
    if (f.size() != 8) throw ParseError(origin, line_no, "expected 8 tab-separated fields");
    int sentence_index = 0, token_index = 0;
    Side side;
    try {
      side = parse_side(trim(f[1]));
      sentence_index = std::stoi(std::string(f[2]));
      token_index = std::stoi(std::string(f[3]));
    } catch (const Error& e) {
      throw ParseError(origin, line_no, e.what());
    } catch (const std::exception&) {
      throw ParseError(origin, line_no, "bad index field");
    }
    DependencyTriplet t{std::string(trim(f[4])), std::string(trim(f[5])),
                        std::string(trim(f[6])), std::string(trim(f[7]))};
    for (auto* s : {&t.word, &t.head})
      for (char& c : *s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (t.word.empty()) throw ParseError(origin, line_no, "empty word");
    if (!bank.categories.contains(t.relation_category))
      throw Error(ErrorKind::UnknownCategory, origin + ":" + std::to_string(line_no) +
                                                  ": unknown relation category '" +
                                                  t.relation_category + "'");
    rows[{std::string(trim(f[0])), side, sentence_index}].emplace_back(token_index, std::move(t));
  }
  for (auto& [key, toks] : rows) {
    std::sort(toks.begin(), toks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<DependencyTriplet> triplets;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].first != static_cast<int>(i))
        throw ParseError(origin, 0,
                         "token indices of sentence " + std::to_string(std::get<2>(key)) +
                             " in article '" + std::get<0>(key) + "' are not 0..n-1");
      triplets.push_back(std::move(toks[i].second));
    }
    bank.add(key, std::move(triplets));
  }
  return bank;
}

ParseBank load_parses(const std::string& path) { return parse_parses(read_file(path), path); }

}  // namespace clsm
