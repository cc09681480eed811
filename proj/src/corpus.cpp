#include "clsm/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <type_traits>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "clsm/error.hpp"
#include "clsm/rng.hpp"

namespace clsm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySentence: return "EmptySentence";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateArticleId: return "DuplicateArticleId";
    case ErrorKind::InsufficientNegatives: return "InsufficientNegatives";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::UnknownCategory: return "UnknownCategory";
    case ErrorKind::MissingGold: return "MissingGold";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

const char* to_string(Side side) {
  return side == Side::Simple ? "simple" : "standard";
}

Side parse_side(std::string_view text) {
  if (text == "simple") return Side::Simple;
  if (text == "standard") return Side::Standard;
  throw Error(ErrorKind::ParseError, "unknown side tag '" + std::string(text) + "'");
}

Side opposite(Side side) {
  return side == Side::Simple ? Side::Standard : Side::Simple;
}

const char* to_string(Direction d) {
  return d == Direction::SimpleToStandard ? "simple_to_standard"
                                          : "standard_to_simple";
}

Direction parse_direction(std::string_view text) {
  if (text == "simple_to_standard") return Direction::SimpleToStandard;
  if (text == "standard_to_simple") return Direction::StandardToSimple;
  throw Error(ErrorKind::ParseError, "unknown direction '" + std::string(text) + "'");
}

std::optional<std::size_t> ArticlePair::position(Side s, int sentence_id) const {
  const auto& list = side(s);
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i].sentence_id == sentence_id) return i;
  return std::nullopt;
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is missing on older toolchains
    std::string buf(s);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  }
}

// Iterates non-comment, non-blank lines with 1-based line numbers.
template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!trim(line).empty() && line.front() != '#') f(line, line_no);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

int parse_int_field(std::string_view field, const std::string& origin,
                    std::size_t line, const char* what) {
  int v = 0;
  if (!parse_number(field, v))
    throw ParseError(origin, line,
                     std::string("bad ") + what + " '" + std::string(field) + "'");
  return v;
}

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = s.find(sep, pos);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Sentence tokenize(std::string_view raw_line) {
  Sentence s;
  for (auto tok : split_whitespace(raw_line)) {
    std::string lowered(tok);
    for (char& c : lowered)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    s.tokens.push_back(std::move(lowered));
  }
  if (s.tokens.empty()) throw Error(ErrorKind::EmptySentence, "sentence has no tokens");
  return s;
}

Corpus parse_corpus(std::string_view text, const std::string& origin) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> article_index;
  std::string current;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto fields = split_char(line, '\t');
    if (fields.size() < 4)
      throw ParseError(origin, line_no, "expected 4 tab-separated fields");
    std::string article_id(trim(fields[0]));
    if (article_id.empty()) throw ParseError(origin, line_no, "empty article id");

    Side side;
    try {
      side = parse_side(trim(fields[1]));
    } catch (const Error& e) {
      throw ParseError(origin, line_no, e.what());
    }
    int index = parse_int_field(fields[2], origin, line_no, "sentence index");

    // the sentence text is everything after the third tab
    std::size_t text_start = fields[0].size() + fields[1].size() + fields[2].size() + 3;
    Sentence s;
    try {
      s = tokenize(line.substr(text_start));
    } catch (const Error&) {
      throw ParseError(origin, line_no, "empty sentence text");
    }
    s.article_id = article_id;
    s.side = side;
    s.sentence_id = index;

    auto it = article_index.find(article_id);
    if (it == article_index.end()) {
      article_index.emplace(article_id, corpus.size());
      corpus.push_back(ArticlePair{article_id, {}, {}});
    } else if (current != article_id) {
      throw Error(ErrorKind::DuplicateArticleId,
                  origin + ":" + std::to_string(line_no) +
                      ": article '" + article_id + "' appears in two separate blocks");
    }
    current = article_id;

    ArticlePair& article = corpus[article_index[article_id]];
    if (article.position(side, index))
      throw ParseError(origin, line_no,
                       "duplicate sentence index " + std::to_string(index));
    article.side(side).push_back(std::move(s));
  });
  return corpus;
}

Corpus load_corpus(const std::string& path, CorpusFormat format) {
  switch (format) {
    case CorpusFormat::Tsv: return parse_corpus(read_file(path), path);
  }
  throw Error(ErrorKind::ConfigError, "unsupported corpus format");
}

std::vector<PositivePair> parse_pairs(std::string_view text, const std::string& origin) {
  std::vector<PositivePair> pairs;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto fields = split_char(line, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError(origin, line_no, "expected 3 or 4 tab-separated fields");
    PositivePair p;
    p.article_id = std::string(trim(fields[0]));
    p.simple_id = parse_int_field(fields[1], origin, line_no, "simple index");
    p.standard_id = parse_int_field(fields[2], origin, line_no, "standard index");
    if (fields.size() == 4) {
      double score = 0;
      if (!parse_number(fields[3], score))
        throw ParseError(origin, line_no, "bad score '" + std::string(fields[3]) + "'");
      p.score = score;
    }
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::vector<PositivePair> load_pairs(const std::string& path) {
  return parse_pairs(read_file(path), path);
}

void ScoreTable::set(const std::string& article_id, int simple_id, int standard_id,
                     double score) {
  scores_[{article_id, simple_id, standard_id}] = score;
}

std::optional<double> ScoreTable::get(const std::string& article_id, int simple_id,
                                      int standard_id) const {
  auto it = scores_.find({article_id, simple_id, standard_id});
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

ScoreTable score_table_from_pairs(const std::vector<PositivePair>& rows) {
  ScoreTable table;
  for (const auto& r : rows) {
    if (!r.score)
      throw Error(ErrorKind::ParseError,
                  "score table row for article '" + r.article_id + "' has no score");
    table.set(r.article_id, r.simple_id, r.standard_id, *r.score);
  }
  return table;
}

namespace {

struct DirectionDraw {
  const Sentence* target;
  const Sentence* positive;
  std::vector<const Sentence*> negatives;
};

// Counterpart-side sentences of all articles, used for cross-article draws.
struct SidePool {
  std::vector<std::size_t> offsets;  // prefix sums of side sizes per article
  std::size_t total() const { return offsets.back(); }
};

SidePool make_pool(const Corpus& corpus, Side side) {
  SidePool pool;
  pool.offsets.push_back(0);
  for (const auto& a : corpus) pool.offsets.push_back(pool.offsets.back() + a.side(side).size());
  return pool;
}

std::string pair_key(const std::string& article, Direction d, int target_id) {
  return article + '\x1f' + to_string(d) + '\x1f' + std::to_string(target_id);
}

}  // namespace

std::vector<TrainingSample> build_samples(const std::vector<PositivePair>& pairs,
                                          const Corpus& articles,
                                          const SampleOptions& options) {
  if (options.n_within < 1)
    throw Error(ErrorKind::ConfigError, "n_within must be at least 1");

  std::unordered_map<std::string, std::size_t> article_index;
  for (std::size_t i = 0; i < articles.size(); ++i)
    article_index.emplace(articles[i].article_id, i);

  const SidePool pools[2] = {make_pool(articles, Side::Simple),
                             make_pool(articles, Side::Standard)};

  std::vector<TrainingSample> samples;
  samples.reserve(pairs.size() * 2);

  for (const auto& pair : pairs) {
    auto ait = article_index.find(pair.article_id);
    if (ait == article_index.end())
      throw Error(ErrorKind::ParseError,
                  "positive pair references unknown article '" + pair.article_id + "'");
    const std::size_t a_idx = ait->second;
    const ArticlePair& article = articles[a_idx];
    auto simple_pos = article.position(Side::Simple, pair.simple_id);
    auto standard_pos = article.position(Side::Standard, pair.standard_id);
    if (!simple_pos || !standard_pos)
      throw Error(ErrorKind::ParseError,
                  "positive pair references unknown sentence in article '" +
                      pair.article_id + "'");

    DirectionDraw draws[2];
    bool insufficient = false;
    for (int d = 0; d < 2 && !insufficient; ++d) {
      const Direction dir = d == 0 ? Direction::SimpleToStandard : Direction::StandardToSimple;
      const Side target_side = d == 0 ? Side::Simple : Side::Standard;
      const Side cand_side = opposite(target_side);
      const Sentence& target = article.side(target_side)[d == 0 ? *simple_pos : *standard_pos];
      const Sentence& positive = article.side(cand_side)[d == 0 ? *standard_pos : *simple_pos];

      std::vector<const Sentence*> within;
      for (const auto& s : article.side(cand_side)) {
        if (s.sentence_id == positive.sentence_id) continue;
        if (options.negative_scores) {
          const int sim_id = d == 0 ? target.sentence_id : s.sentence_id;
          const int std_id = d == 0 ? s.sentence_id : target.sentence_id;
          auto score = options.negative_scores->get(article.article_id, sim_id, std_id);
          if (score && *score >= options.negative_threshold) continue;
        }
        within.push_back(&s);
      }

      const std::size_t pool_total = pools[d == 0 ? 1 : 0].total();
      const std::size_t own = article.side(cand_side).size();
      if (within.size() < options.n_within || pool_total - own < options.n_cross) {
        insufficient = true;
        break;
      }

      DirectionDraw& draw = draws[d];
      draw.target = &target;
      draw.positive = &positive;

      const std::string key = pair_key(article.article_id, dir, target.sentence_id);
      Rng within_rng(derive_seed(options.seed, "within\x1f" + key));
      for (std::size_t k : sample_without_replacement(within.size(), options.n_within, within_rng))
        draw.negatives.push_back(within[k]);

      if (options.n_cross > 0) {
        const SidePool& pool = pools[d == 0 ? 1 : 0];
        Rng cross_rng(derive_seed(options.seed, "cross\x1f" + key));
        std::vector<std::size_t> chosen;
        while (chosen.size() < options.n_cross) {
          // global index over other articles' sentences, skipping this article
          std::size_t g = uniform_index(cross_rng, pool_total - own);
          if (g >= pool.offsets[a_idx]) g += own;
          if (std::find(chosen.begin(), chosen.end(), g) != chosen.end()) continue;
          chosen.push_back(g);
          auto up = std::upper_bound(pool.offsets.begin(), pool.offsets.end(), g);
          std::size_t owner = static_cast<std::size_t>(up - pool.offsets.begin()) - 1;
          draw.negatives.push_back(&articles[owner].side(cand_side)[g - pool.offsets[owner]]);
        }
      }
    }

    if (insufficient) {
      if (options.on_insufficient == NegativePolicy::Skip) continue;
      throw Error(ErrorKind::InsufficientNegatives,
                  "article '" + article.article_id + "' cannot supply " +
                      std::to_string(options.n_within) + " within-article and " +
                      std::to_string(options.n_cross) + " cross-article negatives");
    }

    for (int d = 0; d < 2; ++d) {
      TrainingSample s;
      s.direction = d == 0 ? Direction::SimpleToStandard : Direction::StandardToSimple;
      s.target = *draws[d].target;
      s.positive = *draws[d].positive;
      for (const Sentence* n : draws[d].negatives) s.negatives.push_back(*n);
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

std::map<std::string, std::size_t> count_word_frequencies(const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& article : corpus)
    for (Side side : {Side::Simple, Side::Standard})
      for (const auto& s : article.side(side))
        for (const auto& tok : s.tokens) ++counts[tok];
  return counts;
}

std::string format_samples(const std::vector<TrainingSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += to_string(s.direction);
    out += '\t' + s.target.article_id + '\t' + std::to_string(s.target.sentence_id);
    out += '\t' + s.positive.article_id + '\t' + std::to_string(s.positive.sentence_id);
    out += '\t';
    for (std::size_t i = 0; i < s.negatives.size(); ++i) {
      if (i) out += ' ';
      out += s.negatives[i].article_id + ':' + std::to_string(s.negatives[i].sentence_id);
    }
    out += '\n';
  }
  return out;
}

std::vector<TrainingSample> parse_samples(std::string_view text, const Corpus& corpus,
                                          const std::string& origin) {
  std::unordered_map<std::string, const ArticlePair*> by_id;
  for (const auto& a : corpus) by_id.emplace(a.article_id, &a);

  auto lookup = [&](std::string_view article, Side side, int id, std::size_t line_no)
      -> const Sentence& {
    auto it = by_id.find(std::string(article));
    if (it == by_id.end())
      throw ParseError(origin, line_no, "unknown article '" + std::string(article) + "'");
    auto pos = it->second->position(side, id);
    if (!pos)
      throw ParseError(origin, line_no, "unknown sentence " + std::to_string(id) +
                                            " in article '" + std::string(article) + "'");
    return it->second->side(side)[*pos];
  };

  std::vector<TrainingSample> samples;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto f = split_char(line, '\t');
    if (f.size() != 6) throw ParseError(origin, line_no, "expected 6 tab-separated fields");
    TrainingSample s;
    try {
      s.direction = parse_direction(f[0]);
    } catch (const Error& e) {
      throw ParseError(origin, line_no, e.what());
    }
    const Side target_side =
        s.direction == Direction::SimpleToStandard ? Side::Simple : Side::Standard;
    const Side cand_side = opposite(target_side);
    s.target = lookup(f[1], target_side, parse_int_field(f[2], origin, line_no, "id"), line_no);
    s.positive = lookup(f[3], cand_side, parse_int_field(f[4], origin, line_no, "id"), line_no);
    for (auto ref : split_whitespace(f[5])) {
      auto colon = ref.rfind(':');
      if (colon == std::string_view::npos)
        throw ParseError(origin, line_no, "bad negative reference '" + std::string(ref) + "'");
      s.negatives.push_back(lookup(ref.substr(0, colon), cand_side,
                                   parse_int_field(ref.substr(colon + 1), origin, line_no, "id"),
                                   line_no));
    }
    samples.push_back(std::move(s));
  });
  return samples;
}

}  // namespace clsm
