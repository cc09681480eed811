#include "clsm/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"

#include "clsm/alignment.hpp"
#include "clsm/baseline.hpp"
#include "clsm/corpus.hpp"
#include "clsm/error.hpp"
#include "clsm/evaluation.hpp"
#include "clsm/features.hpp"
#include "clsm/network.hpp"
#include "clsm/rng.hpp"
#include "clsm/training.hpp"

namespace clsm {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  try {
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    unsigned long long n = std::stoull(v, &pos);
    if (pos == v.size()) return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
  }
  config_error(key + ": expected a non-negative integer, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  try {
    int n = std::stoi(v, &pos);
    if (pos == v.size()) return n;
  } catch (const std::exception&) {
  }
  config_error(key + ": expected an integer, got '" + v + "'");
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || std::isnan(x))
    config_error(key + ": expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  config_error(key + ": expected true or false, got '" + v + "'");
}

struct KeySpec {
  const char* description;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define CLSM_STR(field, desc) \
  {#field, {desc, [](RunConfig& c, const std::string& v) { c.field = v; }}}
#define CLSM_SIZE(field, desc) \
  {#field, {desc, [](RunConfig& c, const std::string& v) { c.field = to_size(#field, v); }}}
#define CLSM_REAL(field, desc) \
  {#field, {desc, [](RunConfig& c, const std::string& v) { c.field = to_real(#field, v); }}}
#define CLSM_BOOL(field, desc) \
  {#field, {desc, [](RunConfig& c, const std::string& v) { c.field = to_bool(#field, v); }}}
#define CLSM_INT(field, desc) \
  {#field, {desc, [](RunConfig& c, const std::string& v) { c.field = to_int(#field, v); }}}

const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  static const std::vector<std::pair<std::string, KeySpec>> table = {
      CLSM_STR(corpus, "corpus TSV: article_id, side, sentence_index, text"),
      CLSM_STR(pairs, "positive pair TSV: article_id, simple_index, standard_index[, score]"),
      CLSM_STR(negative_scores, "score table used to filter negatives (alignment TSV layout)"),
      CLSM_STR(embeddings, "word embedding text file (header `V d`)"),
      CLSM_STR(parses, "dependency parse TSV for the baseline scorer"),
      CLSM_STR(wordsim, "word similarity TSV for the baseline scorer"),
      CLSM_STR(model, "model file"),
      CLSM_STR(vocab, "letter-trigram vocabulary file"),
      CLSM_STR(train_samples, "training sample file"),
      CLSM_STR(val_samples, "validation sample file"),
      CLSM_STR(out_dir, "output directory for build-dataset"),
      CLSM_STR(output, "output file (default: stdout)"),
      CLSM_STR(log, "training log path (default: <model>.log)"),
      CLSM_STR(gold, "gold annotation TSV"),
      CLSM_STR(alignment, "alignment TSV to evaluate"),
      CLSM_STR(scores_a, "first score table (rescore / table scorer)"),
      CLSM_STR(scores_b, "second score table (rescore)"),
      CLSM_STR(matrix_dump, "also write per-article score matrices here"),
      CLSM_SIZE(conv_dim, "convolution / max-pooling dimension K"),
      CLSM_SIZE(semantic_dim, "semantic dimension L"),
      CLSM_SIZE(window, "context window in words (3 unless allow_window_override)"),
      CLSM_BOOL(allow_window_override, "permit window sizes other than 3"),
      CLSM_STR(input_mode, "letter_trigram | embedding"),
      CLSM_SIZE(d_emb, "expected embedding dimension (0: from file)"),
      CLSM_SIZE(min_freq, "minimum corpus frequency for trigrams and words"),
      CLSM_SIZE(n_within, "within-article negatives per sample"),
      CLSM_SIZE(n_cross, "cross-article negatives per sample"),
      CLSM_REAL(negative_threshold, "negatives must score below this in negative_scores"),
      CLSM_REAL(prune_threshold, "scored positive pairs below this are dropped"),
      CLSM_STR(on_insufficient, "fail | skip when an article lacks negatives"),
      CLSM_REAL(val_fraction, "fraction of articles held out for validation"),
      CLSM_REAL(learning_rate, "SGD learning rate"),
      CLSM_SIZE(epochs, "training epochs"),
      CLSM_REAL(temperature, "softmax temperature"),
      CLSM_SIZE(batch_size, "samples per SGD update"),
      CLSM_BOOL(fine_tune, "update embedding rows during training"),
      CLSM_BOOL(resample_epochs, "redraw negatives every epoch (needs pairs)"),
      CLSM_BOOL(checkpoints, "write <model>.epochN after every epoch"),
      {"seed", {"master random seed", [](RunConfig& c, const std::string& v) {
                  c.seed = static_cast<std::uint64_t>(to_size("seed", v));
                }}},
      CLSM_STR(scorer, "clsm | baseline | table | rescore"),
      CLSM_REAL(threshold, "keep aligned pairs scoring at least this"),
      CLSM_STR(threshold_mode, "normalized | raw"),
      CLSM_REAL(alpha, "rescoring weight of the first source"),
      CLSM_STR(thresholds, "comma-separated ascending thresholds for pr-curve"),
      CLSM_STR(positive_labels, "comma-separated gold labels counted as positive"),
      CLSM_BOOL(per_article, "add a per-article breakdown to eval"),
      {"jobs", {"threads for per-article scoring", [](RunConfig& c, const std::string& v) {
                  c.jobs = static_cast<unsigned>(std::max<std::size_t>(1, to_size("jobs", v)));
                }}},
      CLSM_STR(sentence_a, "first sentence text for trace"),
      CLSM_STR(sentence_b, "second sentence text for trace"),
      CLSM_STR(trace_article, "article id for trace (with simple_index, standard_index)"),
      CLSM_INT(simple_index, "simple sentence index for trace"),
      CLSM_INT(standard_index, "standard sentence index for trace"),
      CLSM_SIZE(top_k, "neurons reported by trace"),
      CLSM_SIZE(gc_trials, "gradient check trials"),
      CLSM_REAL(gc_epsilon, "gradient check central-difference step"),
      CLSM_REAL(gc_tolerance, "gradient check relative error tolerance"),
      CLSM_STR(gc_mode, "gradient check input mode"),
      CLSM_BOOL(gc_fine_tune, "gradient check embedding rows too"),
  };
  return table;
}

#undef CLSM_STR
#undef CLSM_SIZE
#undef CLSM_REAL
#undef CLSM_BOOL
#undef CLSM_INT

std::string normalize_key(std::string key) {
  for (char& c : key)
    if (c == '-') c = '_';
  return key;
}

// ---- shared helpers ---------------------------------------------------------

const std::string& require_path(const std::string& path, const char* key) {
  if (path.empty()) config_error(std::string("missing required setting '") + key + "'");
  if (!fs::exists(path))
    throw Error(ErrorKind::IoError, std::string(key) + ": no such file: " + path);
  return path;
}

void check_architecture(const RunConfig& c) {
  if (c.window != kWindowSize && !c.allow_window_override)
    config_error("window is fixed at 3; set allow_window_override to change it");
  if (c.window % 2 == 0) config_error("window must be odd");
  if (c.conv_dim == 0 || c.semantic_dim == 0) config_error("conv_dim and semantic_dim must be positive");
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write file: " + path);
  f << text;
  if (!f) throw Error(ErrorKind::IoError, "failed writing file: " + path);
}

LabelSet parse_label_set(const std::string& text) {
  LabelSet labels;
  for (auto part : split_char(text, ',')) {
    auto t = trim(part);
    if (t.empty()) continue;
    try {
      labels.insert(parse_label(t));
    } catch (const Error& e) {
      config_error(std::string("positive_labels: ") + e.what());
    }
  }
  if (labels.empty()) config_error("positive_labels is empty");
  return labels;
}

std::vector<double> parse_thresholds(const RunConfig& c) {
  std::vector<double> out;
  if (c.thresholds.empty()) {
    for (int i = 0; i <= 20; ++i) out.push_back(i * 0.05);
    return out;
  }
  for (auto part : split_char(c.thresholds, ','))
    if (!trim(part).empty()) out.push_back(to_real("thresholds", std::string(trim(part))));
  if (!std::is_sorted(out.begin(), out.end())) config_error("thresholds must be ascending");
  return out;
}

std::vector<SimilarityMatrix> clsm_matrices(const Corpus& corpus, const ClsmModel& model,
                                            unsigned jobs) {
  // one forward pass per sentence; the scorer then only reads
  std::map<std::tuple<std::string, Side, int>, Eigen::VectorXd> semantic;
  for (const auto& a : corpus)
    for (Side side : {Side::Simple, Side::Standard})
      for (const auto& s : a.side(side))
        semantic[{s.article_id, s.side, s.sentence_id}] = forward(s, model).y;
  return score_corpus(
      corpus,
      [&](const Sentence& x, const Sentence& y) {
        return cosine_similarity(semantic.at({x.article_id, x.side, x.sentence_id}),
                                 semantic.at({y.article_id, y.side, y.sentence_id}));
      },
      "clsm", jobs);
}

std::vector<SimilarityMatrix> baseline_matrices(const Corpus& corpus, const RunConfig& c) {
  const WordSimTable table = load_wordsim(require_path(c.wordsim, "wordsim"));
  const ParseBank bank = c.parses.empty() ? ParseBank{} : load_parses(require_path(c.parses, "parses"));
  return score_corpus(
      corpus,
      [&](const Sentence& x, const Sentence& y) {
        return sentence_similarity(bank.parsed(x), bank.parsed(y), table, bank.categories);
      },
      "baseline", c.jobs);
}

std::vector<SimilarityMatrix> table_matrices(const Corpus& corpus, const std::string& path,
                                             const char* key) {
  return matrices_from_table(score_table_from_pairs(load_pairs(require_path(path, key))), corpus,
                             path);
}

std::vector<SimilarityMatrix> build_matrices(const Corpus& corpus, const RunConfig& c) {
  if (c.scorer == "clsm")
    return clsm_matrices(corpus, load_model(require_path(c.model, "model")), c.jobs);
  if (c.scorer == "baseline") return baseline_matrices(corpus, c);
  if (c.scorer == "table") return table_matrices(corpus, c.scores_a, "scores_a");
  if (c.scorer == "rescore") {
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) config_error("alpha must lie in [0, 1]");
    auto a = c.scores_a.empty()
                 ? clsm_matrices(corpus, load_model(require_path(c.model, "model")), c.jobs)
                 : table_matrices(corpus, c.scores_a, "scores_a");
    auto b = c.scores_b.empty() ? baseline_matrices(corpus, c)
                                : table_matrices(corpus, c.scores_b, "scores_b");
    std::vector<SimilarityMatrix> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(rescore(a[i], b[i], c.alpha));
    return out;
  }
  config_error("unknown scorer '" + c.scorer + "'");
}

std::vector<SimilarityMatrix> thresholding_view(std::vector<SimilarityMatrix> matrices,
                                                const RunConfig& c) {
  if (c.threshold_mode == "raw") return matrices;
  if (c.threshold_mode != "normalized") config_error("threshold_mode must be normalized or raw");
  for (auto& m : matrices) m = normalize_minmax(m);
  return matrices;
}

std::vector<PositivePair> prune_pairs(std::vector<PositivePair> pairs, double threshold) {
  std::erase_if(pairs, [&](const PositivePair& p) { return p.score && *p.score < threshold; });
  return pairs;
}

SampleOptions sample_options(const RunConfig& c) {
  SampleOptions o;
  o.n_within = c.n_within;
  o.n_cross = c.n_cross;
  o.seed = derive_seed(c.seed, "samples");
  o.negative_threshold = c.negative_threshold;
  if (c.on_insufficient == "skip")
    o.on_insufficient = NegativePolicy::Skip;
  else if (c.on_insufficient == "fail")
    o.on_insufficient = NegativePolicy::Fail;
  else
    config_error("on_insufficient must be fail or skip");
  return o;
}

std::string format_frequencies(const std::map<std::string, std::size_t>& freq) {
  std::string out;
  for (const auto& [w, n] : freq) out += w + '\t' + std::to_string(n) + '\n';
  return out;
}

}  // namespace

// ---- RunConfig ----------------------------------------------------------------

void RunConfig::set(const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  for (const auto& [name, spec] : key_table()) {
    if (name == key) {
      spec.set(*this, std::string(trim(value)));
      return;
    }
  }
  config_error("unknown setting '" + raw_key + "'");
}

void RunConfig::load_file(const std::string& path) {
  const std::string text = read_file(require_path(path, "config"));
  std::size_t line_no = 0;
  for (auto line : split_char(text, '\n')) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ConfigError, path + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, spec] : key_table()) n.push_back(name);
    return n;
  }();
  return names;
}

std::string RunConfig::describe(const std::string& key) {
  for (const auto& [name, spec] : key_table())
    if (name == key) return spec.description;
  return {};
}

// ---- commands -----------------------------------------------------------------

int cmd_build_dataset(const RunConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
  const auto pairs = prune_pairs(load_pairs(require_path(c.pairs, "pairs")), c.prune_threshold);
  if (c.out_dir.empty()) config_error("missing required setting 'out_dir'");
  if (!(c.val_fraction >= 0.0 && c.val_fraction < 1.0)) config_error("val_fraction must lie in [0, 1)");

  std::optional<ScoreTable> negative_scores;
  if (!c.negative_scores.empty())
    negative_scores = score_table_from_pairs(load_pairs(require_path(c.negative_scores, "negative_scores")));

  // article-level split so validation articles are unseen in training
  std::vector<std::string> ids;
  for (const auto& a : corpus) ids.push_back(a.article_id);
  Rng split_rng(derive_seed(c.seed, "split"));
  shuffle(ids, split_rng);
  std::size_t n_val = static_cast<std::size_t>(std::llround(c.val_fraction * static_cast<double>(ids.size())));
  if (c.val_fraction > 0.0 && n_val == 0 && ids.size() > 1) n_val = 1;
  const std::set<std::string> val_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));

  std::vector<PositivePair> train_pairs, val_pairs;
  for (const auto& p : pairs) (val_ids.count(p.article_id) ? val_pairs : train_pairs).push_back(p);

  SampleOptions opts = sample_options(c);
  if (negative_scores) opts.negative_scores = &*negative_scores;
  const auto train = build_samples(train_pairs, corpus, opts);
  const auto val = build_samples(val_pairs, corpus, opts);

  fs::create_directories(c.out_dir);
  const fs::path dir(c.out_dir);
  write_text((dir / "train.samples.tsv").string(), format_samples(train), out);
  write_text((dir / "val.samples.tsv").string(), format_samples(val), out);
  write_text((dir / "vocab.tsv").string(), format_vocab(build_trigram_vocab(corpus, c.min_freq)), out);
  write_text((dir / "word_freq.tsv").string(), format_frequencies(count_word_frequencies(corpus)), out);

  out << "articles=" << corpus.size() << " pairs=" << pairs.size() << " train_samples=" << train.size()
      << " val_samples=" << val.size() << '\n';
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  check_architecture(c);
  LossConfig loss;
  loss.learning_rate = c.learning_rate;
  loss.epochs = c.epochs;
  loss.temperature = c.temperature;
  loss.fine_tune_embeddings = c.fine_tune;
  loss.seed = derive_seed(c.seed, "train");
  loss.batch_size = c.batch_size;
  loss.validate();
  if (c.model.empty()) config_error("missing required setting 'model' (output path)");

  const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
  auto samples = parse_samples(read_file(require_path(c.train_samples, "train_samples")), corpus,
                               c.train_samples);
  std::vector<TrainingSample> validation;
  if (!c.val_samples.empty())
    validation = parse_samples(read_file(require_path(c.val_samples, "val_samples")), corpus, c.val_samples);

  const std::uint64_t init_seed = derive_seed(c.seed, "init");
  ClsmModel model;
  const InputMode mode = parse_input_mode(c.input_mode);
  if (mode == InputMode::LetterTrigram) {
    TrigramVocab vocab = c.vocab.empty() ? build_trigram_vocab(corpus, c.min_freq)
                                         : parse_vocab(read_file(require_path(c.vocab, "vocab")), c.vocab);
    model = make_trigram_model(std::move(vocab), c.conv_dim, c.semantic_dim, init_seed, c.window);
  } else {
    EmbeddingTable table = load_embeddings(require_path(c.embeddings, "embeddings"));
    if (c.d_emb != 0 && table.dimension() != c.d_emb)
      throw Error(ErrorKind::DimensionMismatch, "embedding file has dimension " +
                                                    std::to_string(table.dimension()) + ", d_emb is " +
                                                    std::to_string(c.d_emb));
    table.restrict_vocabulary(count_word_frequencies(corpus), c.min_freq);
    table.set_trainable(c.fine_tune);
    model = make_embedding_model(std::move(table), c.conv_dim, c.semantic_dim, init_seed, c.window);
  }

  TrainHooks hooks;
  std::vector<PositivePair> resample_pairs;
  SampleOptions resample_opts;
  if (c.resample_epochs) {
    std::set<std::string> train_articles;
    for (const auto& s : samples) train_articles.insert(s.target.article_id);
    for (auto& p : prune_pairs(load_pairs(require_path(c.pairs, "pairs")), c.prune_threshold))
      if (train_articles.count(p.article_id)) resample_pairs.push_back(p);
    resample_opts = sample_options(c);
    hooks.resample = [&](std::size_t epoch) {
      SampleOptions o = resample_opts;
      o.seed = derive_seed(c.seed, "resample", epoch);
      return build_samples(resample_pairs, corpus, o);
    };
  }

  const std::string log_path = c.log.empty() ? c.model + ".log" : c.log;
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw Error(ErrorKind::IoError, "cannot write training log: " + log_path);
  hooks.on_epoch = [&](const EpochMetrics& m, const ClsmModel& current) {
    const std::string line = format_epoch_line(m);
    log << line << '\n';
    log.flush();
    out << line << '\n';
    if (c.checkpoints) save_model(current, c.model + ".epoch" + std::to_string(m.epoch));
  };

  TrainResult result = train(std::move(samples), std::move(model), loss, validation, hooks);
  save_model(result.model, c.model);
  if (result.best_epoch > 0)
    out << "best_epoch=" << result.best_epoch << '\n';
  return 0;
}

int cmd_score(const RunConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
  const auto matrices = build_matrices(corpus, c);
  write_text(c.output, format_score_table(matrices), out);
  if (!c.matrix_dump.empty()) write_text(c.matrix_dump, format_matrix_dump(matrices), out);
  return 0;
}

int cmd_align(const RunConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
  const auto matrices = thresholding_view(build_matrices(corpus, c), c);
  std::vector<AlignmentResult> results;
  for (const auto& m : matrices) results.push_back(apply_threshold(greedy_align(m), c.threshold));
  write_text(c.output, format_alignments(results), out);
  if (!c.matrix_dump.empty()) write_text(c.matrix_dump, format_matrix_dump(matrices), out);
  return 0;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const auto predicted =
      parse_alignments(read_file(require_path(c.alignment, "alignment")), c.alignment);
  const auto gold = load_gold(require_path(c.gold, "gold"));
  const LabelSet labels = parse_label_set(c.positive_labels);
  std::string report = format_prf(evaluate_alignment(predicted, gold, labels)) + '\n';
  if (c.per_article)
    for (const auto& [article, prf] : evaluate_alignment_by_article(predicted, gold, labels))
      report += article + '\t' + format_prf(prf) + '\n';
  write_text(c.output, report, out);
  return 0;
}

int cmd_pr_curve(const RunConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
  const auto gold = load_gold(require_path(c.gold, "gold"));
  const auto matrices = thresholding_view(build_matrices(corpus, c), c);
  const auto thresholds = parse_thresholds(c);
  const auto curve = precision_recall_curve(matrices, gold, thresholds, parse_label_set(c.positive_labels));
  std::string report;
  char buf[48];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.6f\t", p.threshold);
    report += buf + format_prf(p.prf) + '\n';
  }
  const auto& best = best_f1(curve);
  std::snprintf(buf, sizeof buf, "best threshold=%.6f ", best.threshold);
  report += buf + format_prf(best.prf) + '\n';
  write_text(c.output, report, out);
  return 0;
}

int cmd_rescore(const RunConfig& c, std::ostream& out) {
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) config_error("alpha must lie in [0, 1]");
  const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
  const auto a = table_matrices(corpus, c.scores_a, "scores_a");
  const auto b = table_matrices(corpus, c.scores_b, "scores_b");
  std::vector<SimilarityMatrix> combined;
  for (std::size_t i = 0; i < a.size(); ++i) combined.push_back(rescore(a[i], b[i], c.alpha));
  write_text(c.output, format_score_table(combined), out);
  return 0;
}

int cmd_trace(const RunConfig& c, std::ostream& out) {
  const ClsmModel model = load_model(require_path(c.model, "model"));
  Sentence a, b;
  if (!c.sentence_a.empty() || !c.sentence_b.empty()) {
    a = tokenize(c.sentence_a);
    b = tokenize(c.sentence_b);
  } else {
    const Corpus corpus = load_corpus(require_path(c.corpus, "corpus"));
    const ArticlePair* article = nullptr;
    for (const auto& x : corpus)
      if (x.article_id == c.trace_article) article = &x;
    if (!article) config_error("trace_article '" + c.trace_article + "' not in corpus");
    auto pa = article->position(Side::Simple, c.simple_index);
    auto pb = article->position(Side::Standard, c.standard_index);
    if (!pa || !pb) config_error("simple_index / standard_index not found in article");
    a = article->simple_sentences[*pa];
    b = article->standard_sentences[*pb];
  }
  write_text(c.output, format_trace(trace_activations(a, b, model, c.top_k)), out);
  return 0;
}

int cmd_gradcheck(const RunConfig& c, std::ostream& out) {
  GradCheckOptions o;
  o.input_mode = parse_input_mode(c.gc_mode);
  o.trials = c.gc_trials;
  o.epsilon = c.gc_epsilon;
  o.tolerance = c.gc_tolerance;
  o.temperature = c.temperature;
  o.fine_tune_embeddings = c.gc_fine_tune;
  o.seed = derive_seed(c.seed, "gradcheck");
  const GradCheckReport report = gradient_check(o);
  out << format_gradcheck(report) << '\n';
  return report.passed ? 0 : 1;
}

// ---- command line -------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convolutional sentence matching and greedy alignment for text simplification"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, std::ostream&);
  };
  static const Sub subs[] = {
      {"build-dataset", "build training/validation samples and vocabularies", cmd_build_dataset},
      {"train", "train a model", cmd_train},
      {"score", "write a score table for every sentence pair", cmd_score},
      {"align", "greedy one-to-one alignment per article", cmd_align},
      {"eval", "precision / recall / F1 against gold labels", cmd_eval},
      {"pr-curve", "threshold sweep of precision / recall / F1", cmd_pr_curve},
      {"rescore", "combine two score tables", cmd_rescore},
      {"trace", "max-pooling activation trace for a sentence pair", cmd_trace},
      {"gradcheck", "finite-difference gradient check", cmd_gradcheck},
  };

  std::string config_path;
  std::map<std::string, std::string> flags;
  std::vector<CLI::App*> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "key = value configuration file");
    for (const auto& key : RunConfig::keys()) {
      std::string dashed = key;
      for (char& ch : dashed)
        if (ch == '_') ch = '-';
      std::string names = "--" + dashed;
      if (dashed != key) names += ",--" + key;
      sub->add_option(names, flags[key], RunConfig::describe(key));
    }
    apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config.load_file(config_path);
    if (const char* env = std::getenv("CLSM_SEED")) config.set("seed", env);
    for (std::size_t i = 0; i < apps.size(); ++i) {
      if (!apps[i]->parsed()) continue;
      for (const auto& key : RunConfig::keys()) {
        std::string dashed = key;
        for (char& ch : dashed)
          if (ch == '_') ch = '-';
        if (apps[i]->get_option("--" + dashed)->count() > 0) config.set(key, flags[key]);
      }
      return subs[i].run(config, out);
    }
    return 2;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& ch : msg)
      if (ch == '\n') ch = ' ';
    err << "error: " << to_string(e.kind()) << ": " << msg << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace clsm
