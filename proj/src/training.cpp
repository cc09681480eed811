#include "clsm/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "clsm/error.hpp"
#include "clsm/evaluation.hpp"
#include "clsm/rng.hpp"

namespace clsm {

void LossConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw Error(ErrorKind::ConfigError, "learning rate must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw Error(ErrorKind::ConfigError, "temperature must be positive");
  if (batch_size == 0) throw Error(ErrorKind::ConfigError, "batch size must be positive");
}

Gradients Gradients::zeros_like(const ClsmModel& model) {
  Gradients g;
  g.semantic = Eigen::MatrixXd::Zero(model.semantic.rows(), model.semantic.cols());
  return g;
}

Eigen::MatrixXd Gradients::dense_conv(const ClsmModel& model) const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(model.conv.rows(), model.conv.cols());
  for (const auto& [col, values] : conv_columns) d.col(col) = values;
  return d;
}

void Gradients::add(const Gradients& other, double s) {
  for (const auto& [col, values] : other.conv_columns) {
    auto [it, inserted] = conv_columns.try_emplace(col, s * values);
    if (!inserted) it->second += s * values;
  }
  if (semantic.size() == 0)
    semantic = s * other.semantic;
  else
    semantic += s * other.semantic;
  for (const auto& [row, values] : other.embedding_rows) {
    auto [it, inserted] = embedding_rows.try_emplace(row, s * values);
    if (!inserted) it->second += s * values;
  }
}

void Gradients::scale(double factor) {
  for (auto& [col, values] : conv_columns) values *= factor;
  semantic *= factor;
  for (auto& [row, values] : embedding_rows) values *= factor;
}

bool Gradients::all_finite() const {
  if (!semantic.allFinite()) return false;
  for (const auto& [c, v] : conv_columns)
    if (!v.allFinite()) return false;
  for (const auto& [r, v] : embedding_rows)
    if (!v.allFinite()) return false;
  return true;
}

std::vector<double> candidate_probabilities(std::span<const double> scores, double temperature) {
  if (scores.size() < 2) throw Error(ErrorKind::ConfigError, "softmax needs at least 2 candidates");
  const double top = *std::max_element(scores.begin(), scores.end()) / temperature;
  std::vector<double> p(scores.size());
  double z = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    p[j] = std::exp(scores[j] / temperature - top);
    z += p[j];
  }
  for (double& x : p) x /= z;
  return p;
}

double ranking_loss(std::span<const double> scores, double temperature) {
  if (scores.size() < 2) throw Error(ErrorKind::ConfigError, "softmax needs at least 2 candidates");
  const double top = *std::max_element(scores.begin(), scores.end()) / temperature;
  double z = 0.0;
  for (double s : scores) z += std::exp(s / temperature - top);
  // -log p_0 = log Z - s_0, both shifted by the max
  return std::log(z) - (scores[0] / temperature - top);
}

double pair_probability(const ForwardTrace& target, std::span<const ForwardTrace> candidates,
                        double temperature) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(cosine_similarity(target.y, c.y));
  return candidate_probabilities(scores, temperature)[0];
}

namespace {

std::vector<ForwardTrace> candidate_traces(const TrainingSample& sample, const ClsmModel& model) {
  std::vector<ForwardTrace> traces;
  traces.reserve(sample.candidate_count());
  traces.push_back(forward(sample.positive, model));
  for (const auto& n : sample.negatives) traces.push_back(forward(n, model));
  return traces;
}

// Backpropagates dL/dy of one sentence into the shared parameters.
void accumulate_sentence(const ForwardTrace& trace, const Eigen::VectorXd& dy,
                         const ClsmModel& model, bool fine_tune, Gradients& g) {
  const Eigen::VectorXd dpre_s = dy.array() * (1.0 - trace.y.array().square());
  g.semantic.noalias() += dpre_s * trace.v.transpose();
  const Eigen::VectorXd dv = model.semantic.transpose() * dpre_s;

  // max-pool subgradient: each pooled unit feeds back to its winner only
  std::vector<Eigen::VectorXd> dh(trace.h.size());
  for (std::size_t i = 0; i < trace.argmax_t.size(); ++i) {
    const std::size_t t = trace.argmax_t[i];
    if (dh[t].size() == 0) dh[t] = Eigen::VectorXd::Zero(dv.size());
    dh[t](static_cast<Eigen::Index>(i)) += dv(static_cast<Eigen::Index>(i));
  }

  for (std::size_t t = 0; t < trace.h.size(); ++t) {
    if (dh[t].size() == 0) continue;
    const Eigen::VectorXd dpre_c = dh[t].array() * (1.0 - trace.h[t].array().square());
    const ContextWindow& w = trace.windows[t];
    for (std::size_t s = 0; s < w.slots.size(); ++s) {
      if (!w.slots[s]) continue;
      const auto offset = static_cast<Eigen::Index>(s * w.feature_dim);
      if (const auto* counts = std::get_if<TrigramCounts>(&*w.slots[s])) {
        for (auto [idx, n] : counts->entries) {
          auto [it, inserted] = g.conv_columns.try_emplace(offset + idx, n * dpre_c);
          if (!inserted) it->second.noalias() += n * dpre_c;
        }
      } else {
        const auto& row = std::get<EmbeddingRow>(*w.slots[s]);
        const auto width = row.values.size();
        for (Eigen::Index c = 0; c < width; ++c) {
          auto [it, inserted] =
              g.conv_columns.try_emplace(offset + c, row.values(c) * dpre_c);
          if (!inserted) it->second.noalias() += row.values(c) * dpre_c;
        }
        if (fine_tune) {
          Eigen::VectorXd d_row = model.conv.middleCols(offset, width).transpose() * dpre_c;
          auto [it, inserted] = g.embedding_rows.try_emplace(row.row, d_row);
          if (!inserted) it->second += d_row;
        }
      }
    }
  }
}

// d cos(a, b) / d a
Eigen::VectorXd cosine_grad(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double cos_ab) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na < 1e-12 || nb < 1e-12)
    throw Error(ErrorKind::ZeroVector, "semantic vector norm below 1e-12");
  return b / (na * nb) - cos_ab * a / (na * na);
}

}  // namespace

double sample_loss(const TrainingSample& sample, const ClsmModel& model, double temperature) {
  const ForwardTrace target = forward(sample.target, model);
  std::vector<double> scores;
  scores.push_back(cosine_similarity(target.y, forward(sample.positive, model).y));
  for (const auto& n : sample.negatives)
    scores.push_back(cosine_similarity(target.y, forward(n, model).y));
  return ranking_loss(scores, temperature);
}

LossAndGradients loss_and_gradients(const TrainingSample& sample, const ClsmModel& model,
                                    double temperature, bool fine_tune_embeddings) {
  const bool fine_tune = fine_tune_embeddings && model.input_mode == InputMode::Embedding;
  const ForwardTrace target = forward(sample.target, model);
  const std::vector<ForwardTrace> cands = candidate_traces(sample, model);

  std::vector<double> scores;
  scores.reserve(cands.size());
  for (const auto& c : cands) {
    // unclamped cosine so the gradient matches the value being differentiated
    const double na = target.y.norm(), nb = c.y.norm();
    if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::ZeroVector, "zero semantic vector");
    scores.push_back(target.y.dot(c.y) / (na * nb));
  }
  const std::vector<double> p = candidate_probabilities(scores, temperature);

  LossAndGradients out;
  out.loss = ranking_loss(scores, temperature);
  out.gradients = Gradients::zeros_like(model);

  Eigen::VectorXd dy_target = Eigen::VectorXd::Zero(target.y.size());
  for (std::size_t j = 0; j < cands.size(); ++j) {
    const double g = (p[j] - (j == 0 ? 1.0 : 0.0)) / temperature;
    if (g == 0.0) continue;
    dy_target += g * cosine_grad(target.y, cands[j].y, scores[j]);
    const Eigen::VectorXd dy_c = g * cosine_grad(cands[j].y, target.y, scores[j]);
    accumulate_sentence(cands[j], dy_c, model, fine_tune, out.gradients);
  }
  accumulate_sentence(target, dy_target, model, fine_tune, out.gradients);
  return out;
}

Gradients backward(const TrainingSample& sample, const ClsmModel& model, double temperature,
                   bool fine_tune_embeddings) {
  return loss_and_gradients(sample, model, temperature, fine_tune_embeddings).gradients;
}

void sgd_step(ClsmModel& model, const Gradients& grads, double learning_rate) {
  if (grads.semantic.rows() != model.semantic.rows() ||
      grads.semantic.cols() != model.semantic.cols())
    throw Error(ErrorKind::DimensionMismatch, "semantic gradient shape differs from model");
  for (const auto& [col, values] : grads.conv_columns) {
    if (col < 0 || col >= model.conv.cols() || values.size() != model.conv.rows())
      throw Error(ErrorKind::DimensionMismatch, "convolution gradient column out of range");
  }
  if (learning_rate == 0.0) return;
  for (const auto& [col, values] : grads.conv_columns)
    model.conv.col(col).noalias() -= learning_rate * values;
  model.semantic.noalias() -= learning_rate * grads.semantic;
  if (model.embedding && model.embedding->trainable()) {
    auto& table = model.embedding->vectors();
    for (const auto& [row, values] : grads.embedding_rows) {
      if (row < 0 || row >= table.rows() || values.size() != table.cols())
        throw Error(ErrorKind::DimensionMismatch, "embedding gradient row out of range");
      table.row(row) -= learning_rate * values.transpose();
    }
  }
}

std::string format_epoch_line(const EpochMetrics& m) {
  char buf[128];
  if (m.val_accuracy)
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f", m.epoch, m.train_loss, *m.val_accuracy);
  else
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\tnan", m.epoch, m.train_loss);
  return buf;
}

TrainResult train(std::vector<TrainingSample> samples, ClsmModel model, const LossConfig& config,
                  std::span<const TrainingSample> validation, const TrainHooks& hooks) {
  config.validate();
  model.validate();
  if (samples.empty() && !hooks.resample)
    throw Error(ErrorKind::ConfigError, "training needs at least one sample");
  if (model.embedding) model.embedding->set_trainable(config.fine_tune_embeddings);

  TrainResult result;
  std::optional<double> best_accuracy;
  std::optional<ClsmModel> best_model;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (hooks.resample) samples = hooks.resample(epoch);
    if (samples.empty()) throw Error(ErrorKind::ConfigError, "training needs at least one sample");

    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, "train.shuffle", epoch));
    shuffle(order, rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      Gradients batch = Gradients::zeros_like(model);
      for (std::size_t k = start; k < end; ++k) {
        const TrainingSample& s = samples[order[k]];
        LossAndGradients lg =
            loss_and_gradients(s, model, config.temperature, config.fine_tune_embeddings);
        if (!std::isfinite(lg.loss) || !lg.gradients.all_finite())
          throw Error(ErrorKind::NonFiniteLoss,
                      "non-finite loss or gradient at epoch " + std::to_string(epoch) +
                          ", sample " + std::to_string(order[k]) + " (article '" +
                          s.target.article_id + "', sentence " +
                          std::to_string(s.target.sentence_id) + ")");
        loss_sum += lg.loss;
        batch.add(lg.gradients);
      }
      if (end - start > 1) batch.scale(1.0 / static_cast<double>(end - start));
      sgd_step(model, batch, config.learning_rate);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = loss_sum / static_cast<double>(samples.size());
    if (!validation.empty()) {
      metrics.val_accuracy = selection_accuracy(model, validation);
      if (!best_accuracy || *metrics.val_accuracy > *best_accuracy) {
        best_accuracy = metrics.val_accuracy;
        best_model = model;
        result.best_epoch = epoch;
      }
    }
    result.epochs.push_back(metrics);
    if (hooks.on_epoch) hooks.on_epoch(metrics, model);
  }

  result.model = best_model ? std::move(*best_model) : std::move(model);
  return result;
}

// ---- finite-difference checker ----------------------------------------------

double gradient_relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

namespace {

std::string random_word(Rng& rng, std::string_view alphabet, std::size_t max_len) {
  const std::size_t len = 1 + uniform_index(rng, max_len);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += alphabet[uniform_index(rng, alphabet.size())];
  return w;
}

Sentence random_sentence(Rng& rng, const std::vector<std::string>& pool, std::size_t max_tokens,
                         Side side, int id) {
  Sentence s;
  s.article_id = "gc";
  s.side = side;
  s.sentence_id = id;
  const std::size_t n = 1 + uniform_index(rng, max_tokens);
  for (std::size_t i = 0; i < n; ++i) {
    // roughly one token in eight is out of vocabulary
    if (uniform_index(rng, 8) == 0)
      s.tokens.push_back("zz" + random_word(rng, "xyz", 3));
    else
      s.tokens.push_back(pool[uniform_index(rng, pool.size())]);
  }
  return s;
}

struct TinyProblem {
  ClsmModel model;
  TrainingSample sample;
};

TinyProblem make_tiny_problem(const GradCheckOptions& o, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  std::vector<std::string> pool;
  for (int i = 0; i < 16; ++i) pool.push_back(random_word(rng, "abcdef", 5));

  TinyProblem p;
  if (o.input_mode == InputMode::LetterTrigram) {
    std::map<std::string, std::size_t> counts;
    for (const auto& w : pool)
      for (const auto& t : word_to_trigrams(w)) ++counts[t];
    TrigramVocab full = build_trigram_vocab(counts, 1);
    std::vector<std::string> kept = full.trigrams();
    if (kept.size() + 1 > o.trigram_dim) kept.resize(o.trigram_dim - 1);
    // pad with unused trigrams so the dimension is exactly trigram_dim
    for (int k = 0; kept.size() + 1 < o.trigram_dim; ++k) kept.push_back("q" + std::to_string(k));
    p.model = make_trigram_model(TrigramVocab(kept, 1), o.conv_dim, o.semantic_dim,
                                 derive_seed(trial_seed, "model"));
  } else {
    Eigen::MatrixXd vectors(static_cast<Eigen::Index>(pool.size()),
                            static_cast<Eigen::Index>(o.embedding_dim));
    for (Eigen::Index r = 0; r < vectors.rows(); ++r)
      for (Eigen::Index c = 0; c < vectors.cols(); ++c) vectors(r, c) = uniform(rng, -1.0, 1.0);
    std::vector<std::string> words = pool;
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    vectors.conservativeResize(static_cast<Eigen::Index>(words.size()), vectors.cols());
    EmbeddingTable table(words, vectors, o.fine_tune_embeddings);
    table.vectors().row(table.unk_row()) =
        Eigen::VectorXd::NullaryExpr(vectors.cols(), [&] { return uniform(rng, -1.0, 1.0); });
    p.model = make_embedding_model(std::move(table), o.conv_dim, o.semantic_dim,
                                   derive_seed(trial_seed, "model"));
  }
  // larger weights than the default init push units away from the linear regime
  p.model.conv *= 3.0;
  p.model.semantic *= 2.0;

  p.sample.direction = Direction::SimpleToStandard;
  p.sample.target = random_sentence(rng, pool, o.max_tokens, Side::Simple, 0);
  p.sample.positive = random_sentence(rng, pool, o.max_tokens, Side::Standard, 0);
  for (std::size_t k = 0; k < o.negatives; ++k)
    p.sample.negatives.push_back(
        random_sentence(rng, pool, o.max_tokens, Side::Standard, static_cast<int>(k) + 1));
  return p;
}

}  // namespace

GradCheckReport gradient_check(const GradCheckOptions& o) {
  GradCheckReport report;
  const double eps = o.epsilon;

  for (std::size_t trial = 0; trial < o.trials; ++trial) {
    TinyProblem p = make_tiny_problem(o, derive_seed(o.seed, "gradcheck", trial));
    ClsmModel& model = p.model;
    Gradients g = backward(p.sample, model, o.temperature, o.fine_tune_embeddings);
    if (o.tamper) o.tamper(g);
    const Eigen::MatrixXd d_conv = g.dense_conv(model);

    auto winners = [&] {
      std::vector<std::size_t> all;
      for (const Sentence* s : {&p.sample.target, &p.sample.positive}) {
        const auto& a = forward(*s, model).argmax_t;
        all.insert(all.end(), a.begin(), a.end());
      }
      for (const auto& s : p.sample.negatives) {
        const auto& a = forward(s, model).argmax_t;
        all.insert(all.end(), a.begin(), a.end());
      }
      return all;
    };
    bool kink = false;
    auto numeric = [&](double& param) {
      const double saved = param;
      param = saved + eps;
      const double up = sample_loss(p.sample, model, o.temperature);
      const auto up_winners = winners();
      param = saved - eps;
      const double down = sample_loss(p.sample, model, o.temperature);
      kink = winners() != up_winners;
      param = saved;
      return (up - down) / (2.0 * eps);
    };
    auto record = [&](double analytic, double num, const std::string& where) {
      if (kink) {
        ++report.kinks_skipped;
        return;
      }
      const double err = gradient_relative_error(analytic, num);
      ++report.parameters_checked;
      if (err > report.max_relative_error || !std::isfinite(err)) {
        report.max_relative_error = std::isfinite(err) ? err : INFINITY;
        char buf[160];
        std::snprintf(buf, sizeof buf, "trial %zu %s analytic=%.10g numeric=%.10g", trial,
                      where.c_str(), analytic, num);
        report.worst = buf;
      }
    };

    for (Eigen::Index i = 0; i < model.semantic.rows(); ++i)
      for (Eigen::Index j = 0; j < model.semantic.cols(); ++j)
        record(g.semantic(i, j), numeric(model.semantic(i, j)),
               "W_s(" + std::to_string(i) + "," + std::to_string(j) + ")");
    for (Eigen::Index i = 0; i < model.conv.rows(); ++i)
      for (Eigen::Index j = 0; j < model.conv.cols(); ++j)
        record(d_conv(i, j), numeric(model.conv(i, j)),
               "W_c(" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (o.fine_tune_embeddings && model.embedding) {
      auto& table = model.embedding->vectors();
      for (Eigen::Index r = 0; r < table.rows(); ++r) {
        auto it = g.embedding_rows.find(static_cast<int>(r));
        for (Eigen::Index c = 0; c < table.cols(); ++c) {
          const double analytic = it == g.embedding_rows.end() ? 0.0 : it->second(c);
          record(analytic, numeric(table(r, c)),
                 "E(" + std::to_string(r) + "," + std::to_string(c) + ")");
        }
      }
    }
    ++report.trials;
  }
  const bool few_kinks = report.kinks_skipped * 100 <= report.parameters_checked + report.kinks_skipped;
  report.passed = report.trials > 0 && report.max_relative_error < o.tolerance && few_kinks;
  return report;
}

std::string format_gradcheck(const GradCheckReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s max_rel_error=%.3e trials=%zu params=%zu kinks=%zu",
                r.passed ? "PASS" : "FAIL", r.max_relative_error, r.trials, r.parameters_checked,
                r.kinks_skipped);
  std::string out = buf;
  if (!r.worst.empty()) out += " worst=[" + r.worst + "]";
  return out;
}

}  // namespace clsm
