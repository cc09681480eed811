#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clsm/alignment.hpp"
#include "clsm/baseline.hpp"
#include "clsm/commands.hpp"
#include "clsm/error.hpp"
#include "clsm/evaluation.hpp"
#include "clsm/features.hpp"
#include "clsm/network.hpp"
#include "clsm/training.hpp"

namespace py = pybind11;
using namespace clsm;

namespace {

SimilarityMatrix as_matrix(const Eigen::MatrixXd& scores, const std::string& article_id) {
  SimilarityMatrix m;
  m.article_id = article_id;
  m.scores = scores;
  return m;
}

py::list pairs_of(const AlignmentResult& r) {
  py::list out;
  for (const auto& p : r.pairs) out.append(py::make_tuple(p.simple_index, p.standard_index, p.score));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Convolutional sentence matching and greedy alignment";

  // owned for the lifetime of the interpreter
  static PyObject* error_type =
      py::exception<clsm::Error>(m, "ClsmError", PyExc_RuntimeError).release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const clsm::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(
          std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::enum_<Side>(m, "Side").value("Simple", Side::Simple).value("Standard", Side::Standard);

  py::class_<Sentence>(m, "Sentence")
      .def(py::init([](const std::string& text) { return tokenize(text); }), py::arg("text"))
      .def_readwrite("tokens", &Sentence::tokens)
      .def_readwrite("article_id", &Sentence::article_id)
      .def_readwrite("side", &Sentence::side)
      .def_readwrite("sentence_id", &Sentence::sentence_id)
      .def("__len__", &Sentence::size)
      .def("__repr__", [](const Sentence& s) {
        std::string text;
        for (const auto& t : s.tokens) text += (text.empty() ? "" : " ") + t;
        return "Sentence('" + text + "')";
      });

  py::class_<ArticlePair>(m, "ArticlePair")
      .def_readonly("article_id", &ArticlePair::article_id)
      .def_readonly("simple_sentences", &ArticlePair::simple_sentences)
      .def_readonly("standard_sentences", &ArticlePair::standard_sentences);

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("parse_corpus", [](const std::string& text) { return parse_corpus(text); }, py::arg("text"));
  m.def("load_corpus", [](const std::string& path) { return load_corpus(path); }, py::arg("path"));
  m.def("word_to_trigrams", &word_to_trigrams, py::arg("word"));

  py::class_<TrigramVocab>(m, "TrigramVocab")
      .def_property_readonly("dimension", &TrigramVocab::dimension)
      .def_property_readonly("trigrams", &TrigramVocab::trigrams)
      .def("lookup", &TrigramVocab::lookup);
  m.def(
      "build_trigram_vocab",
      [](const Corpus& corpus, std::size_t min_freq) { return build_trigram_vocab(corpus, min_freq); },
      py::arg("corpus"), py::arg("min_freq") = kDefaultMinFreq);

  py::class_<ClsmModel>(m, "Model")
      .def_readwrite("conv", &ClsmModel::conv)
      .def_readwrite("semantic", &ClsmModel::semantic)
      .def_property_readonly("conv_dim", &ClsmModel::conv_dim)
      .def_property_readonly("semantic_dim", &ClsmModel::semantic_dim)
      .def_property_readonly("window_size", &ClsmModel::window_size)
      .def("semantic_vector", [](const ClsmModel& model, const Sentence& s) { return forward(s, model).y; })
      .def("similarity", [](const ClsmModel& model, const Sentence& a, const Sentence& b) {
        return similarity(a, b, model);
      })
      .def("save", [](const ClsmModel& model, const std::string& path) { save_model(model, path); });
  m.def("make_trigram_model", &make_trigram_model, py::arg("vocab"), py::arg("conv_dim") = kDefaultConvDim,
        py::arg("semantic_dim") = kDefaultSemanticDim, py::arg("seed") = 0, py::arg("window") = kWindowSize);
  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "greedy_align",
      [](const Eigen::MatrixXd& scores, double threshold) {
        return pairs_of(apply_threshold(greedy_align(as_matrix(scores, "")), threshold));
      },
      py::arg("scores"), py::arg("threshold") = -std::numeric_limits<double>::infinity(),
      "Greedy one-to-one alignment: list of (row, column, score) in emission order.");
  m.def(
      "normalize_minmax", [](const Eigen::MatrixXd& s) { return normalize_minmax(as_matrix(s, "")).scores; },
      py::arg("scores"));
  m.def(
      "rescore",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double alpha) {
        return rescore(as_matrix(a, ""), as_matrix(b, ""), alpha).scores;
      },
      py::arg("a"), py::arg("b"), py::arg("alpha") = 0.5);

  m.def(
      "structural_word_similarity",
      [](const std::string& w1, const std::string& h1, const std::string& r1, const std::string& w2,
         const std::string& h2, const std::string& r2, const std::map<std::pair<std::string, std::string>, double>& sims) {
        WordSimTable table;
        for (const auto& [k, v] : sims) table.set(k.first, k.second, v);
        return structural_word_similarity({w1, h1, "", r1}, {w2, h2, "", r2}, table);
      },
      py::arg("word1"), py::arg("head1"), py::arg("category1"), py::arg("word2"), py::arg("head2"),
      py::arg("category2"), py::arg("word_similarity") = std::map<std::pair<std::string, std::string>, double>{});

  py::class_<PRF>(m, "PRF")
      .def_readonly("precision", &PRF::precision)
      .def_readonly("recall", &PRF::recall)
      .def_readonly("f1", &PRF::f1)
      .def_readonly("tp", &PRF::tp)
      .def_readonly("fp", &PRF::fp)
      .def_readonly("fn", &PRF::fn)
      .def("__repr__", &format_prf);
  m.def(
      "evaluate_alignment",
      [](const std::string& alignment_tsv, const std::string& gold_tsv) {
        return evaluate_alignment(parse_alignments(alignment_tsv), parse_gold(gold_tsv));
      },
      py::arg("alignment_tsv"), py::arg("gold_tsv"));

  m.def(
      "trace",
      [](const ClsmModel& model, const Sentence& a, const Sentence& b, std::size_t top_k) {
        py::list out;
        for (const auto& t : trace_activations(a, b, model, top_k)) {
          py::dict d;
          d["neuron"] = t.neuron_index;
          d["value_a"] = t.value_a;
          d["value_b"] = t.value_b;
          d["words_a"] = t.words_a;
          d["words_b"] = t.words_b;
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("a"), py::arg("b"), py::arg("top_k") = 5);

  m.def(
      "gradient_check",
      [](std::size_t trials, std::uint64_t seed) {
        GradCheckOptions o;
        o.trials = trials;
        o.seed = seed;
        const auto r = gradient_check(o);
        return py::make_tuple(r.passed, r.max_relative_error);
      },
      py::arg("trials") = 100, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full = {"clsm"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a subcommand in-process; returns (exit_code, stdout, stderr).");
}
