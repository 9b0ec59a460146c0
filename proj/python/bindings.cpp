#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "palimpsest/cli.hpp"
#include "palimpsest/corpus.hpp"
#include "palimpsest/error.hpp"
#include "palimpsest/eval_harness.hpp"
#include "palimpsest/gapped_index.hpp"
#include "palimpsest/report.hpp"
#include "palimpsest/reuse_detect.hpp"
#include "palimpsest/stemmer.hpp"
#include "palimpsest/text_pipeline.hpp"

namespace py = pybind11;
using namespace palimpsest;

namespace {

PipelineConfig pipeline(const std::string& lang, double weak_df, std::size_t weak_rank) {
  PipelineConfig cfg;
  cfg.language = parse_language(lang);
  cfg.strength.weak_df = weak_df;
  cfg.strength.weak_rank = weak_rank;
  return cfg;
}

py::list analyze_tokens(const std::string& text, const std::string& lang) {
  AnalyzedDocument d = analyze_text("doc", normalize_text(text), pipeline(lang, 0.5, 200));
  py::list out;
  for (const Token& t : d.tokens) {
    py::dict tok;
    tok["surface"] = t.surface;
    tok["start"] = t.span.start;
    tok["end"] = t.span.end;
    tok["is_stop"] = t.is_stop;
    tok["stem"] = t.stem;
    out.append(tok);
  }
  return out;
}

std::string detect_texts(const std::string& a, const std::string& b, std::size_t n_w, std::size_t n_h,
                         std::size_t s_min, const std::string& lang, double weak_df, std::size_t weak_rank) {
  PipelineConfig cfg = pipeline(lang, weak_df, weak_rank);
  Corpus corpus("texts");
  const std::string ida = corpus.add(make_document(a, {"a", "", "", "utf-8"})).first;
  const std::string idb = corpus.add(make_document(b, {"b", "", "", "utf-8"})).first;
  AnalyzedCorpus analyzed = analyze(corpus, cfg, 1);
  DetectionParams p{n_w, n_h, s_min};
  p.validate();
  Index index = Index::build(analyzed, p);
  return render_report(detect_pair(index, analyzed, ida, idb, p));
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = run_cli(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_palimpsest, m) {
  m.doc() = "Text reuse detection over gapped word windows";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def("normalize_text", &normalize_text, py::arg("raw"), py::arg("encoding") = "utf-8");
  m.def("analyze", &analyze_tokens, py::arg("text"), py::arg("lang") = "fr",
        "Tokens of a text with spans, stop flags and stems");
  m.def(
      "stem", [](const std::string& word, const std::string& lang) { return stem(fold(word), parse_language(lang)); },
      py::arg("word"), py::arg("lang") = "fr");
  m.def(
      "enumerate_windows",
      [](const std::vector<std::string>& stems, std::size_t n_w, std::size_t n_h) {
        DetectionParams{n_w, n_h}.validate();
        std::vector<std::vector<std::uint32_t>> out;
        for (const GappedWindow& w : enumerate_windows(stems, n_w, n_h)) out.push_back(w.members);
        return out;
      },
      py::arg("stems"), py::arg("n_w"), py::arg("n_h"));
  m.def("window_count", &window_count, py::arg("content_len"), py::arg("n_w"), py::arg("n_h"));
  m.def("f_beta", &f_beta, py::arg("precision"), py::arg("recall"), py::arg("beta") = 0.5);
  m.def("detect_json", &detect_texts, py::arg("text_a"), py::arg("text_b"), py::arg("n_w") = 3, py::arg("n_h") = 2,
        py::arg("s_min") = 4, py::arg("lang") = "fr", py::arg("weak_df") = 0.5, py::arg("weak_rank") = 200,
        "Pair report JSON for two in-memory texts");
  m.def("run_cli", &cli, py::arg("args"), "Runs the command line; returns (exit code, stdout, stderr)");
}
