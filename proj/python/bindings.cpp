#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fmt/format.h>

#include "uq/categorical.hpp"
#include "uq/effectiveness.hpp"
#include "uq/graph.hpp"
#include "uq/methods.hpp"
#include "uq/pipeline.hpp"
#include "uq/similarity.hpp"
#include "uq/stability.hpp"

namespace py = pybind11;

namespace {

uq::LabelHistogram histogram(const std::vector<uq::Label>& labels) {
  return uq::LabelHistogram::from_labels(labels);
}

uq::SimilarityKind kind_of(const std::string& s) {
  auto k = uq::similarity_kind_from_string(s);
  if (!k) throw py::value_error("unknown similarity kind: " + s);
  return *k;
}

// An nli matrix is given by its directed scores; others are symmetric.
uq::RelationGraph graph_of(const Eigen::MatrixXd& m, const std::string& kind) {
  const auto k = kind_of(kind);
  if (k == uq::SimilarityKind::kNli) return uq::RelationGraph(uq::SimilarityMatrix::from_directed(m));
  return uq::RelationGraph(uq::SimilarityMatrix(k, m));
}

std::vector<uq::ScoredItem> scored(const std::vector<double>& u, const std::vector<int>& err,
                                   const std::optional<std::vector<std::string>>& ids) {
  if (u.size() != err.size()) throw py::value_error("length mismatch");
  if (ids && ids->size() != u.size()) throw py::value_error("item_ids length mismatch");
  std::vector<uq::ScoredItem> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.push_back({ids ? (*ids)[i] : fmt::format("{:012}", i), u[i], err[i] == 0, err[i]});
  }
  return out;
}

std::vector<int> errors_from_correct(const std::vector<bool>& correct) {
  std::vector<int> err;
  for (bool c : correct) err.push_back(c ? 0 : 1);
  return err;
}

uq::TieBreak tie_of(const std::string& mode, std::uint64_t seed) {
  if (mode == "item_id") return {uq::TieBreak::Mode::kItemId, seed};
  if (mode == "random") return {uq::TieBreak::Mode::kRandom, seed};
  throw py::value_error("tie_break must be 'item_id' or 'random'");
}

uq::RunConfig config_of(const py::kwargs& kw) {
  uq::RunConfig cfg;
  std::string tie = "item_id";
  for (const auto& [key_obj, value] : kw) {
    const auto key = key_obj.cast<std::string>();
    if (value.is_none()) continue;
    if (key == "input") {
      cfg.input = value.cast<std::filesystem::path>();
    } else if (key == "scores") {
      cfg.scores = value.cast<std::filesystem::path>();
    } else if (key == "eval") {
      cfg.eval = value.cast<std::filesystem::path>();
    } else if (key == "stability") {
      cfg.stability = value.cast<std::filesystem::path>();
    } else if (key == "out_dir") {
      cfg.out_dir = value.cast<std::filesystem::path>();
    } else if (key == "methods") {
      for (const auto& m : value.cast<std::vector<std::string>>()) {
        auto id = uq::method_from_string(m);
        if (!id) throw py::value_error("unknown method: " + m);
        cfg.methods.push_back(*id);
      }
    } else if (key == "similarity") {
      for (const auto& s : value.cast<std::vector<std::string>>()) cfg.similarity.push_back(kind_of(s));
    } else if (key == "provider_url") {
      if (!cfg.provider) cfg.provider.emplace();
      cfg.provider->base_url = value.cast<std::string>();
    } else if (key == "provider_model") {
      if (!cfg.provider) cfg.provider.emplace();
      cfg.provider->model_id = value.cast<std::string>();
    } else if (key == "precomputed_dir") {
      cfg.precomputed_dir = value.cast<std::filesystem::path>();
    } else if (key == "cache_dir") {
      cfg.cache_dir = value.cast<std::filesystem::path>();
    } else if (key == "dse_threshold") {
      cfg.dse_threshold = value.cast<double>();
    } else if (key == "epsilon") {
      cfg.epsilon = value.cast<double>();
    } else if (key == "delta_mode") {
      const auto s = value.cast<std::string>();
      if (s != "relative" && s != "absolute") throw py::value_error("delta_mode: " + s);
      cfg.delta_mode = s == "absolute" ? uq::DeltaMode::kAbsolute : uq::DeltaMode::kRelative;
    } else if (key == "prediction") {
      const auto s = value.cast<std::string>();
      if (s != "majority" && s != "first") throw py::value_error("prediction: " + s);
      cfg.prediction = s == "first" ? uq::PredictionRule::kFirstSample : uq::PredictionRule::kMajority;
    } else if (key == "tie_break") {
      tie = value.cast<std::string>();
    } else if (key == "seed") {
      cfg.seed = value.cast<std::uint64_t>();
    } else {
      throw py::type_error("unexpected keyword argument '" + key + "'");
    }
  }
  if (cfg.provider && cfg.provider->base_url.empty()) cfg.provider.reset();
  cfg.tie = tie_of(tie, cfg.seed);
  return cfg;
}

template <uq::CommandResult (*Run)(const uq::RunConfig&)>
py::dict command(const py::kwargs& kw) {
  const auto cfg = config_of(kw);
  uq::CommandResult res;
  {
    py::gil_scoped_release release;
    res = Run(cfg);
  }
  py::dict d;
  d["exit_code"] = res.exit_code;
  d["messages"] = res.messages;
  d["outputs"] = res.outputs;
  return d;
}

uq::CommandResult compute_default(const uq::RunConfig& cfg) { return uq::run_compute(cfg); }

}  // namespace

PYBIND11_MODULE(_uqgrade, m) {
  m.doc() = "Uncertainty measures for repeated LLM gradings.";

  py::register_exception<uq::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<uq::ProviderError>(m, "ProviderError", PyExc_RuntimeError);

  py::list names;
  for (const auto& mi : uq::all_methods()) names.append(std::string(mi.name));
  m.attr("METHODS") = names;

  // Labels are ints; None is the INVALID category.
  m.def("numset", [](const std::vector<uq::Label>& l) { return uq::numset(histogram(l)); });
  m.def("mar", [](const std::vector<uq::Label>& l) { return uq::mar(histogram(l)); });
  m.def("categorical_entropy",
        [](const std::vector<uq::Label>& l) { return uq::categorical_entropy(histogram(l)); });
  m.def("fsd", [](const std::vector<uq::Label>& l) { return uq::fsd(histogram(l)); });

  m.def("jaccard_similarity", &uq::jaccard_similarity, py::arg("a"), py::arg("b"));

  m.def("nad", [](const Eigen::MatrixXd& s, const std::string& kind) { return uq::nad(graph_of(s, kind)); },
        py::arg("matrix"), py::arg("kind") = "jaccard");
  m.def("eccentricity",
        [](const Eigen::MatrixXd& s, const std::string& kind) { return uq::eccentricity(graph_of(s, kind)); },
        py::arg("matrix"), py::arg("kind") = "jaccard");
  m.def(
      "eigen_uncertainty",
      [](const Eigen::MatrixXd& s, const std::string& kind) {
        auto r = uq::algebraic_connectivity_uncertainty(graph_of(s, kind));
        return py::make_tuple(r.value, r.lambda2, r.capped);
      },
      py::arg("matrix"), py::arg("kind") = "jaccard",
      "(1/lambda2, lambda2, capped) of the similarity graph's Laplacian.");
  m.def(
      "semantic_entropy",
      [](const Eigen::MatrixXd& directed, double threshold) {
        uq::RelationGraph g(uq::SimilarityMatrix::from_directed(directed));
        return uq::discrete_semantic_entropy(uq::semantic_clusters(g, threshold), g.n());
      },
      py::arg("directed"), py::arg("threshold") = uq::kDefaultDseThreshold);

  m.def(
      "evaluate_method",
      [](const std::string& method, const std::vector<uq::Label>& scores,
         const std::map<std::string, Eigen::MatrixXd>& matrices, std::size_t k, double threshold) {
        auto id = uq::method_from_string(method);
        if (!id) throw py::value_error("unknown method: " + method);
        uq::ItemEvidence ev;
        ev.scores = scores;
        for (const auto& [kind, mat] : matrices) ev.set_matrix(graph_of(mat, kind).matrix());
        auto v = uq::evaluate_method(*id, ev, k, threshold);
        return py::make_tuple(v.value, v.capped);
      },
      py::arg("method"), py::arg("scores"), py::arg("matrices") = std::map<std::string, Eigen::MatrixXd>{},
      py::arg("k") = 0, py::arg("dse_threshold") = uq::kDefaultDseThreshold,
      "(value, capped) for one response set. `matrices` maps kind to matrix; nli takes directed scores.");

  m.def(
      "auroc",
      [](const std::vector<double>& u, const std::vector<bool>& correct) {
        return uq::auroc(scored(u, errors_from_correct(correct), std::nullopt));
      },
      py::arg("uncertainty"), py::arg("correct"));
  m.def(
      "c_index",
      [](const std::vector<double>& u, const std::vector<int>& abs_error) {
        return uq::c_index(scored(u, abs_error, std::nullopt));
      },
      py::arg("uncertainty"), py::arg("abs_error"));
  m.def(
      "auarc",
      [](const std::vector<double>& u, const std::vector<bool>& correct,
         const std::optional<std::vector<std::string>>& ids, const std::string& tie, std::uint64_t seed) {
        return uq::auarc(scored(u, errors_from_correct(correct), ids), tie_of(tie, seed));
      },
      py::arg("uncertainty"), py::arg("correct"), py::arg("item_ids") = py::none(),
      py::arg("tie_break") = "item_id", py::arg("seed") = 0);
  m.def(
      "auerc",
      [](const std::vector<double>& u, const std::vector<int>& abs_error,
         const std::optional<std::vector<std::string>>& ids, const std::string& tie, std::uint64_t seed) {
        return uq::auerc(scored(u, abs_error, ids), tie_of(tie, seed));
      },
      py::arg("uncertainty"), py::arg("abs_error"), py::arg("item_ids") = py::none(),
      py::arg("tie_break") = "item_id", py::arg("seed") = 0);

  m.def(
      "change_ratio",
      [](const std::vector<double>& values, const std::string& mode, double eps) {
        if (mode != "relative" && mode != "absolute") throw py::value_error("mode: " + mode);
        uq::PrefixSeries s{"", "", values};
        return uq::change_ratio(s, mode == "absolute" ? uq::DeltaMode::kAbsolute : uq::DeltaMode::kRelative,
                                eps);
      },
      py::arg("values"), py::arg("mode") = "relative", py::arg("eps") = uq::kChangeRatioEpsilon,
      "values[0] is u_2.");
  m.def(
      "stepwise_spearman",
      [](const std::vector<std::vector<double>>& series) {
        std::vector<uq::PrefixSeries> all;
        for (std::size_t i = 0; i < series.size(); ++i) all.push_back({std::to_string(i), "", series[i]});
        return uq::stepwise_spearman(all);
      },
      py::arg("series"), "One prefix series per item.");
  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw py::value_error("length mismatch");
    return uq::pearson(x, y);
  });
  m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw py::value_error("length mismatch");
    return uq::spearman(x, y);
  });

  m.def(
      "parse_responses",
      [](const std::filesystem::path& path) {
        auto corpus = uq::parse_response_file(path);
        auto loads = py::module_::import("json").attr("loads");
        py::list sets;
        for (const auto& rs : corpus.sets) sets.append(loads(uq::to_json(rs).dump()));
        py::list rejects;
        for (const auto& r : corpus.rejects) {
          rejects.append(py::dict(py::arg("line") = r.line, py::arg("item_id") = r.item_id,
                                  py::arg("reason") = r.reason));
        }
        return py::make_tuple(sets, rejects);
      },
      py::arg("path"), "(records, rejects) from a responses JSONL file.");

  // Commands take the CLI's flags as keywords, e.g. compute(input=..., out_dir=...,
  // methods=["ce", "mar"]). Each returns {"exit_code", "messages", "outputs"}.
  m.def("compute", &command<&compute_default>);
  m.def("eval_scores", &command<&uq::run_eval>);
  m.def("stability", &command<&uq::run_stability>);
  m.def("correlate", &command<&uq::run_correlate>);
  m.def("report", &command<&uq::run_report>);
}
