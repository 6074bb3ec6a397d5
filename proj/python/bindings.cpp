#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amatch/assignment.hpp"
#include "amatch/checkpoint.hpp"
#include "amatch/error.hpp"
#include "amatch/feature_io.hpp"
#include "amatch/flops.hpp"
#include "amatch/metrics.hpp"
#include "amatch/pipeline.hpp"
#include "amatch/synth.hpp"
#include "amatch/trainer.hpp"

namespace py = pybind11;
using namespace amatch;

namespace {

using PairList = std::vector<std::tuple<Index, Index, double>>;

PairList to_tuples(const Correspondences& c) {
  PairList out;
  out.reserve(c.size());
  for (const auto& m : c) out.emplace_back(m.source, m.target, m.confidence);
  return out;
}

Correspondences from_pairs(const std::vector<std::pair<Index, Index>>& pairs) {
  Correspondences out;
  for (const auto& [i, j] : pairs) out.push_back({i, j, 1.0});
  return out;
}

Matrix positions(const KeypointSet& k) {
  Matrix out(k.count(), 2);
  for (Index i = 0; i < k.count(); ++i) {
    out(i, 0) = k.positions[static_cast<std::size_t>(i)].x;
    out(i, 1) = k.positions[static_cast<std::size_t>(i)].y;
  }
  return out;
}

ImageFeatures make_features(const Matrix& xy, const Matrix& descriptors) {
  require(xy.cols() == 2, ErrorKind::kShapeMismatch, "positions must be an n x 2 array");
  ImageFeatures f;
  for (Index i = 0; i < xy.rows(); ++i) {
    f.keypoints.positions.push_back({xy(i, 0), xy(i, 1)});
    f.keypoints.scores.push_back(1.0);
  }
  f.descriptors.values = descriptors;
  return f;
}

TrainConfig config_from_json(const std::string& text) { return parse_train_config(text, toy_train_config()); }

}  // namespace

PYBIND11_MODULE(_amatch, m) {
  m.doc() = "Anchor matching transformer core";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("flops_amatformer", &flops_amatformer, py::arg("n"), py::arg("k"), py::arg("c"));
  m.def("flops_sgmnet", &flops_sgmnet, py::arg("n"), py::arg("k"), py::arg("c"));
  m.def("flops_superglue", &flops_superglue, py::arg("n"), py::arg("c"));

  m.def("augment_dustbin", &augment_dustbin, py::arg("scores"), py::arg("z"));
  m.def("sinkhorn", &sinkhorn, py::arg("scores_aug"), py::arg("iters"),
        "Transport plan of a dustbin-augmented score matrix.");
  m.def(
      "extract_matches", [](const Matrix& plan, double threshold) { return to_tuples(extract_matches(plan, threshold)); },
      py::arg("plan"), py::arg("threshold") = 0.2, "Mutual-argmax matches as (source, target, confidence).");

  py::class_<SyntheticProblem>(m, "Problem")
      .def(py::init([](const Matrix& source_xy, const Matrix& source_desc, const Matrix& target_xy,
                       const Matrix& target_desc, const std::vector<std::pair<Index, Index>>& matches) {
             SyntheticProblem s;
             s.problem.source = make_features(source_xy, source_desc);
             s.problem.target = make_features(target_xy, target_desc);
             validate(s.problem);
             s.gt.matches = matches;
             return s;
           }),
           py::arg("source_xy"), py::arg("source_descriptors"), py::arg("target_xy"), py::arg("target_descriptors"),
           py::arg("matches") = std::vector<std::pair<Index, Index>>{})
      .def_property_readonly("n", [](const SyntheticProblem& s) { return s.problem.n(); })
      .def_property_readonly("m", [](const SyntheticProblem& s) { return s.problem.m(); })
      .def_property_readonly("source_xy", [](const SyntheticProblem& s) { return positions(s.problem.source.keypoints); })
      .def_property_readonly("target_xy", [](const SyntheticProblem& s) { return positions(s.problem.target.keypoints); })
      .def_property_readonly("source_descriptors",
                             [](const SyntheticProblem& s) { return s.problem.source.descriptors.values; })
      .def_property_readonly("target_descriptors",
                             [](const SyntheticProblem& s) { return s.problem.target.descriptors.values; })
      .def_property_readonly("matches", [](const SyntheticProblem& s) { return s.gt.matches; })
      .def_property_readonly("unmatched_source", [](const SyntheticProblem& s) { return s.gt.unmatched_source; })
      .def_property_readonly("unmatched_target", [](const SyntheticProblem& s) { return s.gt.unmatched_target; })
      .def("save", [](const SyntheticProblem& s, const std::string& dir) { write_problem_dir(dir, s.problem, s.gt); })
      .def_static("load", [](const std::string& dir) {
        auto [problem, gt] = read_problem_dir(dir);
        return SyntheticProblem{std::move(problem), std::move(gt)};
      });

  m.def(
      "generate_problem",
      [](std::uint64_t seed, int n_inliers, int n_outliers_source, int n_outliers_target, double noise_sigma,
         double desc_noise_sigma, int descriptor_dim) {
        SynthConfig cfg;
        cfg.n_inliers = n_inliers;
        cfg.n_outliers_source = n_outliers_source;
        cfg.n_outliers_target = n_outliers_target;
        cfg.noise_sigma = noise_sigma;
        cfg.desc_noise_sigma = desc_noise_sigma;
        cfg.descriptor_dim = descriptor_dim;
        return generate_problem(cfg, seed);
      },
      py::arg("seed"), py::arg("n_inliers") = 48, py::arg("n_outliers_source") = 16,
      py::arg("n_outliers_target") = 16, py::arg("noise_sigma") = 1.0, py::arg("desc_noise_sigma") = 0.3,
      py::arg("descriptor_dim") = 32);

  m.def(
      "nn_baseline", [](const SyntheticProblem& s) { return to_tuples(nn_baseline(s.problem)); }, py::arg("problem"));
  m.def(
      "precision",
      [](const py::iterable& pred, const SyntheticProblem& s) {
        // Accepts (source, target) pairs or the (source, target, confidence) triples returned by matchers.
        std::vector<std::pair<Index, Index>> pairs;
        for (const auto& item : pred) {
          const auto seq = py::reinterpret_borrow<py::sequence>(item);
          pairs.emplace_back(seq[0].cast<Index>(), seq[1].cast<Index>());
        }
        return precision(from_pairs(pairs), s.gt).value;
      },
      py::arg("pred"), py::arg("problem"));

  py::class_<ModelParams>(m, "Model")
      .def_static(
          "init",
          [](const std::string& config_json, std::uint64_t seed) {
            return init_params(config_from_json(config_json).model, seed);
          },
          py::arg("config_json") = "{}", py::arg("seed") = 7)
      .def_static("load", [](const std::string& path) { return exact_params(read_checkpoint(path)); })
      .def("save",
           [](const ModelParams& p, const std::string& path) {
             Checkpoint c;
             c.params = p;
             write_checkpoint(path, c);
           })
      .def_property_readonly("config_json", [](const ModelParams& p) { return nlohmann::json(p.config).dump(); })
      .def_property_readonly("num_parameters", &ModelParams::scalar_count)
      .def_property_readonly("tensor_names",
                             [](const ModelParams& p) {
                               std::vector<std::string> names;
                               for (const auto& t : p.tensors) names.push_back(t.name);
                               return names;
                             })
      .def(
          "match",
          [](const ModelParams& p, const SyntheticProblem& s, std::optional<double> threshold) {
            return to_tuples(match(p, s.problem, threshold.value_or(p.config.match_threshold)).matches);
          },
          py::arg("problem"), py::arg("threshold") = py::none())
      .def(
          "plan", [](const ModelParams& p, const SyntheticProblem& s) { return match(p, s.problem, 1.0).plan; },
          py::arg("problem"));

  m.def(
      "train",
      [](const std::string& config_json, std::optional<int> steps) {
        TrainConfig cfg = config_from_json(config_json);
        if (steps) cfg.steps = *steps;
        TrainRun run;
        {
          py::gil_scoped_release release;
          run = train(cfg);
        }
        return py::make_tuple(run.params, run.final_precision.value_or(0.0));
      },
      py::arg("config_json") = "{}", py::arg("steps") = py::none(),
      "Trains on synthetic problems; returns (model, held-out precision).");

  m.def(
      "baseline_precision",
      [](const std::string& config_json) { return baseline_precision(held_out_set(config_from_json(config_json))); },
      py::arg("config_json") = "{}");
}
