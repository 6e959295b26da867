// Python bindings for the estimation, detection, simulation, and correction
// machinery. Predictions cross the boundary as numpy arrays: 1-D integer
// arrays are hard labels, 2-D float arrays are per-class probabilities.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "labelshift/confusion.hpp"
#include "labelshift/detect.hpp"
#include "labelshift/io.hpp"
#include "labelshift/mmd.hpp"
#include "labelshift/model.hpp"
#include "labelshift/pipeline.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/shiftsim.hpp"
#include "labelshift/solve.hpp"

namespace py = pybind11;
using namespace labelshift;

namespace {

Predictions to_predictions(const py::object& obj) {
  if (py::isinstance<py::array>(obj)) {
    auto arr = obj.cast<py::array>();
    if (arr.ndim() == 2) return Predictions::soft(obj.cast<Eigen::MatrixXd>());
  }
  return Predictions::hard(obj.cast<Eigen::VectorXi>());
}

Solver parse_solver(const std::string& name) {
  if (name == "lu") return Solver::Lu;
  if (name == "pinv" || name == "pseudoinverse") return Solver::PseudoInverse;
  throw DomainError("unknown solver: " + name);
}

detect::TestMethod parse_method(const std::string& name) {
  if (name == "ks") return detect::TestMethod::Ks;
  if (name == "chi2") return detect::TestMethod::Chi2;
  throw DomainError("unknown test method: " + name);
}

PredMode parse_mode(const std::string& name) {
  if (name == "hard") return PredMode::Hard;
  if (name == "soft") return PredMode::Soft;
  throw DomainError("unknown prediction mode: " + name);
}

py::dict row_to_dict(const pipeline::ResultRow& r) {
  py::dict d;
  d["shift_kind"] = r.shift_kind;
  d["shift_param"] = r.shift_param;
  d["shift_class"] = r.shift_class ? py::cast(*r.shift_class) : py::none();
  d["n"] = static_cast<std::int64_t>(r.n);
  d["m"] = static_cast<std::int64_t>(r.m);
  d["seed"] = r.seed;
  d["replication"] = r.replication;
  auto opt = [](const auto& v) { return v ? py::cast(*v) : py::object(py::none()); };
  d["mse_w"] = opt(r.mse_w);
  d["mse_mu"] = opt(r.mse_mu);
  d["sigma_min"] = opt(r.sigma_min);
  d["p_value"] = opt(r.p_value);
  d["reject"] = opt(r.reject);
  d["acc_baseline"] = opt(r.acc_baseline);
  d["acc_corrected"] = opt(r.acc_corrected);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Black box label-shift estimation, detection, and correction";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<SupportError>(m, "SupportError", PyExc_ValueError);

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def_readonly("entries", &ConfusionMatrix::entries)
      .def_readonly("n", &ConfusionMatrix::n)
      .def_property_readonly(
          "mode", [](const ConfusionMatrix& c) { return c.mode == PredMode::Hard ? "hard" : "soft"; })
      .def("__repr__", [](const ConfusionMatrix& c) {
        return "<ConfusionMatrix k=" + std::to_string(c.k()) + " n=" + std::to_string(c.n) + ">";
      });

  py::class_<WeightEstimate>(m, "WeightEstimate")
      .def_readonly("w", &WeightEstimate::w)
      .def_readonly("w_raw", &WeightEstimate::w_raw)
      .def_readonly("mu_y", &WeightEstimate::mu_y)
      .def_readonly("sigma_min", &WeightEstimate::sigma_min)
      .def_readonly("fallback", &WeightEstimate::fallback)
      .def_readonly("clipped", &WeightEstimate::clipped)
      .def_readonly("bound", &WeightEstimate::bound)
      .def("mu_y_normalized",
           [](const WeightEstimate& e) { return e.mu_y_normalized().probs(); })
      .def("__repr__", [](const WeightEstimate& e) {
        return std::string("<WeightEstimate fallback=") + (e.fallback ? "True" : "False") +
               " sigma_min=" + std::to_string(e.sigma_min) + ">";
      });

  py::class_<detect::ShiftReport>(m, "ShiftReport")
      .def_property_readonly("method",
                             [](const detect::ShiftReport& r) { return detect::method_name(r.method); })
      .def_readonly("statistic", &detect::ShiftReport::statistic)
      .def_readonly("p_value", &detect::ShiftReport::p_value)
      .def_readonly("alpha", &detect::ShiftReport::alpha)
      .def_readonly("reject", &detect::ShiftReport::reject)
      .def_readonly("n1", &detect::ShiftReport::n1)
      .def_readonly("n2", &detect::ShiftReport::n2)
      .def("__repr__", [](const detect::ShiftReport& r) {
        return std::string("<ShiftReport ") + detect::method_name(r.method) +
               " p=" + std::to_string(r.p_value) + (r.reject ? " reject>" : ">");
      });

  py::class_<model::SoftmaxModel>(m, "SoftmaxModel")
      .def_readonly("weights", &model::SoftmaxModel::weights)
      .def_readonly("bias", &model::SoftmaxModel::bias)
      .def_property_readonly("k", [](const model::SoftmaxModel& s) { return s.space.k; });

  // core estimation
  m.def(
      "estimate_confusion",
      [](const py::object& preds, const Eigen::VectorXi& labels, int k) {
        return estimate_confusion(SourceEval(to_predictions(preds), labels), LabelSpace(k));
      },
      py::arg("preds"), py::arg("labels"), py::arg("k"));

  m.def(
      "estimate_pred_marginal",
      [](const py::object& preds, int k) {
        return estimate_pred_marginal(to_predictions(preds), LabelSpace(k)).probs();
      },
      py::arg("preds"), py::arg("k"));

  m.def(
      "estimate_label_marginal",
      [](const Eigen::VectorXi& labels, int k) {
        return estimate_label_marginal(labels, LabelSpace(k)).probs();
      },
      py::arg("labels"), py::arg("k"));

  m.def(
      "solve_weights",
      [](const Eigen::MatrixXd& confusion, const Eigen::VectorXd& mu_hat,
         const Eigen::VectorXd& nu_y, double delta, const std::string& solver, Eigen::Index n) {
        ConfusionMatrix c(confusion, PredMode::Hard, n);
        return solve_weights(c, LabelDistribution(mu_hat), LabelDistribution(nu_y), delta,
                             parse_solver(solver));
      },
      py::arg("confusion"), py::arg("mu_hat"), py::arg("nu_y"), py::arg("delta"),
      py::arg("solver") = "lu", py::arg("n") = 100);

  m.def(
      "estimate_weights",
      [](const py::object& source_preds, const Eigen::VectorXi& source_labels,
         const py::object& target_preds, int k, double delta, const std::string& solver) {
        EstimateOptions opts;
        opts.delta = delta;
        opts.solver = parse_solver(solver);
        return estimate_weights(SourceEval(to_predictions(source_preds), source_labels),
                                TargetEval(to_predictions(target_preds)), LabelSpace(k), opts);
      },
      py::arg("source_preds"), py::arg("source_labels"), py::arg("target_preds"), py::arg("k"),
      py::arg("delta") = 0.0, py::arg("solver") = "lu");

  m.def("smallest_singular_value",
        py::overload_cast<const Eigen::MatrixXd&>(&smallest_singular_value), py::arg("matrix"));

  m.def(
      "error_bound",
      [](Eigen::Index n, Eigen::Index m_, int k, double sigma_min, const Eigen::VectorXd& w) {
        return error_bound(n, m_, k, sigma_min, w);
      },
      py::arg("n"), py::arg("m"), py::arg("k"), py::arg("sigma_min"), py::arg("w"));

  m.def("default_delta", [](int k) { return default_delta(LabelSpace(k)); }, py::arg("k"));

  // detection
  m.def(
      "ks_two_sample",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return detect::ks_two_sample(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "chi2_two_sample",
      [](const Eigen::VectorXd& counts_a, const Eigen::VectorXd& counts_b) {
        return detect::chi2_two_sample(counts_a, counts_b);
      },
      py::arg("counts_a"), py::arg("counts_b"));

  m.def(
      "detect_label_shift",
      [](const py::object& source_preds, const py::object& target_preds, int k, double alpha,
         const std::string& method) {
        return detect::detect_label_shift(to_predictions(source_preds),
                                          to_predictions(target_preds), LabelSpace(k), alpha,
                                          parse_method(method));
      },
      py::arg("source_preds"), py::arg("target_preds"), py::arg("k"), py::arg("alpha") = 0.05,
      py::arg("method") = "chi2");

  m.def(
      "assumption_check_mmd",
      [](const Eigen::MatrixXd& source_scores, const Eigen::VectorXi& source_labels,
         const Eigen::VectorXd& w, const Eigen::MatrixXd& target_scores, int bootstrap_reps,
         std::uint64_t seed, double alpha) {
        return detect::assumption_check_mmd(source_scores, source_labels, w, target_scores,
                                            bootstrap_reps, SeededRng(seed), alpha);
      },
      py::arg("source_scores"), py::arg("source_labels"), py::arg("w"), py::arg("target_scores"),
      py::arg("bootstrap_reps") = 200, py::arg("seed") = 0, py::arg("alpha") = 0.05);

  // shift simulation
  m.def(
      "apply_knockout",
      [](const Eigen::VectorXd& base, int class_index, double delta) {
        return sim::apply_knockout(LabelDistribution(base), class_index, delta).probs();
      },
      py::arg("base"), py::arg("class_index"), py::arg("delta"));

  m.def(
      "tweak_one",
      [](int k, int class_index, double rho) {
        return sim::tweak_one(LabelSpace(k), class_index, rho).probs();
      },
      py::arg("k"), py::arg("class_index"), py::arg("rho"));

  m.def(
      "dirichlet_shift",
      [](int k, double alpha, std::uint64_t seed) {
        SeededRng rng(seed);
        return sim::dirichlet_shift(LabelSpace(k), alpha, rng).probs();
      },
      py::arg("k"), py::arg("alpha"), py::arg("seed") = 0);

  m.def(
      "resample_by_label",
      [](const Eigen::MatrixXd& features, const Eigen::VectorXi& labels, int k,
         const Eigen::VectorXd& q, Eigen::Index size, std::uint64_t seed) {
        SeededRng rng(seed);
        Dataset out = sim::resample_by_label(Dataset(features, labels, LabelSpace(k)),
                                             LabelDistribution(q), size, rng);
        return py::make_tuple(out.features, out.labels);
      },
      py::arg("features"), py::arg("labels"), py::arg("k"), py::arg("q"), py::arg("size"),
      py::arg("seed") = 0);

  // model
  m.def(
      "gen_gaussian_mixture",
      [](int k, Eigen::Index dim, const Eigen::MatrixXd& means, double scale,
         const Eigen::VectorXd& q, Eigen::Index n, std::uint64_t seed) {
        SeededRng rng(seed);
        Dataset out = model::gen_gaussian_mixture(LabelSpace(k), dim, means, scale,
                                                  LabelDistribution(q), n, rng);
        return py::make_tuple(out.features, out.labels);
      },
      py::arg("k"), py::arg("dim"), py::arg("means"), py::arg("scale"), py::arg("q"), py::arg("n"),
      py::arg("seed") = 0);

  m.def(
      "corner_means",
      [](int k, Eigen::Index dim, double separation, double scale) {
        return model::corner_means(LabelSpace(k), dim, separation, scale);
      },
      py::arg("k"), py::arg("dim"), py::arg("separation"), py::arg("scale") = 1.0);

  m.def(
      "train_softmax",
      [](const Eigen::MatrixXd& features, const Eigen::VectorXi& labels, int k,
         std::optional<Eigen::VectorXd> example_weights, double learning_rate, int iterations,
         double l2) {
        model::TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.iterations = iterations;
        cfg.l2 = l2;
        return model::train_softmax(Dataset(features, labels, LabelSpace(k)), example_weights,
                                    cfg);
      },
      py::arg("features"), py::arg("labels"), py::arg("k"),
      py::arg("example_weights") = std::nullopt, py::arg("learning_rate") = 0.1,
      py::arg("iterations") = 100, py::arg("l2") = 0.0);

  m.def("predict_soft", &model::predict_soft, py::arg("model"), py::arg("features"));
  m.def("predict_hard", &model::predict_hard, py::arg("model"), py::arg("features"));

  m.def(
      "loss_and_grad",
      [](const model::SoftmaxModel& mm, const Eigen::MatrixXd& features,
         const Eigen::VectorXi& labels, std::optional<Eigen::VectorXd> example_weights,
         double l2) {
        model::LossGrad lg = model::loss_and_grad(
            mm, Dataset(features, labels, mm.space), example_weights, l2);
        return py::make_tuple(lg.loss, lg.grad_weights, lg.grad_bias);
      },
      py::arg("model"), py::arg("features"), py::arg("labels"),
      py::arg("example_weights") = std::nullopt, py::arg("l2") = 0.0);

  // correction pipeline
  m.def(
      "bbsc_correct",
      [](const Eigen::MatrixXd& features, const Eigen::VectorXi& labels, int k,
         const Eigen::MatrixXd& target_features, double delta, double learning_rate,
         int iterations, double l2, double split_fraction, const std::string& retrain_on,
         std::uint64_t seed, const std::string& solver, const std::string& mode,
         bool detect_first, std::optional<Eigen::VectorXi> target_labels) {
        pipeline::CorrectionConfig cfg;
        cfg.delta = delta;
        cfg.train.learning_rate = learning_rate;
        cfg.train.iterations = iterations;
        cfg.train.l2 = l2;
        cfg.split_fraction = split_fraction;
        cfg.retrain_on =
            retrain_on == "split" ? pipeline::RetrainOn::Split : pipeline::RetrainOn::Full;
        cfg.seed = seed;
        cfg.solver = parse_solver(solver);
        cfg.estimation_mode = parse_mode(mode);
        cfg.detect_first = detect_first;
        pipeline::CorrectionResult res =
            pipeline::bbsc_correct(Dataset(features, labels, LabelSpace(k)), target_features, cfg,
                                   target_labels ? &*target_labels : nullptr);
        py::dict d;
        d["model"] = py::cast(res.model);
        d["baseline"] = py::cast(res.baseline);
        d["weights"] = py::cast(res.weights);
        d["applied_weights"] = res.applied_weights;
        d["skipped_by_detection"] = res.skipped_by_detection;
        d["detection"] = res.detection ? py::cast(*res.detection) : py::object(py::none());
        d["target_accuracy"] =
            res.target_accuracy ? py::cast(*res.target_accuracy) : py::object(py::none());
        d["baseline_accuracy"] =
            res.baseline_accuracy ? py::cast(*res.baseline_accuracy) : py::object(py::none());
        return d;
      },
      py::arg("features"), py::arg("labels"), py::arg("k"), py::arg("target_features"),
      py::arg("delta") = 0.0, py::arg("learning_rate") = 0.1, py::arg("iterations") = 100,
      py::arg("l2") = 0.0, py::arg("split_fraction") = 0.5, py::arg("retrain_on") = "full",
      py::arg("seed") = 0, py::arg("solver") = "lu", py::arg("mode") = "hard",
      py::arg("detect_first") = false, py::arg("target_labels") = std::nullopt);

  m.def(
      "run_experiment",
      [](const std::string& kind, const std::string& shift, const std::vector<double>& params,
         int shift_class, const std::vector<Eigen::Index>& sizes, int replications,
         std::uint64_t seed, int k, Eigen::Index dim, double scale, double separation,
         double learning_rate, int iterations, double l2, double delta, double alpha,
         const std::string& method) {
        pipeline::ExperimentConfig cfg;
        cfg.kind = pipeline::parse_experiment_kind(kind);
        cfg.shift_kind = sim::parse_shift_kind(shift);
        cfg.shift_params = params;
        cfg.shift_class = shift_class;
        cfg.sizes = sizes;
        cfg.replications = replications;
        cfg.base_seed = seed;
        cfg.synth.space = LabelSpace(k);
        cfg.synth.dim = dim > 0 ? dim : k;
        cfg.synth.scale = scale;
        cfg.synth.separation = separation;
        cfg.train.learning_rate = learning_rate;
        cfg.train.iterations = iterations;
        cfg.train.l2 = l2;
        cfg.delta = delta;
        cfg.alpha = alpha;
        cfg.method = parse_method(method);
        py::list rows;
        for (const auto& r : pipeline::run_experiment(cfg)) rows.append(row_to_dict(r));
        return rows;
      },
      py::arg("kind"), py::arg("shift"), py::arg("params"), py::arg("shift_class") = 0,
      py::arg("sizes") = std::vector<Eigen::Index>{1000}, py::arg("replications") = 1,
      py::arg("seed") = 0, py::arg("k") = 3, py::arg("dim") = 0, py::arg("scale") = 1.0,
      py::arg("separation") = 6.0, py::arg("learning_rate") = 0.3, py::arg("iterations") = 150,
      py::arg("l2") = 0.0, py::arg("delta") = 0.0, py::arg("alpha") = 0.05,
      py::arg("method") = "chi2");

  // io
  m.def(
      "load_idx",
      [](const std::string& images, const std::string& labels) {
        Dataset d = io::load_idx(images, labels);
        return py::make_tuple(d.features, d.labels, d.space.k);
      },
      py::arg("images_path"), py::arg("labels_path"));

#ifdef LABELSHIFT_VERSION
  m.attr("__version__") = LABELSHIFT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
