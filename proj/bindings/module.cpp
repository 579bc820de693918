#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dualgan/autodiff.hpp"
#include "dualgan/data_features.hpp"
#include "dualgan/dual_linear.hpp"
#include "dualgan/experiment.hpp"
#include "dualgan/metrics.hpp"
#include "dualgan/trust_region.hpp"

namespace py = pybind11;
using namespace dualgan;

namespace {

/// Thin handle over a network spec with numpy-friendly entry points.
class Mlp {
 public:
  Mlp(std::vector<int> layer_sizes, const std::string& activation, const std::string& output)
      : spec_(make_mlp_spec(std::move(layer_sizes), activation_from_string(activation),
                            output_kind_from_string(output))) {}

  int param_count() const { return spec_.param_count(); }

  Vector random_init(unsigned long seed) const {
    Rng rng(seed);
    return random_params(spec_, rng).values;
  }

  Matrix forward(const Vector& params, const Matrix& x) const {
    return forward_mlp(spec_, params_from_values(spec_, params), x).outputs;
  }

  std::pair<Vector, Matrix> grad(const Vector& params, const Matrix& x,
                                 const Matrix& adjoints) const {
    const ForwardResult fwd = forward_mlp(spec_, params_from_values(spec_, params), x);
    BackwardResult back = backward(fwd.tape, adjoints);
    return {std::move(back.param_grad.values), std::move(back.input_grad)};
  }

  Matrix score_grads(const Vector& params, const Matrix& x) const {
    return per_sample_score_grads(spec_, params_from_values(spec_, params), x);
  }

 private:
  MLPSpec spec_;
};

ScoreLinData score_lin_data(const Vector& scores_x, const Vector& scores_z,
                            const Matrix& grads_x, const Matrix& grads_z, const Vector& w_k,
                            double C) {
  ScoreLinData data;
  data.scores_x = scores_x;
  data.scores_z = scores_z;
  data.grads_x = grads_x;
  data.grads_z = grads_z;
  data.w_k = w_k;
  data.C = C;
  data.validate();
  return data;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GAN training through the discriminator's convex dual";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<Mlp>(m, "Mlp")
      .def(py::init<std::vector<int>, const std::string&, const std::string&>(),
           py::arg("layer_sizes"), py::arg("activation") = "tanh", py::arg("output") = "linear")
      .def_property_readonly("param_count", &Mlp::param_count)
      .def("random_init", &Mlp::random_init, py::arg("seed"))
      .def("forward", &Mlp::forward, py::arg("params"), py::arg("x"))
      .def("grad", &Mlp::grad, py::arg("params"), py::arg("x"), py::arg("adjoints"))
      .def("score_grads", &Mlp::score_grads, py::arg("params"), py::arg("x"));

  m.def("binary_entropy", &binary_entropy, py::arg("u"));

  m.def(
      "rbf_features",
      [](const Vector& x, const Matrix& anchors, double temperature) {
        return rbf_features(x, anchors, temperature);
      },
      py::arg("x"), py::arg("anchors"), py::arg("temperature"));
  m.def("rbf_features_batch", &rbf_features_batch, py::arg("x"), py::arg("anchors"),
        py::arg("temperature"));

  m.def(
      "ring_mixture_centers",
      [](int modes, double radius, double covariance_scale) {
        return mixture_centers(make_ring_mixture(modes, radius, covariance_scale));
      },
      py::arg("modes"), py::arg("radius"), py::arg("covariance_scale"));
  m.def(
      "sample_ring_mixture",
      [](int modes, double radius, double covariance_scale, int n, unsigned long seed) {
        Rng rng(seed);
        return sample_mixture(make_ring_mixture(modes, radius, covariance_scale), n, rng);
      },
      py::arg("modes"), py::arg("radius"), py::arg("covariance_scale"), py::arg("n"),
      py::arg("seed"));

  m.def(
      "solve_dual_linear",
      [](const Matrix& data_feats, const Matrix& gen_feats, double C, double tol,
         int max_iter) {
        const LinearBatch batch = make_linear_batch(data_feats, gen_feats, C);
        const LinearDualSolution sol = solve_dual_linear(batch, tol, max_iter);
        py::dict out;
        out["lambda_x"] = sol.lambda.lambda_x;
        out["lambda_z"] = sol.lambda.lambda_z;
        out["value"] = sol.value;
        out["w"] = recover_weights(sol.lambda, batch);
        out["converged"] = sol.report.converged;
        out["iterations"] = sol.report.iterations;
        return out;
      },
      py::arg("data_feats"), py::arg("gen_feats"), py::arg("C"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 5000);

  m.def(
      "primal_objective_linear",
      [](const Vector& w, const Matrix& data_feats, const Matrix& gen_feats, double C) {
        return primal_objective_linear(w, make_linear_batch(data_feats, gen_feats, C));
      },
      py::arg("w"), py::arg("data_feats"), py::arg("gen_feats"), py::arg("C"));

  m.def("step_cost_lin", &step_cost_lin, py::arg("grad_f"), py::arg("delta"));
  m.def("model_cost_lin", &model_cost_lin, py::arg("s"), py::arg("f_k"), py::arg("grad_f"));
  m.def(
      "model_score_lin",
      [](const Vector& s, const Vector& scores_x, const Vector& scores_z, const Matrix& grads_x,
         const Matrix& grads_z, const Vector& w_k, double C) {
        return model_score_lin(s, score_lin_data(scores_x, scores_z, grads_x, grads_z, w_k, C));
      },
      py::arg("s"), py::arg("scores_x"), py::arg("scores_z"), py::arg("grads_x"),
      py::arg("grads_z"), py::arg("w_k"), py::arg("C"));
  m.def(
      "solve_tr_dual",
      [](const Vector& scores_x, const Vector& scores_z, const Matrix& grads_x,
         const Matrix& grads_z, const Vector& w_k, double C, double delta, double tol) {
        const TRDualSolution sol = solve_tr_dual(
            score_lin_data(scores_x, scores_z, grads_x, grads_z, w_k, C), delta, tol);
        py::dict out;
        out["step"] = sol.step;
        out["model_value"] = sol.model_value;
        out["dual_value"] = sol.dual_value;
        out["lambda_x"] = sol.lambda.lambda_x;
        out["lambda_z"] = sol.lambda.lambda_z;
        out["lambda_T"] = sol.lambda.lambda_T;
        out["converged"] = sol.report.converged;
        return out;
      },
      py::arg("scores_x"), py::arg("scores_z"), py::arg("grads_x"), py::arg("grads_z"),
      py::arg("w_k"), py::arg("C"), py::arg("delta"), py::arg("tol") = 1e-8);

  m.def(
      "mode_coverage",
      [](const Matrix& samples, int modes, double radius, double covariance_scale,
         int threshold, double k_sigma) {
        const CoverageReport report = mode_coverage(
            samples, make_ring_mixture(modes, radius, covariance_scale), threshold, k_sigma);
        py::dict out;
        out["covered_modes"] = report.covered_modes;
        out["counts"] = report.counts;
        out["threshold"] = report.threshold;
        out["k_sigma"] = report.k_sigma;
        out["all_covered"] = report.all_covered(modes);
        return out;
      },
      py::arg("samples"), py::arg("modes"), py::arg("radius"), py::arg("covariance_scale"),
      py::arg("threshold") = 100, py::arg("k_sigma") = 3.0);

  m.def("lambda_histogram", &lambda_histogram, py::arg("lambdas"), py::arg("n"),
        py::arg("bins"));

  m.def(
      "run_experiment",
      [](const std::string& config_path, bool plots) {
        return run_experiment(config_path, plots);
      },
      py::arg("config_path"), py::arg("plots") = false);
  m.def("check_duality",
        [](int trials, unsigned long seed) {
          const DualityCheckResult res = check_duality(trials, seed);
          py::dict out;
          out["instances"] = res.instances;
          out["failures"] = res.failures;
          out["lines"] = res.lines;
          out["passed"] = res.passed();
          return out;
        },
        py::arg("trials"), py::arg("seed"));
}
