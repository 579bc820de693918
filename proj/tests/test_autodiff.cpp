#include <cmath>

#include <doctest.h>

#include "dualgan/autodiff.hpp"
#include "dualgan/errors.hpp"

using namespace dualgan;

namespace {

double sum_weighted(const Matrix& outputs, const Matrix& adjoints) {
  return (outputs.array() * adjoints.array()).sum();
}

}  // namespace

TEST_CASE("forward: zero parameters give zero outputs") {
  const MLPSpec spec = make_mlp_spec({3, 4, 2}, Activation::Tanh);
  const ParamVector params = zero_params(spec);
  Rng rng(1);
  Matrix x(5, 3);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);

  const ForwardResult fwd = forward_mlp(spec, params, x);
  CHECK(fwd.outputs.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: identity weights reproduce the input") {
  const MLPSpec spec = make_mlp_spec({3, 3}, Activation::Tanh);
  ParamVector params = zero_params(spec);
  for (int i = 0; i < 3; ++i) params.values[i * 3 + i] = 1.0;  // column-major identity

  Matrix x(4, 3);
  x << 1, 2, 3, -1, 0.5, 2, 0, 0, 0, 9, -9, 3;
  const ForwardResult fwd = forward_mlp(spec, params, x);
  CHECK((fwd.outputs - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: 2-3-1 tanh net matches a straight-line evaluation") {
  const MLPSpec spec = make_mlp_spec({2, 3, 1}, Activation::Tanh);
  Rng rng(7);
  const ParamVector params = random_params(spec, rng);
  Matrix x(1, 2);
  x << 0.3, -1.1;

  const ForwardResult fwd = forward_mlp(spec, params, x);

  // independent evaluation of the same composition
  const auto w0 = weight_block(params, 0);
  const auto b0 = bias_block(params, 0);
  const auto w1 = weight_block(params, 1);
  const auto b1 = bias_block(params, 1);
  double hand = b1[0];
  for (int kk = 0; kk < 3; ++kk) {
    const double z = w0(kk, 0) * x(0, 0) + w0(kk, 1) * x(0, 1) + b0[kk];
    hand += w1(0, kk) * std::tanh(z);
  }
  CHECK(std::abs(fwd.outputs(0, 0) - hand) <= 1e-12);
}

TEST_CASE("forward: dimension mismatch names the offending layer") {
  const MLPSpec spec = make_mlp_spec({3, 4, 2}, Activation::Relu);
  const ParamVector params = zero_params(spec);
  const Matrix wrong = Matrix::Zero(2, 5);
  CHECK_THROWS_WITH_AS(forward_mlp(spec, params, wrong),
                       doctest::Contains("layer 0"), ValidationError);
}

TEST_CASE("grad_params: linear scorer gradient is the input") {
  const MLPSpec spec = make_mlp_spec({4, 1}, Activation::Tanh);
  Rng rng(3);
  const ParamVector params = random_params(spec, rng);
  Matrix x(1, 4);
  x << 0.5, -2.0, 3.0, 1.0;

  const ForwardResult fwd = forward_mlp(spec, params, x);
  const ParamVector grad = grad_params(fwd.tape, Matrix::Ones(1, 1));
  CHECK((grad.values.head(4).transpose() - x).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(grad.values[4] == 1.0);  // bias
}

TEST_CASE("grad_params: zero adjoints give a zero gradient") {
  const MLPSpec spec = make_mlp_spec({2, 5, 3}, Activation::Relu);
  Rng rng(11);
  const ParamVector params = random_params(spec, rng);
  Matrix x(6, 2);
  std::normal_distribution<double> gauss;
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);

  const ForwardResult fwd = forward_mlp(spec, params, x);
  const ParamVector grad = grad_params(fwd.tape, Matrix::Zero(6, 3));
  CHECK(grad.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_params: random two-layer net agrees with finite differences") {
  const MLPSpec spec = make_mlp_spec({3, 6, 2}, Activation::Tanh);
  Rng rng(19);
  const ParamVector params = random_params(spec, rng);
  std::normal_distribution<double> gauss;
  Matrix x(4, 3), adj(4, 2);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
  for (int i = 0; i < adj.size(); ++i) adj.data()[i] = gauss(rng);

  const ForwardResult fwd = forward_mlp(spec, params, x);
  const ParamVector grad = grad_params(fwd.tape, adj);

  const auto f = [&](const Vector& p) {
    return sum_weighted(forward_mlp(spec, params_from_values(spec, p), x).outputs, adj);
  };
  CHECK(finite_diff_check(f, grad.values, params.values, 1e-5) <= 1e-4);
}

TEST_CASE("grad_params: adjoint shape mismatch is rejected") {
  const MLPSpec spec = make_mlp_spec({2, 3, 1}, Activation::Tanh);
  Rng rng(2);
  const ParamVector params = random_params(spec, rng);
  const ForwardResult fwd = forward_mlp(spec, params, Matrix::Zero(4, 2));
  CHECK_THROWS_AS(grad_params(fwd.tape, Matrix::Zero(3, 1)), ValidationError);
}

TEST_CASE("per-sample score gradients") {
  Rng rng(23);
  std::normal_distribution<double> gauss;

  SUBCASE("linear scorer rows equal the inputs") {
    const MLPSpec spec = make_mlp_spec({3, 1}, Activation::Tanh);
    const ParamVector params = random_params(spec, rng);
    Matrix x(5, 3);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
    const Matrix grads = per_sample_score_grads(spec, params, x);
    CHECK((grads.leftCols(3) - x).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((grads.col(3).array() - 1.0).abs().maxCoeff() == 0.0);
  }

  SUBCASE("duplicated inputs produce identical rows") {
    const MLPSpec spec = make_mlp_spec({2, 4, 1}, Activation::Relu);
    const ParamVector params = random_params(spec, rng);
    Matrix x(2, 2);
    x << 0.7, -0.2, 0.7, -0.2;
    const Matrix grads = per_sample_score_grads(spec, params, x);
    CHECK((grads.row(0) - grads.row(1)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("rows match one-sample-at-a-time backward passes") {
    const MLPSpec spec = make_mlp_spec({3, 5, 1}, Activation::Tanh);
    const ParamVector params = random_params(spec, rng);
    Matrix x(7, 3);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
    const Matrix grads = per_sample_score_grads(spec, params, x);
    for (int i = 0; i < x.rows(); ++i) {
      const ForwardResult one = forward_mlp(spec, params, x.row(i));
      const ParamVector g = grad_params(one.tape, Matrix::Ones(1, 1));
      CHECK((grads.row(i).transpose() - g.values).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("non-scalar output spec is rejected") {
    const MLPSpec spec = make_mlp_spec({3, 4, 2}, Activation::Tanh);
    const ParamVector params = zero_params(spec);
    CHECK_THROWS_AS(per_sample_score_grads(spec, params, Matrix::Zero(2, 3)), ValidationError);
  }
}

TEST_CASE("finite_diff_check validates itself") {
  SUBCASE("quadratic") {
    const Vector p = Vector::LinSpaced(5, -1.0, 2.0);
    const auto f = [](const Vector& v) { return 0.5 * v.squaredNorm(); };
    CHECK(finite_diff_check(f, p, p, 1e-5) <= 1e-9);
  }
  SUBCASE("linear") {
    Vector c(3);
    c << 1.0, -2.0, 0.25;
    const Vector p = Vector::Zero(3);
    const auto f = [&](const Vector& v) { return c.dot(v); };
    CHECK(finite_diff_check(f, c, p, 1e-5) <= 1e-12);
  }
  SUBCASE("random mlp loss") {
    const MLPSpec spec = make_mlp_spec({2, 4, 1}, Activation::Tanh);
    Rng rng(5);
    const ParamVector params = random_params(spec, rng);
    Matrix x(3, 2);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);

    const auto loss = [&](const Vector& p) {
      const Matrix out = forward_mlp(spec, params_from_values(spec, p), x).outputs;
      return 0.5 * out.squaredNorm();
    };
    const ForwardResult fwd = forward_mlp(spec, params, x);
    const ParamVector grad = grad_params(fwd.tape, fwd.outputs);
    CHECK(finite_diff_check(loss, grad.values, params.values, 1e-5) <= 1e-4);
  }
  SUBCASE("non-finite evaluations are reported") {
    const Vector p = Vector::Zero(1);
    const auto f = [](const Vector& v) { return std::log(v[0]); };
    CHECK_THROWS_AS(finite_diff_check(f, p, p, 1e-5), NumericalError);
  }
}

TEST_CASE("gradient correctness across random nets and points") {
  Rng rng(101);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    const MLPSpec spec = make_mlp_spec({2, 3 + trial % 3, 1},
                                       trial % 2 ? Activation::Tanh : Activation::Relu,
                                       trial % 3 ? OutputKind::Linear : OutputKind::Sigmoid);
    const ParamVector params = random_params(spec, rng);
    Matrix x(3, 2), adj(3, 1);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
    for (int i = 0; i < adj.size(); ++i) adj.data()[i] = gauss(rng);

    const ForwardResult fwd = forward_mlp(spec, params, x);
    const ParamVector grad = grad_params(fwd.tape, adj);
    const auto f = [&](const Vector& p) {
      return sum_weighted(forward_mlp(spec, params_from_values(spec, p), x).outputs, adj);
    };
    CHECK(finite_diff_check(f, grad.values, params.values, 1e-5) <= 1e-4);
  }
}

TEST_CASE("input gradients agree with finite differences") {
  const MLPSpec spec = make_mlp_spec({3, 5, 2}, Activation::Tanh);
  Rng rng(55);
  std::normal_distribution<double> gauss;
  const ParamVector params = random_params(spec, rng);
  Matrix x(2, 3), adj(2, 2);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
  for (int i = 0; i < adj.size(); ++i) adj.data()[i] = gauss(rng);

  const ForwardResult fwd = forward_mlp(spec, params, x);
  const Matrix din = grad_inputs(fwd.tape, adj);

  Vector flat_grad(x.size());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) flat_grad[i * x.cols() + j] = din(i, j);
  Vector flat_x(x.size());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) flat_x[i * x.cols() + j] = x(i, j);

  const auto f = [&](const Vector& v) {
    Matrix xx(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j) xx(i, j) = v[i * x.cols() + j];
    return sum_weighted(forward_mlp(spec, params, xx).outputs, adj);
  };
  CHECK(finite_diff_check(f, flat_grad, flat_x, 1e-5) <= 1e-4);
}

TEST_CASE("gradients are linear in the objective") {
  const MLPSpec spec = make_mlp_spec({2, 4, 2}, Activation::Tanh);
  Rng rng(77);
  std::normal_distribution<double> gauss;
  const ParamVector params = random_params(spec, rng);
  Matrix x(3, 2), adj_a(3, 2), adj_b(3, 2);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);
  for (int i = 0; i < adj_a.size(); ++i) adj_a.data()[i] = gauss(rng);
  for (int i = 0; i < adj_b.size(); ++i) adj_b.data()[i] = gauss(rng);
  const double alpha = 0.7, beta = -1.3;

  const ForwardResult fwd = forward_mlp(spec, params, x);
  const Vector ga = grad_params(fwd.tape, adj_a).values;
  const Vector gb = grad_params(fwd.tape, adj_b).values;
  const Vector gc = grad_params(fwd.tape, alpha * adj_a + beta * adj_b).values;
  CHECK((gc - alpha * ga - beta * gb).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("forward and backward are deterministic") {
  const MLPSpec spec = make_mlp_spec({2, 8, 1}, Activation::Relu);
  Rng rng_a(6), rng_b(6);
  const ParamVector pa = random_params(spec, rng_a);
  const ParamVector pb = random_params(spec, rng_b);
  CHECK(pa.values == pb.values);

  Matrix x(10, 2);
  std::normal_distribution<double> gauss;
  Rng rng(9);
  for (int i = 0; i < x.size(); ++i) x.data()[i] = gauss(rng);

  const ForwardResult fa = forward_mlp(spec, pa, x);
  const ForwardResult fb = forward_mlp(spec, pb, x);
  CHECK(fa.outputs == fb.outputs);
  const Matrix adj = Matrix::Ones(10, 1);
  CHECK(grad_params(fa.tape, adj).values == grad_params(fb.tape, adj).values);
}

TEST_CASE("checkpoints round-trip through the file format") {
  const MLPSpec spec = make_mlp_spec({4, 6, 2}, Activation::Relu, OutputKind::Sigmoid);
  Rng rng(13);
  const ParamVector params = random_params(spec, rng);
  const std::string path = "test_checkpoint.json";
  save_checkpoint(path, spec, params, "deadbeef");

  const auto [loaded_spec, loaded_params] = load_checkpoint(path);
  CHECK(loaded_spec.layer_sizes == spec.layer_sizes);
  CHECK(loaded_spec.output == spec.output);
  CHECK(loaded_params.values == params.values);
  std::remove(path.c_str());
}
