#include <cmath>

#include <doctest.h>

#include "dualgan/dual_linear.hpp"
#include "dualgan/errors.hpp"
#include "dualgan/opt_core.hpp"

using namespace dualgan;

TEST_CASE("solve_box_concave: quadratic with interior optimum") {
  Vector c(3);
  c << 0.2, 0.5, 0.9;
  BoxReparamProblem problem;
  problem.dimension = 3;
  problem.box_hi = 1.0;
  problem.objective = [&](const Vector& lambda, Vector& grad) {
    grad = -2.0 * (lambda - c);
    return -(lambda - c).squaredNorm();
  };

  const auto [lambda, report] = solve_box_concave(problem, Vector::Constant(3, 0.5));
  CHECK(report.converged);
  CHECK((lambda - c).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(report.objective_value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("solve_box_concave: separable entropy peaks at half the box") {
  const int n = 7;
  const double box = 1.0 / (2.0 * n);
  BoxReparamProblem problem;
  problem.dimension = 2 * n;
  problem.box_hi = box;
  problem.objective = [&](const Vector& lambda, Vector& grad) {
    double value = 0.0;
    for (int i = 0; i < lambda.size(); ++i) {
      const double u = 2.0 * n * lambda[i];
      value += binary_entropy(u) / (2.0 * n);
      grad[i] = std::log((1.0 - u) / u);
    }
    return value;
  };

  const auto [lambda, report] = solve_box_concave(problem, Vector::Constant(2 * n, 0.9 * box));
  CHECK(report.converged);
  CHECK((lambda.array() - 1.0 / (4.0 * n)).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("solve_box_concave: single-example instance matches a dense grid search") {
  // one data point and one generated point in one dimension, C = 1
  const int n = 1;
  const double x = 1.3, g = -0.4, C = 1.0;
  const auto objective_value = [&](double lx, double lz) {
    const double d = lx * x - lz * g;
    return -d * d / (2.0 * C) + 0.5 * (binary_entropy(2.0 * lx) + binary_entropy(2.0 * lz));
  };

  BoxReparamProblem problem;
  problem.dimension = 2;
  problem.box_hi = 0.5;
  problem.objective = [&](const Vector& lambda, Vector& grad) {
    const double d = lambda[0] * x - lambda[1] * g;
    grad[0] = -d * x / C + std::log((1.0 - 2.0 * lambda[0]) / (2.0 * lambda[0]));
    grad[1] = d * g / C + std::log((1.0 - 2.0 * lambda[1]) / (2.0 * lambda[1]));
    return objective_value(lambda[0], lambda[1]);
  };

  const auto [lambda, report] = solve_box_concave(problem, Vector::Constant(2, 0.25));
  CHECK(report.converged);

  double best = -1e300;
  const int grid = 2000;
  for (int i = 1; i < grid; ++i) {
    for (int j = 1; j < grid; ++j) {
      best = std::max(best, objective_value(0.5 * i / grid, 0.5 * j / grid));
    }
  }
  CHECK(std::abs(report.objective_value - best) <= 1e-5);
  CHECK(report.objective_value >= best - 1e-12);  // solver at least as good as the grid
}

TEST_CASE("solve_box_concave: ascent iterations never decrease the objective") {
  Rng rng(40);
  std::normal_distribution<double> gauss;
  const int dim = 6;
  Vector c(dim);
  Matrix A(dim, dim);
  for (int i = 0; i < dim; ++i) c[i] = 0.3 + 0.05 * i;
  for (int i = 0; i < A.size(); ++i) A.data()[i] = gauss(rng);
  const Matrix Q = A.transpose() * A + Matrix::Identity(dim, dim);

  std::vector<double> values;
  BoxReparamProblem problem;
  problem.dimension = dim;
  problem.box_hi = 1.0;
  problem.objective = [&](const Vector& lambda, Vector& grad) {
    grad = -Q * (lambda - c);
    const double v = -0.5 * (lambda - c).dot(Q * (lambda - c));
    return v;
  };

  const Vector init = Vector::Constant(dim, 0.05);
  const auto [lambda, report] = solve_box_concave(problem, init);
  CHECK(report.converged);
  CHECK(0.0 < lambda.minCoeff());
  CHECK(lambda.maxCoeff() < 1.0);
  CHECK(report.final_grad_norm <= 1e-8);
}

TEST_CASE("solve_box_concave: boundary init and bad arguments are rejected") {
  BoxReparamProblem problem;
  problem.dimension = 2;
  problem.box_hi = 1.0;
  problem.objective = [](const Vector& lambda, Vector& grad) {
    grad = -lambda;
    return -0.5 * lambda.squaredNorm();
  };
  Vector boundary(2);
  boundary << 0.0, 0.5;
  CHECK_THROWS_AS(solve_box_concave(problem, boundary), ValidationError);

  SolveOptions opts;
  opts.tol = -1.0;
  CHECK_THROWS_AS(solve_box_concave(problem, Vector::Constant(2, 0.5), opts), ValidationError);
}

TEST_CASE("solve_box_concave: non-finite objectives abort with a diagnostic") {
  BoxReparamProblem problem;
  problem.dimension = 1;
  problem.box_hi = 1.0;
  problem.objective = [](const Vector&, Vector& grad) {
    grad.setConstant(std::numeric_limits<double>::quiet_NaN());
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(solve_box_concave(problem, Vector::Constant(1, 0.5)), NumericalError);
}

TEST_CASE("solve_box_concave: hitting max_iter reports no convergence") {
  BoxReparamProblem problem;
  problem.dimension = 2;
  problem.box_hi = 1.0;
  problem.objective = [](const Vector& lambda, Vector& grad) {
    grad = -2.0 * (lambda - Vector::Constant(2, 0.9));
    return -(lambda - Vector::Constant(2, 0.9)).squaredNorm();
  };
  SolveOptions opts;
  opts.max_iter = 1;
  const auto [lambda, report] = solve_box_concave(problem, Vector::Constant(2, 0.1), opts);
  CHECK_FALSE(report.converged);
}

TEST_CASE("backtracking_linesearch") {
  SUBCASE("full step accepted on a clean descent direction") {
    const auto f = [](const Vector& v) { return -v.squaredNorm(); };
    Vector x(2), d(2);
    x << 1.0, 0.0;
    d << -1.0, 0.0;
    const double step = backtracking_linesearch(f, x, d, 1.0);
    CHECK(step == 1.0);
    CHECK(f(x + step * d) >= f(x));
  }
  SUBCASE("zero direction returns a zero step") {
    const auto f = [](const Vector& v) { return -v.squaredNorm(); };
    const double step = backtracking_linesearch(f, Vector::Ones(3), Vector::Zero(3), 1.0);
    CHECK(step == 0.0);
  }
  SUBCASE("random concave quadratics never lose value") {
    Rng rng(91);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 100; ++trial) {
      const int dim = 1 + trial % 4;
      Matrix A(dim, dim);
      for (int i = 0; i < A.size(); ++i) A.data()[i] = gauss(rng);
      const Matrix Q = A.transpose() * A + 0.1 * Matrix::Identity(dim, dim);
      Vector x(dim);
      for (int i = 0; i < dim; ++i) x[i] = gauss(rng);
      const auto f = [&](const Vector& v) { return -0.5 * v.dot(Q * v); };
      Vector grad = -Q * x;  // ascent direction
      const double step = backtracking_linesearch(f, x, grad, std::abs(gauss(rng)) + 0.1);
      CHECK(f(x + step * grad) >= f(x));
    }
  }
  SUBCASE("non-finite evaluation is an error") {
    const auto f = [](const Vector& v) { return v[0] > 0.5 ? std::nan("") : 0.0; };
    Vector x(1), d(1);
    x << 0.0;
    d << 1.0;
    CHECK_THROWS_AS(backtracking_linesearch(f, x, d, 1.0), NumericalError);
  }
}

TEST_CASE("solve_lambda_T") {
  SUBCASE("inactive constraint keeps the multiplier at zero") {
    const auto g = [](double t) { return std::make_pair(-t, -1.0 - t); };
    CHECK(solve_lambda_T(g) == 0.0);
  }
  SUBCASE("quadratic root is located") {
    const auto g = [](double t) {
      return std::make_pair(-(t - 3.0) * (t - 3.0), -2.0 * (t - 3.0));
    };
    CHECK(solve_lambda_T(g) == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("derivative that stays positive is an unbounded dual") {
    const auto g = [](double t) { return std::make_pair(t, 1.0); };
    CHECK_THROWS_AS(solve_lambda_T(g), NumericalError);
  }
}
