// Copyright 2026 The SSA Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssa/error.hpp"
#include "ssa/finetune.hpp"
#include "ssa/spectral.hpp"
#include "support.hpp"

using namespace ssa;

namespace {

struct Instance {
  EnvironmentDataset target;
  Matrix r1;
  Vector mean;
};

Instance random_instance(std::mt19937_64& g, int n, int d = 10, int k = 6) {
  Instance in;
  in.target.X = testing::gaussian(g, n, d);
  in.target.y = testing::gaussian(g, n);
  in.r1 = testing::orthonormal(g, d, k);
  in.mean = testing::gaussian(g, d);
  return in;
}

FinetuneSolution solve(const Instance& in, double l1, double l2) {
  FinetuneConfig cfg;
  cfg.lambda1 = l1;
  cfg.lambda2 = l2;
  return solve_finetune(in.target, in.r1, in.mean, cfg);
}

}  // namespace

TEST_CASE("projector") {
  SUBCASE("coordinate basis") {
    const Matrix p = projector(Matrix::Identity(5, 2));
    Vector diag(5);
    diag << 1, 1, 0, 0, 0;
    CHECK((p - Matrix(diag.asDiagonal())).norm() == 0.0);
  }
  SUBCASE("complete basis is the identity") {
    std::mt19937_64 g(1);
    CHECK((projector(testing::orthonormal(g, 6, 6)) - Matrix::Identity(6, 6)).norm() <= 1e-9);
  }
  SUBCASE("matches A (A^T A)^-1 A^T and is an idempotent of trace k") {
    RngStream rng(2, 0);
    const Matrix a = haar_orthonormal(8, 3, rng);
    const Matrix p = projector(a);
    const Matrix ref = a * oracle::gauss_inverse(a.transpose() * a) * a.transpose();
    CHECK((p - ref).norm() <= 1e-10);
    CHECK((p * p - p).norm() <= 1e-9);
    CHECK(p.trace() == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(asymmetry(p) <= 1e-15);
  }
  SUBCASE("non-orthonormal basis") {
    try {
      (void)projector(2.0 * Matrix::Identity(4, 2));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNotOrthonormal);
    }
  }
}

TEST_CASE("lambda rule") {
  CHECK(paper_lambda(0.0, 50, 1.0).lambda1 == 0.0);
  const double expected = 0.01 / (std::sqrt(2000.0) - 0.01);
  CHECK(expected == doctest::Approx(2.2366e-4).epsilon(1e-4));
  const auto l = paper_lambda(0.01, 2000, 1.0);
  CHECK(l.lambda1 == doctest::Approx(expected).epsilon(1e-15));
  CHECK(l.lambda2 == l.lambda1);
  CHECK(paper_lambda(0.01, 100, 2.0).lambda1 == 2.0 * paper_lambda(0.01, 100, 1.0).lambda1);
  CHECK_THROWS_AS(paper_lambda(3.0, 9, 1.0), Error);
  CHECK_THROWS_AS(paper_lambda(0.01, 10, 0.0), Error);
}

TEST_CASE("closed form agrees with an elimination solve and a CG minimizer") {
  std::mt19937_64 g(3);
  for (int n : {5, 40, 2000}) {
    for (double l1 : {1e-4, 1.0, 1e4}) {
      for (double l2 : {1e-4, 1.0, 1e4}) {
        const Instance in = random_instance(g, n);
        const auto sol = solve(in, l1, l2);
        const Matrix p = in.r1 * in.r1.transpose();
        const double n2 = static_cast<double>(n);
        const Matrix c = in.target.X.transpose() * in.target.X / n2 + l1 * p +
                         l2 * (Matrix::Identity(10, 10) - p);
        const Vector rhs = in.target.X.transpose() * in.target.y / n2 + l1 * p * in.mean;
        const Vector ref = oracle::gauss_solve(c, rhs);
        // Forward error of any backward-stable solve scales with cond(C).
        const Vector ev = oracle::jacobi_eigenvalues(c);
        const double kappa = ev(9) / ev(0);
        CHECK((sol.theta_hat - ref).norm() <= std::max(1e-8, 1e-14 * kappa) * (1 + ref.norm()));
        const double scale = 1 + (in.target.X.transpose() * in.target.y).norm() / n2;
        CHECK(sol.gradient_norm <= 1e-6 * scale);
        const oracle::Quadratic q{in.target.X, in.target.y, p, in.mean, l1, l2};
        CHECK(sol.objective_value == doctest::Approx(q.value(sol.theta_hat)).epsilon(1e-12));
        CHECK(std::abs(sol.objective_value - q.value(oracle::cg_minimize(q))) <= 1e-8);
      }
    }
  }
}

TEST_CASE("finite differences agree with the analytic gradient") {
  std::mt19937_64 g(4);
  const Instance in = random_instance(g, 40);
  const Matrix p = projector(in.r1);
  const Vector theta = testing::gaussian(g, 10);
  const Vector grad = finetune_gradient(in.target, p, in.mean, 0.3, 2.0, theta);
  const double h = 1e-6;
  for (int i : {0, 2, 5, 7, 9}) {
    Vector tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    const double fd = (finetune_objective(in.target, p, in.mean, 0.3, 2.0, tp) -
                       finetune_objective(in.target, p, in.mean, 0.3, 2.0, tm)) /
                      (2 * h);
    CHECK(fd == doctest::Approx(grad(i)).epsilon(1e-4));
  }
}

TEST_CASE("limits of the regularizers") {
  std::mt19937_64 g(5);
  SUBCASE("no regularization is OLS") {
    const Instance in = random_instance(g, 40);
    CHECK((solve(in, 0, 0).theta_hat - fit_ols(in.target)).norm() <= 1e-10 * (1 + fit_ols(in.target).norm()));
  }
  SUBCASE("infinite penalties pin the content part to the mean") {
    const Instance in = random_instance(g, 40);
    const Vector pinned = projector(in.r1) * in.mean;
    const double r6 = (solve(in, 1e6, 1e6).theta_hat - pinned).norm();
    const double r8 = (solve(in, 1e8, 1e8).theta_hat - pinned).norm();
    CHECK(r8 <= 1e-4 * (1 + in.mean.norm()));
    CHECK(r8 <= r6 / 100 * 1.01);
  }
  SUBCASE("equal lambdas collapse to ridge") {
    const Instance in = random_instance(g, 40);
    const Matrix p = projector(in.r1);
    const auto sys = finetune_system(in.target, p, in.mean, 0.7, 0.7);
    const Matrix ridge = in.target.X.transpose() * in.target.X / 40.0 + 0.7 * Matrix::Identity(10, 10);
    CHECK((sys.C - ridge).norm() <= 1e-12);
  }
  SUBCASE("increasing lambda2 shrinks the complement component") {
    const Instance in = random_instance(g, 40);
    const Matrix perp = Matrix::Identity(10, 10) - projector(in.r1);
    double prev = INFINITY;
    for (double l2 : {0.0, 0.01, 0.1, 1.0, 10.0}) {
      const double norm = (perp * solve(in, 0.5, l2).theta_hat).norm();
      CHECK(norm <= prev + 1e-9);
      prev = norm;
    }
  }
  SUBCASE("basis rotation inside the subspace changes nothing") {
    const Instance in = random_instance(g, 40);
    Instance rotated = in;
    rotated.r1 = in.r1 * testing::orthonormal(g, 6, 6);
    CHECK((solve(in, 0.3, 0.8).theta_hat - solve(rotated, 0.3, 0.8).theta_hat).norm() <= 1e-9);
  }
}

TEST_CASE("underdetermined targets") {
  std::mt19937_64 g(6);
  const Instance in = random_instance(g, 5);
  const auto sol = solve(in, 0.1, 0.1);
  CHECK(sol.gradient_norm <= 1e-8);
  try {
    (void)solve(in, 0, 0);
    FAIL("expected a singular system");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularSystem);
  }
}

TEST_CASE("rule-driven solve") {
  std::mt19937_64 g(7);
  const Instance in = random_instance(g, 2000);
  FinetuneConfig cfg;
  cfg.lambda_rule = LambdaRule::kPaperRule;
  cfg.sigma_for_rule = 0.01;
  cfg.sigma_x_min_eig = 1.0;
  const auto sol = solve_finetune(in.target, in.r1, in.mean, cfg);
  CHECK(sol.lambda1_used == doctest::Approx(0.01 / (std::sqrt(2000.0) - 0.01)));
  CHECK(sol.lambda2_used == sol.lambda1_used);
}

TEST_CASE("input errors") {
  std::mt19937_64 g(8);
  Instance in = random_instance(g, 20);
  CHECK_THROWS_AS(solve(in, -1, 0), Error);
  CHECK_THROWS_AS(solve(in, NAN, 0), Error);
  Instance bad = in;
  bad.mean = Vector::Zero(9);
  try {
    (void)solve(bad, 1, 1);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  bad = in;
  bad.r1 = testing::orthonormal(g, 9, 6);
  CHECK_THROWS_AS(solve(bad, 1, 1), Error);
}

TEST_CASE("baselines") {
  std::mt19937_64 g(9);
  const Instance in = random_instance(g, 40);
  SUBCASE("ridge matches an explicit solve and tends to OLS") {
    const auto r = solve_baseline(in.target, baseline::Ridge{0.5});
    const Matrix c = in.target.X.transpose() * in.target.X / 40.0 + 0.5 * Matrix::Identity(10, 10);
    const Vector ref = oracle::gauss_solve(c, in.target.X.transpose() * in.target.y / 40.0);
    CHECK((r.theta_hat - ref).norm() <= 1e-10 * (1 + ref.norm()));
    const auto tiny = solve_baseline(in.target, baseline::Ridge{1e-12});
    CHECK((tiny.theta_hat - fit_ols(in.target)).norm() <= 1e-6);
  }
  SUBCASE("single-regularizer variants") {
    const auto r1 = solve_baseline(in.target, baseline::Reg1Only{0.4, in.r1, in.mean});
    CHECK((r1.theta_hat - solve(in, 0.4, 0).theta_hat).norm() <= 1e-12);
    const auto r2 = solve_baseline(in.target, baseline::Reg2Only{0.4, in.r1});
    FinetuneConfig cfg;
    cfg.lambda2 = 0.4;
    CHECK((r2.theta_hat - solve_finetune(in.target, in.r1, Vector::Zero(10), cfg).theta_hat).norm() <= 1e-12);
    const auto ols = solve_baseline(in.target, baseline::Ols{});
    CHECK((ols.theta_hat - fit_ols(in.target)).norm() == 0.0);
  }
  SUBCASE("the joint minimizer beats both single-regularizer fits on the joint objective") {
    const Matrix p = projector(in.r1);
    const auto joint = solve(in, 0.4, 0.4);
    const auto a = solve_baseline(in.target, baseline::Reg1Only{0.4, in.r1, in.mean});
    const auto b = solve_baseline(in.target, baseline::Reg2Only{0.4, in.r1});
    const auto f = [&](const Vector& t) {
      return finetune_objective(in.target, p, in.mean, 0.4, 0.4, t);
    };
    CHECK(joint.objective_value <= std::min(f(a.theta_hat), f(b.theta_hat)) + 1e-15);
  }
}
