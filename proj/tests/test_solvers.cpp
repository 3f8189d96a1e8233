#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kornlab/analysis.hpp"
#include "kornlab/solvers.hpp"

using namespace kornlab;

TEST_CASE("conjugate gradients solve the 1D Dirichlet Laplacian") {
  // interval [0,1], 5 vertices, 3 free: the operator is tridiag(-1,2,-1)/h^2
  auto line = unit_domain(DomainKind::box, 1, 5);
  LinearOperator A = maxwell_form_operator(line, 0, BcMode::full_dirichlet);
  REQUIRE(A.dim == 3);
  std::vector<double> b{1.0, 1.0, 1.0};
  auto [x, rep] = cg_solve(A, b, 1e-14, 1000);
  CHECK(rep.converged);
  // continuum solution u = x(1-x)/2 is quadratic, so the scheme is exact
  const double h = line->h();
  CHECK(x[0] == Catch::Approx(0.25 * (1 - 0.25) / 2).epsilon(1e-12));
  CHECK(x[1] == Catch::Approx(0.50 * (1 - 0.50) / 2).epsilon(1e-12));
  CHECK(x[2] == Catch::Approx(0.75 * (1 - 0.75) / 2).epsilon(1e-12));
  std::vector<double> r(3);
  A.apply(x, r);
  for (int i = 0; i < 3; ++i) CHECK(r[static_cast<std::size_t>(i)] == Catch::Approx(1.0).epsilon(1e-10));
  (void)h;
}

TEST_CASE("smallest eigenvalue matches the closed form on the interval") {
  // Dirichlet eigenvalues of tridiag(-1,2,-1)/h^2 on k interior points:
  // lambda_j = (2 - 2 cos(j pi h)) / h^2
  auto line = unit_domain(DomainKind::box, 1, 5);
  LinearOperator A = maxwell_form_operator(line, 0, BcMode::full_dirichlet);
  EigenReport rep = smallest_eigenpairs(A, 2);
  REQUIRE(rep.converged);
  const double h = line->h();
  const double lam1 = (2.0 - 2.0 * std::cos(M_PI * h)) / (h * h); // 16 (2 - sqrt 2)
  const double lam2 = (2.0 - 2.0 * std::cos(2 * M_PI * h)) / (h * h);
  CHECK(rep.eigenvalues[0] == Catch::Approx(lam1).epsilon(1e-10));
  CHECK(rep.eigenvalues[1] == Catch::Approx(lam2).epsilon(1e-10));
  CHECK(rep.eigenvalues[0] == Catch::Approx(16.0 * (2.0 - std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("iterative eigenvalues are deterministic") {
  auto box = unit_domain(DomainKind::box, 2, 9);
  LinearOperator A = maxwell_form_operator(box, 0, BcMode::full_dirichlet);
  EigenReport a = smallest_eigenpairs(A, 3);
  EigenReport b = smallest_eigenpairs(A, 3);
  REQUIRE(a.eigenvalues.size() == b.eigenvalues.size());
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
    CHECK(a.eigenvalues[i] == b.eigenvalues[i]); // bitwise: fixed seed, fixed order
}

TEST_CASE("iterative and dense paths agree to tight relative error") {
  auto box = unit_domain(DomainKind::box, 2, 9);
  LinearOperator A = maxwell_form_operator(box, 1, BcMode::tangential);
  EigenReport it = smallest_eigenpairs(A, 4);
  EigenReport dn = dense_eigen_oracle(A);
  REQUIRE(it.converged);
  CHECK(dn.symmetry_defect <= 1e-12);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(it.eigenvalues[static_cast<std::size_t>(i)] -
                   dn.eigenvalues[static_cast<std::size_t>(i)])
          <= 1e-8 * std::max(1.0, std::abs(dn.eigenvalues[static_cast<std::size_t>(i)])));
}

TEST_CASE("deflation removes a known eigenvector from the search space") {
  auto line = unit_domain(DomainKind::box, 1, 9);
  LinearOperator A = maxwell_form_operator(line, 0, BcMode::full_dirichlet);
  EigenReport full = smallest_eigenpairs(A, 2);
  EigenReport defl = smallest_eigenpairs(A, 1, {full.eigenvectors[0]});
  CHECK(defl.eigenvalues[0] == Catch::Approx(full.eigenvalues[1]).epsilon(1e-8));
}

TEST_CASE("orthonormalize produces an orthonormal set and rejects rank deficiency") {
  std::vector<std::vector<double>> v{{1, 1, 0}, {1, 0, 1}};
  auto q = orthonormalize(v);
  REQUIRE(q.size() == 2);
  CHECK(std::abs(kahan_dot(q[0], q[0]) - 1.0) <= 1e-14);
  CHECK(std::abs(kahan_dot(q[1], q[1]) - 1.0) <= 1e-14);
  CHECK(std::abs(kahan_dot(q[0], q[1])) <= 1e-14);
  std::vector<std::vector<double>> dep{{1, 2, 3}, {2, 4, 6}};
  CHECK_THROWS_AS(orthonormalize(dep), DeflationError);
}

TEST_CASE("power iteration brackets the largest eigenvalue") {
  auto line = unit_domain(DomainKind::box, 1, 9);
  LinearOperator A = maxwell_form_operator(line, 0, BcMode::full_dirichlet);
  const double h = line->h();
  const double lam_max = (2.0 - 2.0 * std::cos(7 * M_PI * h)) / (h * h);
  const double est = power_lambda_max(A);
  CHECK(est <= lam_max * (1.0 + 1e-9));
  CHECK(est >= 0.9 * lam_max);
}

TEST_CASE("cg validates shapes and reports breakdown") {
  auto line = unit_domain(DomainKind::box, 1, 5);
  LinearOperator A = maxwell_form_operator(line, 0, BcMode::full_dirichlet);
  std::vector<double> wrong(5, 1.0);
  CHECK_THROWS_AS(cg_solve(A, wrong, 1e-10, 10), IncompatibleError);
  LinearOperator indefinite;
  indefinite.dim = 2;
  indefinite.name = "flip";
  indefinite.apply = [](const std::vector<double>& x, std::vector<double>& y) {
    y = {x[0], -x[1]};
  };
  std::vector<double> b{0.0, 1.0};
  CHECK_THROWS_AS(cg_solve(indefinite, b, 1e-12, 100), SolverError);
}

TEST_CASE("dense oracle refuses oversized systems") {
  LinearOperator big;
  big.dim = 4001;
  big.name = "too-big";
  big.apply = [](const std::vector<double>& x, std::vector<double>& y) { y = x; };
  CHECK_THROWS_AS(dense_eigen_oracle(big), DofLimitError);
}
