#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "kornlab/diff_ops.hpp"

using namespace kornlab;

namespace {

FormField random_form(const MaskPtr& mask, int q, BcMode bc, std::uint64_t seed) {
  FormField E(mask, q, bc);
  E.fill_random(seed);
  return E;
}

} // namespace

TEST_CASE("the gradient of an affine function is exact") {
  auto box = unit_domain(DomainKind::box, 2, 9); // h = 1/8
  const double h = box->h();
  FormField u(box, 0, BcMode::none);
  std::vector<int> c(2);
  for (std::size_t v = 0; v < box->num_vertices(); ++v) {
    box->coordinates(v, c);
    u.comp(0)[v] = 3.0 + 2.0 * (c[0] * h) - 5.0 * (c[1] * h);
  }
  FormField g = grad(u);
  for (std::size_t v = 0; v < box->num_vertices(); ++v) {
    box->coordinates(v, c);
    if (c[0] + 1 < 9 && c[1] + 1 < 9) { // forward stencils stay on the grid
      CHECK(g.comp(0)[v] == Catch::Approx(2.0).epsilon(1e-12));
      CHECK(g.comp(1)[v] == Catch::Approx(-5.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("3D curl components carry the hand-checked signs") {
  auto box = unit_domain(DomainKind::box, 3, 5); // h = 1/4
  const double h = box->h();
  // E = (y, 0, 0): curl E = (0, 0, -1); as a 2-form, (dE)_{12} = -1 is the
  // only nonzero component
  FormField E(box, 1, BcMode::none);
  std::vector<int> c(3);
  for (std::size_t v = 0; v < box->num_vertices(); ++v) {
    box->coordinates(v, c);
    E.comp(0)[v] = c[1] * h;
  }
  FormField dE = exterior_derivative(E);
  REQUIRE(dE.components() == 3); // {1,2}, {1,3}, {2,3}
  for (std::size_t v = 0; v < box->num_vertices(); ++v) {
    box->coordinates(v, c);
    if (c[0] + 1 < 5 && c[1] + 1 < 5 && c[2] + 1 < 5) {
      CHECK(dE.comp(0)[v] == Catch::Approx(-1.0).epsilon(1e-12)); // D1 E2 - D2 E1
      CHECK(dE.comp(1)[v] == Catch::Approx(0.0).margin(1e-12));
      CHECK(dE.comp(2)[v] == Catch::Approx(0.0).margin(1e-12));
    }
  }
}

TEST_CASE("d after d vanishes at roundoff scale") {
  struct Case {
    DomainKind kind;
    int N, res, q;
    BcMode bc;
  };
  const Case cases[] = {
      {DomainKind::box, 2, 17, 0, BcMode::none},
      {DomainKind::box, 3, 9, 0, BcMode::none},
      {DomainKind::box, 3, 9, 1, BcMode::none},
      {DomainKind::box, 4, 7, 1, BcMode::none},
      {DomainKind::box, 4, 7, 2, BcMode::none},
      {DomainKind::annulus, 2, 17, 0, BcMode::full_dirichlet},
      {DomainKind::solid_torus, 3, 13, 1, BcMode::full_dirichlet},
  };
  for (const auto& tc : cases) {
    auto mask = unit_domain(tc.kind, tc.N, tc.res);
    FormField E = random_form(mask, tc.q, tc.bc, 21);
    FormField dd = exterior_derivative(exterior_derivative(E));
    const double bound = 1e-13 * norm(E) / (mask->h() * mask->h());
    INFO("kind=" << to_string(tc.kind) << " N=" << tc.N << " q=" << tc.q);
    CHECK(norm(dd) <= bound);
  }
}

TEST_CASE("delta after delta vanishes at roundoff scale") {
  auto box = unit_domain(DomainKind::box, 3, 9);
  FormField H = random_form(box, 3, BcMode::none, 8);
  FormField deldel = coderivative(coderivative(H));
  CHECK(norm(deldel) <= 1e-13 * norm(H) / (box->h() * box->h()));
}

TEST_CASE("coderivative is the exact negative adjoint of the derivative") {
  struct Case {
    DomainKind kind;
    int N, res, q;
  };
  const Case cases[] = {
      {DomainKind::box, 2, 17, 0},      {DomainKind::box, 2, 17, 1},
      {DomainKind::box, 3, 9, 1},       {DomainKind::box, 4, 7, 2},
      {DomainKind::annulus, 2, 17, 0},  {DomainKind::ball, 3, 9, 1},
      {DomainKind::shell, 3, 17, 1},
  };
  for (const auto& tc : cases) {
    auto mask = unit_domain(tc.kind, tc.N, tc.res);
    FormField E = random_form(mask, tc.q, BcMode::none, 31);
    FormField H = random_form(mask, tc.q + 1, BcMode::none, 32);
    const double lhs = inner_product(exterior_derivative(E), H);
    const double rhs = -inner_product(E, coderivative(H));
    INFO("kind=" << to_string(tc.kind) << " N=" << tc.N << " q=" << tc.q);
    CHECK(std::abs(lhs - rhs) <= 1e-13 * norm(E) * norm(H) / mask->h());
  }
}

TEST_CASE("row-wise curl of a gradient vanishes") {
  for (int N : {2, 3}) {
    auto mask = unit_domain(DomainKind::box, N, N == 2 ? 17 : 9);
    VectorField v(mask, BcMode::full_dirichlet);
    for (int n = 0; n < N; ++n)
      v.comp[static_cast<std::size_t>(n)].fill_random(40 + static_cast<std::uint64_t>(n));
    TensorField G = Grad(v);
    CurlField C = Curl(G);
    CHECK(norm(C) <= 1e-13 * norm(G) / mask->h());
  }
}

TEST_CASE("Div is the negative adjoint of Grad") {
  auto disk = unit_domain(DomainKind::ball, 2, 17);
  VectorField v(disk, BcMode::full_dirichlet);
  v.comp[0].fill_random(1);
  v.comp[1].fill_random(2);
  TensorField T = random_tensor(disk, BcMode::none, 3);
  const double lhs = inner_product(Grad(v), T);
  VectorField DivT = Div(T);
  const double rhs = -inner_product(v, DivT);
  CHECK(std::abs(lhs - rhs) <= 1e-13 * norm(Grad(v)) * norm(T) / disk->h());
}

TEST_CASE("operator descriptors expose the component shapes") {
  OperatorDescriptor c3 = describe_operator("curl", 3);
  CHECK(c3.input_components == 3);
  CHECK(c3.output_components == 3);
  OperatorDescriptor c4 = describe_operator("curl", 4);
  CHECK(c4.output_components == 6);
  CHECK_THROWS_AS(describe_operator("laplace_beltrami", 3), IncompatibleError);
}
