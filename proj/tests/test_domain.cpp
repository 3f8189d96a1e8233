#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "kornlab/domain.hpp"
#include "kornlab/multi_index.hpp"

using namespace kornlab;

TEST_CASE("unit box mask has the obvious counts") {
  auto box = unit_domain(DomainKind::box, 2, 17);
  CHECK(box->dim() == 2);
  CHECK(box->num_vertices() == 289);
  CHECK(box->inside_count() == 289);
  CHECK(box->interior_count() == 225); // 15 x 15 strongly interior vertices
  CHECK(box->boundary_count() == 64);
  CHECK(box->boundary_components() == 1);
  CHECK(box->h() == Catch::Approx(1.0 / 16).epsilon(1e-15));
}

TEST_CASE("vertex counts of the shipped masks are frozen") {
  auto disk = unit_domain(DomainKind::ball, 2, 17);
  CHECK(disk->inside_count() == 197);
  CHECK(disk->boundary_components() == 1);

  auto annulus = unit_domain(DomainKind::annulus, 2, 17);
  CHECK(annulus->inside_count() == 152);
  CHECK(annulus->interior_count() == 60);
  CHECK(annulus->boundary_components() == 2);

  auto ball = unit_domain(DomainKind::ball, 3, 9);
  CHECK(ball->inside_count() == 257);
  CHECK(ball->boundary_components() == 1);

  auto shell = unit_domain(DomainKind::shell, 3, 17);
  CHECK(shell->inside_count() == 1858);
  CHECK(shell->interior_count() == 504);
  CHECK(shell->boundary_components() == 2);

  auto torus = unit_domain(DomainKind::solid_torus, 3, 17);
  CHECK(torus->inside_count() == 556);
  CHECK(torus->interior_count() == 60);
  CHECK(torus->boundary_components() == 1);
}

TEST_CASE("degenerate and invalid masks are refused") {
  CHECK_THROWS_AS(unit_domain(DomainKind::box, 2, 2), DomainError);
  CHECK_THROWS_AS(unit_domain(DomainKind::box, 0, 9), DomainError);
  CHECK_THROWS_AS(unit_domain(DomainKind::box, 6, 9), DomainError);
  // an 11^3 shell is too thin to contain a strongly interior vertex
  CHECK_THROWS_AS(unit_domain(DomainKind::shell, 3, 11), DomainError);
}

TEST_CASE("labels partition the vertices") {
  auto disk = unit_domain(DomainKind::ball, 2, 17);
  std::size_t interior = 0, boundary = 0, exterior = 0;
  for (std::size_t v = 0; v < disk->num_vertices(); ++v) {
    switch (disk->label(v)) {
      case VertexLabel::interior: ++interior; break;
      case VertexLabel::boundary: ++boundary; break;
      case VertexLabel::exterior: ++exterior; break;
    }
    CHECK(disk->is_inside(v) == (disk->label(v) != VertexLabel::exterior));
    CHECK(disk->is_interior(v) == (disk->label(v) == VertexLabel::interior));
  }
  CHECK(interior == disk->interior_count());
  CHECK(boundary == disk->boundary_count());
  CHECK(interior + boundary == disk->inside_count());
  CHECK(exterior == disk->num_vertices() - disk->inside_count());
  // the corner of the bounding box is outside the disk, its center is interior
  CHECK(disk->label(0) == VertexLabel::exterior);
  std::vector<int> mid{8, 8};
  CHECK(disk->label(disk->flat_index(mid)) == VertexLabel::interior);
}

TEST_CASE("coordinates and flat indices are inverse bijections") {
  auto torus = unit_domain(DomainKind::solid_torus, 3, 13);
  std::vector<int> coord(3);
  for (std::size_t v = 0; v < torus->num_vertices(); ++v) {
    torus->coordinates(v, coord);
    CHECK(torus->flat_index(coord) == v);
  }
}

TEST_CASE("strongly interior vertices have every cell free") {
  auto annulus = unit_domain(DomainKind::annulus, 2, 17);
  const std::uint32_t full = (1u << 2) - 1u;
  for (std::size_t v = 0; v < annulus->num_vertices(); ++v) {
    if (!annulus->is_interior(v)) continue;
    for (std::uint32_t m = 0; m <= full; ++m) CHECK(annulus->cell_free(v, m));
  }
}

TEST_CASE("free cells are closed under taking cofaces") {
  // If the cell spanned from v along the axes of A is free, both cofaces
  // along any further axis b are free as well: (v, A+b) and (v - e_b, A+b).
  // This is what makes the constrained forward-difference operators an exact
  // complex (the derivative of a free degree of freedom never writes into a
  // constrained one).
  for (auto kind : {DomainKind::annulus, DomainKind::solid_torus}) {
    const int N = kind == DomainKind::annulus ? 2 : 3;
    auto mask = unit_domain(kind, N, 17);
    const std::uint32_t full = (1u << N) - 1u;
    std::vector<int> coord(static_cast<std::size_t>(N));
    for (std::size_t v = 0; v < mask->num_vertices(); ++v) {
      if (!mask->is_inside(v)) continue;
      mask->coordinates(v, coord);
      for (std::uint32_t A = 0; A <= full; ++A) {
        if (!mask->cell_free(v, A)) continue;
        for (int b = 0; b < N; ++b) {
          if (A & (1u << b)) continue;
          const std::uint32_t Ab = A | (1u << b);
          CHECK(mask->cell_free(v, Ab));
          if (coord[static_cast<std::size_t>(b)] > 0) {
            const std::size_t w = v - static_cast<std::size_t>(mask->stride(b));
            if (mask->is_inside(w)) CHECK(mask->cell_free(w, Ab));
          }
        }
      }
    }
  }
}

TEST_CASE("free tangential degrees of freedom on the unit square are frozen") {
  auto box = unit_domain(DomainKind::box, 2, 17);
  const auto& masks = component_axis_masks(2, 1);
  std::size_t free = 0;
  for (std::size_t v = 0; v < box->num_vertices(); ++v)
    for (std::uint32_t m : masks)
      if (box->is_inside(v) && (box->is_interior(v) || box->cell_free(v, m))) ++free;
  // counted once, frozen: tangential 1-form space on the 17^2 square
  CHECK(free == 480);
}

TEST_CASE("structural layout equality ignores pointer identity") {
  auto a = unit_domain(DomainKind::annulus, 2, 17);
  auto b = unit_domain(DomainKind::annulus, 2, 17);
  CHECK(a.get() != b.get());
  CHECK(a->same_layout(*b));
  CHECK_FALSE(a->same_layout(*unit_domain(DomainKind::box, 2, 17)));
  CHECK_FALSE(a->same_layout(*unit_domain(DomainKind::annulus, 2, 33)));
  DomainGeometry g;
  g.inner_radius = 0.3;
  auto c = make_domain(DomainKind::annulus, g, {17, 17}, 1.0 / 16);
  CHECK_FALSE(a->same_layout(*c));
}

TEST_CASE("domain kinds parse and print") {
  CHECK(parse_domain_kind("box") == DomainKind::box);
  CHECK(parse_domain_kind("solid_torus") == DomainKind::solid_torus);
  CHECK_THROWS_AS(parse_domain_kind("klein_bottle"), ConfigError);
  auto shell = unit_domain(DomainKind::shell, 3, 17);
  CHECK(shell->descriptor().find("shell") != std::string::npos);
}
