#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "kornlab/errors.hpp"

/// Cubical domain masks.  A mask classifies every vertex of an axis-aligned
/// bounding box as exterior, boundary, or interior:
///   inside   = the shape predicate holds at the vertex,
///   boundary = inside with at least one axis neighbor outside
///              (neighbors beyond the bounding box count as outside),
///   interior = inside with all 2N axis neighbors inside.
/// Curved shapes are deliberately represented by their staircase masks.

namespace kornlab {

enum class DomainKind { box, ball, annulus, shell, solid_torus };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::box: return "box";
    case DomainKind::ball: return "ball";
    case DomainKind::annulus: return "annulus";
    case DomainKind::shell: return "shell";
    case DomainKind::solid_torus: return "solid_torus";
  }
  return "?";
}

/// Geometry parameters; only the fields relevant to the kind are read.
/// An empty center means the midpoint of the bounding box.
struct DomainGeometry {
  std::vector<double> center; ///< defaults to box midpoint
  double radius = 0.5;        ///< ball
  double inner_radius = 0.25; ///< annulus / shell
  double outer_radius = 0.5;  ///< annulus / shell
  double ring_radius = 0.3;   ///< solid_torus: radius of the center circle
  double tube_radius = 0.15;  ///< solid_torus: radius of the tube
};

enum class VertexLabel : std::uint8_t { exterior = 0, boundary = 1, interior = 2 };

class DomainMask {
public:
  DomainMask(DomainKind kind, DomainGeometry geometry, std::vector<int> shape, double h)
      : kind_(kind), geometry_(std::move(geometry)), shape_(std::move(shape)), h_(h) {
    validate_box();
    build();
  }

  int dim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  double h() const { return h_; }
  DomainKind kind() const { return kind_; }
  const DomainGeometry& geometry() const { return geometry_; }

  std::size_t num_vertices() const { return labels_.size(); }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  VertexLabel label(std::size_t v) const { return labels_[v]; }
  bool is_inside(std::size_t v) const { return labels_[v] != VertexLabel::exterior; }
  /// Interior = the closed unit neighborhood (all 3^N-1 surrounding vertices)
  /// lies inside; equivalently every voxel touching the vertex is occupied.
  bool is_interior(std::size_t v) const { return labels_[v] == VertexLabel::interior; }
  bool is_boundary(std::size_t v) const { return labels_[v] == VertexLabel::boundary; }

  /// Axes (bit a-1 for axis a) along which this boundary vertex is missing an
  /// inside neighbor in at least one direction; zero away from the boundary.
  /// Note a staircase vertex can be boundary with no missing axis neighbor
  /// (only a diagonal one).
  std::uint32_t missing_axes(std::size_t v) const { return missing_[v]; }

  /// True iff the cubical cell based at vertex v and spanned along the axes
  /// of `axes` (a bitmask) is free: every voxel containing it is occupied,
  /// so the cell does not touch the complement of the region.  Bit 0 of
  /// `axes` is axis 0.  This is the constraint stencil for tangential
  /// boundary conditions; see build().
  bool cell_free(std::size_t v, std::uint32_t axes) const {
    return (free_cells_[v] >> axes) & 1u;
  }

  std::size_t interior_count() const { return interior_count_; }
  std::size_t boundary_count() const { return boundary_count_; }
  std::size_t inside_count() const { return interior_count_ + boundary_count_; }

  /// Number of connected components of the region's topological boundary
  /// (1 for the outer surface plus 1 per sealed cavity), computed from the
  /// complement of the occupied voxel complex.
  int boundary_components() const { return boundary_components_; }

  /// Whether the unit voxel based at vertex v (all 2^N corners inside) is
  /// part of the occupied complex.  False when the voxel would stick out of
  /// the bounding grid.
  bool voxel_occupied(std::size_t v) const { return voxel_[v] != 0; }

  std::size_t flat_index(const std::vector<int>& coord) const {
    std::size_t v = 0;
    for (int a = 0; a < dim(); ++a) v += static_cast<std::size_t>(coord[a]) * strides_[a];
    return v;
  }

  void coordinates(std::size_t v, std::vector<int>& coord) const {
    coord.resize(shape_.size());
    for (int a = 0; a < dim(); ++a)
      coord[a] = static_cast<int>((v / strides_[a]) % static_cast<std::size_t>(shape_[a]));
  }

  std::string descriptor() const {
    std::string s = to_string(kind_);
    s += " N=" + std::to_string(dim()) + " shape=";
    for (int a = 0; a < dim(); ++a) s += (a ? "x" : "") + std::to_string(shape_[a]);
    return s;
  }

  /// Same grid and shape parameters, hence identical classification.  Used
  /// to let fields loaded from snapshots interoperate with freshly built
  /// masks (pointer identity is sufficient but not necessary).
  bool same_layout(const DomainMask& o) const {
    return kind_ == o.kind_ && shape_ == o.shape_ && h_ == o.h_ &&
           geometry_.center == o.geometry_.center && geometry_.radius == o.geometry_.radius &&
           geometry_.inner_radius == o.geometry_.inner_radius &&
           geometry_.outer_radius == o.geometry_.outer_radius &&
           geometry_.ring_radius == o.geometry_.ring_radius &&
           geometry_.tube_radius == o.geometry_.tube_radius;
  }

private:
  void validate_box() {
    const int N = dim();
    if (N < 1 || N > 5) throw DomainError("DomainMask: dimension must be in [1,5]");
    for (int s : shape_)
      if (s < 3) throw DomainError("DomainMask: need at least 3 vertices per axis");
    if (!(h_ > 0.0)) throw DomainError("DomainMask: spacing h must be positive");
    if (kind_ == DomainKind::annulus && N != 2)
      throw DomainError("annulus requires N=2");
    if ((kind_ == DomainKind::shell || kind_ == DomainKind::solid_torus) && N != 3)
      throw DomainError(std::string(to_string(kind_)) + " requires N=3");
    if (kind_ == DomainKind::annulus || kind_ == DomainKind::shell) {
      if (!(geometry_.inner_radius > 0.0) || !(geometry_.inner_radius < geometry_.outer_radius))
        throw DomainError("annulus/shell requires 0 < inner_radius < outer_radius");
    }
    if (kind_ == DomainKind::solid_torus) {
      if (!(geometry_.tube_radius > 0.0) || !(geometry_.tube_radius < geometry_.ring_radius))
        throw DomainError("solid_torus requires 0 < tube_radius < ring_radius");
    }
    if (geometry_.center.empty()) {
      geometry_.center.resize(static_cast<std::size_t>(N));
      for (int a = 0; a < N; ++a) geometry_.center[static_cast<std::size_t>(a)] = 0.5 * h_ * (shape_[a] - 1);
    }
    if (static_cast<int>(geometry_.center.size()) != N)
      throw DomainError("DomainMask: center dimension mismatch");
  }

  bool shape_contains(const std::vector<int>& coord) const {
    const int N = dim();
    std::vector<double> x(static_cast<std::size_t>(N));
    for (int a = 0; a < N; ++a)
      x[static_cast<std::size_t>(a)] = h_ * coord[a] - geometry_.center[static_cast<std::size_t>(a)];
    switch (kind_) {
      case DomainKind::box:
        return true;
      case DomainKind::ball: {
        double r2 = 0;
        for (double c : x) r2 += c * c;
        return r2 <= geometry_.radius * geometry_.radius;
      }
      case DomainKind::annulus:
      case DomainKind::shell: {
        double r2 = 0;
        for (double c : x) r2 += c * c;
        return r2 >= geometry_.inner_radius * geometry_.inner_radius &&
               r2 <= geometry_.outer_radius * geometry_.outer_radius;
      }
      case DomainKind::solid_torus: {
        const double rho = std::sqrt(x[0] * x[0] + x[1] * x[1]) - geometry_.ring_radius;
        return rho * rho + x[2] * x[2] <= geometry_.tube_radius * geometry_.tube_radius;
      }
    }
    return false;
  }

  void build() {
    const int N = dim();
    std::size_t nv = 1;
    strides_.assign(static_cast<std::size_t>(N), 0);
    for (int a = N - 1; a >= 0; --a) {
      strides_[static_cast<std::size_t>(a)] = nv;
      nv *= static_cast<std::size_t>(shape_[a]);
    }
    labels_.assign(nv, VertexLabel::exterior);
    missing_.assign(nv, 0);

    std::vector<std::uint8_t> inside(nv, 0);
    std::vector<int> coord(static_cast<std::size_t>(N), 0);
    for (std::size_t v = 0; v < nv; ++v) {
      if (shape_contains(coord)) inside[v] = 1;
      // odometer increment, last axis fastest (row-major)
      for (int a = N - 1; a >= 0; --a) {
        if (++coord[static_cast<std::size_t>(a)] < shape_[a]) break;
        coord[static_cast<std::size_t>(a)] = 0;
      }
    }

    // Grid cells.  The component of a q-field indexed by axis set A and
    // based at vertex v is identified with the cubical q-cell spanned by v
    // along the axes of A (the forward-difference stencil of d reads along
    // exactly those axes).  A unit voxel belongs to the occupied complex
    // iff all 2^N of its corners are inside; a q-cell is *free* iff every
    // voxel containing it is occupied, i.e. the cell does not touch the
    // complement.  Free cells form a sub-complex closed under taking
    // cofaces, so forward differences of a free-supported field are again
    // free-supported and the constrained spaces form an exact complex;
    // the kernel of the associated quadratic form then recovers the
    // topology of the occupied region exactly (one harmonic field per
    // independent cycle/cavity, with machine-zero eigenvalues).
    const std::uint32_t full = (1u << N) - 1u;
    voxel_.assign(nv, 0);
    std::fill(coord.begin(), coord.end(), 0);
    for (std::size_t v = 0; v < nv; ++v) {
      bool fits = true;
      for (int a = 0; a < N && fits; ++a)
        if (coord[static_cast<std::size_t>(a)] + 1 >= shape_[a]) fits = false;
      if (fits) {
        bool occ = true;
        for (std::uint32_t corners = 0; corners <= full && occ; ++corners) {
          std::size_t w = v;
          for (int a = 0; a < N; ++a)
            if (corners & (1u << a)) w += strides_[static_cast<std::size_t>(a)];
          if (!inside[w]) occ = false;
        }
        voxel_[v] = occ ? 1 : 0;
      }
      for (int a = N - 1; a >= 0; --a) {
        if (++coord[static_cast<std::size_t>(a)] < shape_[a]) break;
        coord[static_cast<std::size_t>(a)] = 0;
      }
    }

    // For each inside vertex, record which axis sets span free cells.  The
    // voxels containing cell (v, A) are based at v - sum_{b in S} e_b over
    // subsets S of the complement of A, so the A = empty-set test (all 2^N
    // voxels around v occupied) dominates every other one.
    free_cells_.assign(nv, 0);
    interior_count_ = boundary_count_ = 0;
    std::fill(coord.begin(), coord.end(), 0);
    for (std::size_t v = 0; v < nv; ++v) {
      if (inside[v]) {
        const auto base_ok = [&](std::uint32_t S) {
          std::size_t w = v;
          for (int b = 0; b < N; ++b)
            if (S & (1u << b)) {
              if (coord[static_cast<std::size_t>(b)] < 1) return false;
              w -= strides_[static_cast<std::size_t>(b)];
            }
          return voxel_[w] != 0;
        };
        std::uint64_t cells = 0;
        bool deep = true;
        for (std::uint32_t S = full;; S = (S - 1) & full) {
          if (!base_ok(S)) { deep = false; break; }
          if (S == 0) break;
        }
        if (deep) {
          cells = (full == 31u) ? ~std::uint64_t{0} >> 32 : (std::uint64_t{1} << (full + 1)) - 1;
        } else {
          for (std::uint32_t A = 1; A <= full; ++A) {
            const std::uint32_t comp = full & ~A;
            bool free_cell = true;
            for (std::uint32_t S = comp;; S = (S - 1) & comp) {
              if (!base_ok(S)) { free_cell = false; break; }
              if (S == 0) break;
            }
            if (free_cell) cells |= std::uint64_t{1} << A;
          }
        }
        free_cells_[v] = cells;

        std::uint32_t miss = 0;
        for (int a = 0; a < N; ++a) {
          const bool up_in = coord[static_cast<std::size_t>(a)] + 1 < shape_[a] && inside[v + strides_[static_cast<std::size_t>(a)]];
          const bool dn_in = coord[static_cast<std::size_t>(a)] > 0 && inside[v - strides_[static_cast<std::size_t>(a)]];
          if (!up_in || !dn_in) miss |= (1u << a);
        }
        missing_[v] = miss;
        if (cells & 1u) {
          labels_[v] = VertexLabel::interior;
          ++interior_count_;
        } else {
          labels_[v] = VertexLabel::boundary;
          ++boundary_count_;
        }
      }
      for (int a = N - 1; a >= 0; --a) {
        if (++coord[static_cast<std::size_t>(a)] < shape_[a]) break;
        coord[static_cast<std::size_t>(a)] = 0;
      }
    }

    if (inside_count() == 0) throw DomainError("DomainMask: empty mask (no inside vertices)");
    if (interior_count_ == 0)
      throw DomainError("DomainMask: degenerate mask (no interior vertices at this resolution)");

    boundary_components_ = count_boundary_components();
  }

  /// Connected components of the region's topological boundary, counted
  /// through the complement: one component for the surrounding sea plus one
  /// per sealed cavity.  A cavity is a face-connected component of
  /// unoccupied voxels that never reaches the grid margin.  Counting
  /// complement components (instead of walking boundary vertices, whose
  /// staircase rims can touch diagonally without the surfaces touching)
  /// agrees with the occupied complex's actual topology at every
  /// resolution: a cavity that leaks through a porous staircase wall is
  /// correctly absorbed into the sea.
  int count_boundary_components() const {
    const int N = dim();
    std::vector<int> vshape(static_cast<std::size_t>(N));
    std::size_t nvox = 1;
    for (int a = 0; a < N; ++a) {
      vshape[static_cast<std::size_t>(a)] = shape_[a] - 1;
      nvox *= static_cast<std::size_t>(vshape[static_cast<std::size_t>(a)]);
    }
    std::vector<std::uint8_t> seen(num_vertices(), 0);
    std::vector<int> coord, ncoord(static_cast<std::size_t>(N));
    int cavities = 0;
    std::vector<int> vc(static_cast<std::size_t>(N), 0);
    for (std::size_t i = 0; i < nvox; ++i) {
      const std::size_t start = flat_index(vc);
      if (!voxel_[start] && !seen[start]) {
        bool touches_margin = false;
        std::deque<std::size_t> queue{start};
        seen[start] = 1;
        while (!queue.empty()) {
          const std::size_t v = queue.front();
          queue.pop_front();
          coordinates(v, coord);
          for (int a = 0; a < N; ++a) {
            if (coord[static_cast<std::size_t>(a)] == 0 ||
                coord[static_cast<std::size_t>(a)] == vshape[static_cast<std::size_t>(a)] - 1)
              touches_margin = true;
            for (int s = -1; s <= 1; s += 2) {
              const int c = coord[static_cast<std::size_t>(a)] + s;
              if (c < 0 || c >= vshape[static_cast<std::size_t>(a)]) continue;
              const std::size_t w = (s > 0) ? v + strides_[static_cast<std::size_t>(a)]
                                            : v - strides_[static_cast<std::size_t>(a)];
              if (!voxel_[w] && !seen[w]) { seen[w] = 1; queue.push_back(w); }
            }
          }
        }
        if (!touches_margin) ++cavities;
      }
      for (int a = N - 1; a >= 0; --a) {
        if (++vc[static_cast<std::size_t>(a)] < vshape[static_cast<std::size_t>(a)]) break;
        vc[static_cast<std::size_t>(a)] = 0;
      }
    }
    return 1 + cavities;
  }

  DomainKind kind_;
  DomainGeometry geometry_;
  std::vector<int> shape_;
  double h_;
  std::vector<std::size_t> strides_;
  std::vector<VertexLabel> labels_;
  std::vector<std::uint32_t> missing_;
  std::vector<std::uint8_t> voxel_;
  std::vector<std::uint64_t> free_cells_;
  std::size_t interior_count_ = 0;
  std::size_t boundary_count_ = 0;
  int boundary_components_ = 0;
};

using MaskPtr = std::shared_ptr<const DomainMask>;

inline MaskPtr make_domain(DomainKind kind, const DomainGeometry& geometry,
                           const std::vector<int>& resolution, double h) {
  return std::make_shared<const DomainMask>(kind, geometry, resolution, h);
}

/// Mask over the unit box [0,1]^N with `resolution` vertices per axis and the
/// default geometry for the kind (shapes centered at the box midpoint).
inline MaskPtr unit_domain(DomainKind kind, int N, int resolution) {
  if (resolution < 3) throw DomainError("unit_domain: resolution must be >= 3");
  const double h = 1.0 / (resolution - 1);
  return make_domain(kind, DomainGeometry{}, std::vector<int>(static_cast<std::size_t>(N), resolution), h);
}

inline DomainKind parse_domain_kind(const std::string& s) {
  if (s == "box") return DomainKind::box;
  if (s == "ball") return DomainKind::ball;
  if (s == "annulus") return DomainKind::annulus;
  if (s == "shell") return DomainKind::shell;
  if (s == "solid_torus") return DomainKind::solid_torus;
  throw ConfigError("unknown domain kind: " + s);
}

} // namespace kornlab
