#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kornlab/domain.hpp"
#include "kornlab/multi_index.hpp"
#include "kornlab/numerics.hpp"

/// Collocated fields.  A q-form is stored as C(N,q) scalar grids over the
/// full bounding box with hard zeros at exterior vertices, so summation by
/// parts against the whole lattice is exact and the d/delta duality holds to
/// machine precision.  Boundary conditions are coordinate constraints:
///   none            free at every inside vertex,
///   full_dirichlet  free at interior vertices only (closed unit
///                   neighborhood inside),
///   tangential      a component is free iff its cubical cell is free, i.e.
///                   the cell based at the vertex and spanned along the
///                   component's axes touches no unoccupied voxel
///                   (DomainMask::cell_free).
/// The tangential rule renders a vanishing tangential trace.  On a box face
/// with normal e_j only components containing j survive (the cells of the
/// other components lie flat inside the face), matching the classical
/// condition that tangential components vanish while normal ones stay free;
/// at edges, corners and staircase steps every adjacent face imposes its
/// constraint.  Because free cells are closed under taking cofaces, forward
/// differences map the tangential space into itself, the constrained spaces
/// form an exact complex, and the zero modes of the mixed quadratic form
/// count the cycles/cavities of the region exactly.  Per-vertex rules
/// (constraining by the missing-axis set alone) fail this: they either
/// leave a spurious zero-energy mode at each corner or sever the genuine
/// topological modes on staircase boundaries.

namespace kornlab {

enum class BcMode { none, full_dirichlet, tangential };

inline const char* to_string(BcMode m) {
  switch (m) {
    case BcMode::none: return "none";
    case BcMode::full_dirichlet: return "full_dirichlet";
    case BcMode::tangential: return "tangential";
  }
  return "?";
}

inline BcMode parse_bc_mode(const std::string& s) {
  if (s == "none") return BcMode::none;
  if (s == "full" || s == "full_dirichlet") return BcMode::full_dirichlet;
  if (s == "tangential") return BcMode::tangential;
  throw ConfigError("unknown bc mode: " + s);
}

/// Whether the stored degree of freedom (component with axis bitmask
/// `axis_mask`, vertex v) is free under `mode` on `mask`.
inline bool dof_is_free(const DomainMask& mask, std::uint32_t axis_mask, std::size_t v, BcMode mode) {
  switch (mask.label(v)) {
    case VertexLabel::exterior: return false;
    case VertexLabel::interior: return true;
    case VertexLabel::boundary:
      switch (mode) {
        case BcMode::none: return true;
        case BcMode::full_dirichlet: return false;
        case BcMode::tangential: return mask.cell_free(v, axis_mask);
      }
  }
  return false;
}

class FormField {
public:
  FormField(MaskPtr mask, int q, BcMode bc = BcMode::none)
      : mask_(std::move(mask)), q_(q), bc_(bc) {
    detail::check_degree(mask_->dim(), q_, 0, mask_->dim(), "FormField");
    comp_.assign(static_cast<std::size_t>(num_components(mask_->dim(), q_)),
                 std::vector<double>(mask_->num_vertices(), 0.0));
  }

  const MaskPtr& mask_ptr() const { return mask_; }
  const DomainMask& mask() const { return *mask_; }
  int degree() const { return q_; }
  BcMode bc_mode() const { return bc_; }
  void set_bc_mode(BcMode m) { bc_ = m; }
  int components() const { return static_cast<int>(comp_.size()); }

  std::vector<double>& comp(int c) { return comp_[static_cast<std::size_t>(c)]; }
  const std::vector<double>& comp(int c) const { return comp_[static_cast<std::size_t>(c)]; }

  double& at(int c, std::size_t v) { return comp_[static_cast<std::size_t>(c)][v]; }
  double at(int c, std::size_t v) const { return comp_[static_cast<std::size_t>(c)][v]; }

  /// Zero every entry that is not free under this field's bc mode (exterior
  /// entries are always zeroed).  Idempotent.
  void constrain() {
    const auto& masks = component_axis_masks(mask_->dim(), q_);
    for (int c = 0; c < components(); ++c) {
      auto& g = comp_[static_cast<std::size_t>(c)];
      for (std::size_t v = 0; v < g.size(); ++v)
        if (!dof_is_free(*mask_, masks[static_cast<std::size_t>(c)], v, bc_)) g[v] = 0.0;
    }
  }

  void set_zero() {
    for (auto& g : comp_) std::fill(g.begin(), g.end(), 0.0);
  }

  /// Deterministic fill: i.i.d. uniform [-1,1] on free DOFs, zero elsewhere.
  /// Draw order is fixed (components in lexicographic order, vertices
  /// row-major), so repeated calls with equal arguments are bit-identical.
  void fill_random(std::uint64_t seed) {
    UniformStream rng(seed);
    const auto& masks = component_axis_masks(mask_->dim(), q_);
    for (int c = 0; c < components(); ++c) {
      auto& g = comp_[static_cast<std::size_t>(c)];
      for (std::size_t v = 0; v < g.size(); ++v)
        g[v] = dof_is_free(*mask_, masks[static_cast<std::size_t>(c)], v, bc_) ? rng.next() : 0.0;
    }
  }

private:
  MaskPtr mask_;
  int q_;
  BcMode bc_;
  std::vector<std::vector<double>> comp_;
};

inline void require_compatible(const FormField& a, const FormField& b, const char* who) {
  if (a.mask_ptr().get() != b.mask_ptr().get() && !a.mask().same_layout(b.mask()))
    throw IncompatibleError(std::string(who) + ": fields live on different masks");
  if (a.degree() != b.degree())
    throw IncompatibleError(std::string(who) + ": degree mismatch");
}

/// L2 pairing <E,H> = h^N * sum over components and vertices.  Kahan
/// compensated, fixed order, hence deterministic and accurate to a few ulp.
inline double inner_product(const FormField& a, const FormField& b) {
  require_compatible(a, b, "inner_product");
  KahanAccumulator acc;
  for (int c = 0; c < a.components(); ++c) {
    const auto& ga = a.comp(c);
    const auto& gb = b.comp(c);
    for (std::size_t v = 0; v < ga.size(); ++v) acc.add(ga[v] * gb[v]);
  }
  double hn = 1.0;
  for (int i = 0; i < a.mask().dim(); ++i) hn *= a.mask().h();
  return hn * acc.value();
}

inline double norm(const FormField& a) { return std::sqrt(inner_product(a, a)); }

inline FormField random_field(const MaskPtr& mask, int q, BcMode mode, std::uint64_t seed) {
  FormField f(mask, q, mode);
  f.fill_random(seed);
  return f;
}

inline void axpy(double alpha, const FormField& x, FormField& y) {
  require_compatible(x, y, "axpy");
  for (int c = 0; c < x.components(); ++c) {
    const auto& gx = x.comp(c);
    auto& gy = y.comp(c);
    for (std::size_t v = 0; v < gx.size(); ++v) gy[v] += alpha * gx[v];
  }
}

/// N-tuple of 0-forms (a vector field with collocated scalar components).
struct VectorField {
  std::vector<FormField> comp;

  VectorField(const MaskPtr& mask, BcMode bc = BcMode::none) {
    comp.reserve(static_cast<std::size_t>(mask->dim()));
    for (int n = 0; n < mask->dim(); ++n) comp.emplace_back(mask, 0, bc);
  }
  int dim() const { return static_cast<int>(comp.size()); }
  const DomainMask& mask() const { return comp.front().mask(); }
};

/// Square matrix field: row n is the 1-form with components T_{n,m}.
struct TensorField {
  std::vector<FormField> rows;

  TensorField(const MaskPtr& mask, BcMode bc = BcMode::none) {
    rows.reserve(static_cast<std::size_t>(mask->dim()));
    for (int n = 0; n < mask->dim(); ++n) rows.emplace_back(mask, 1, bc);
  }
  int dim() const { return static_cast<int>(rows.size()); }
  const DomainMask& mask() const { return rows.front().mask(); }
};

/// Row-wise exterior derivative of a tensor field: N rows of 2-forms.
struct CurlField {
  std::vector<FormField> rows;

  explicit CurlField(const MaskPtr& mask) {
    rows.reserve(static_cast<std::size_t>(mask->dim()));
    for (int n = 0; n < mask->dim(); ++n) rows.emplace_back(mask, 2);
  }
  int dim() const { return static_cast<int>(rows.size()); }
};

template <typename Rows>
double rows_inner(const Rows& a, const Rows& b) {
  KahanAccumulator acc;
  const auto& ra = a.rows;
  const auto& rb = b.rows;
  if (ra.size() != rb.size()) throw IncompatibleError("rows_inner: row count mismatch");
  for (std::size_t n = 0; n < ra.size(); ++n) acc.add(inner_product(ra[n], rb[n]));
  return acc.value();
}

inline double inner_product(const TensorField& a, const TensorField& b) { return rows_inner(a, b); }
inline double inner_product(const CurlField& a, const CurlField& b) { return rows_inner(a, b); }
inline double norm(const TensorField& a) { return std::sqrt(rows_inner(a, a)); }
inline double norm(const CurlField& a) { return std::sqrt(rows_inner(a, a)); }

inline double inner_product(const VectorField& a, const VectorField& b) {
  KahanAccumulator acc;
  if (a.comp.size() != b.comp.size()) throw IncompatibleError("inner_product: size mismatch");
  for (std::size_t n = 0; n < a.comp.size(); ++n) acc.add(inner_product(a.comp[n], b.comp[n]));
  return acc.value();
}
inline double norm(const VectorField& a) { return std::sqrt(inner_product(a, a)); }

/// Pointwise symmetric part: sym(T)_{nm} = (T_{nm} + T_{mn}) / 2.
inline TensorField sym_part(const TensorField& T) {
  TensorField S(T.rows.front().mask_ptr());
  const int N = T.dim();
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < N; ++m) {
      const auto& tnm = T.rows[static_cast<std::size_t>(n)].comp(m);
      const auto& tmn = T.rows[static_cast<std::size_t>(m)].comp(n);
      auto& s = S.rows[static_cast<std::size_t>(n)].comp(m);
      for (std::size_t v = 0; v < s.size(); ++v) s[v] = 0.5 * (tnm[v] + tmn[v]);
    }
  return S;
}

/// Pointwise skew part: skew(T)_{nm} = (T_{nm} - T_{mn}) / 2.
inline TensorField skew_part(const TensorField& T) {
  TensorField S(T.rows.front().mask_ptr());
  const int N = T.dim();
  for (int n = 0; n < N; ++n)
    for (int m = 0; m < N; ++m) {
      const auto& tnm = T.rows[static_cast<std::size_t>(n)].comp(m);
      const auto& tmn = T.rows[static_cast<std::size_t>(m)].comp(n);
      auto& s = S.rows[static_cast<std::size_t>(n)].comp(m);
      for (std::size_t v = 0; v < s.size(); ++v) s[v] = 0.5 * (tnm[v] - tmn[v]);
    }
  return S;
}

inline TensorField random_tensor(const MaskPtr& mask, BcMode mode, std::uint64_t seed) {
  TensorField T(mask, mode);
  for (int n = 0; n < T.dim(); ++n)
    T.rows[static_cast<std::size_t>(n)].fill_random(seed + 0x51ed2701u * static_cast<std::uint64_t>(n + 1));
  return T;
}

/// Random pointwise-skew tensor respecting the row bc mode.
inline TensorField random_skew_tensor(const MaskPtr& mask, BcMode mode, std::uint64_t seed) {
  TensorField T = random_tensor(mask, mode, seed);
  TensorField S = skew_part(T);
  for (auto& row : S.rows) {
    row.set_bc_mode(mode);
    row.constrain();
  }
  return S;
}

} // namespace kornlab
