#pragma once

#include <string>
#include <vector>

#include "kornlab/field.hpp"

/// Discrete exterior derivative and coderivative on collocated grids.
///
/// The exterior derivative applies forward differences along the inserted
/// axis with the incidence signs of the combinatorial layer:
///
///   (dE)_J(x) = sum_p (-1)^p [ E_{J \ j_p}(x + h e_{j_p}) - E_{J \ j_p}(x) ] / h.
///
/// The coderivative applies backward differences through the transposed
/// table.  Both read missing neighbors (outside the bounding box) as zero
/// and zero their output at exterior vertices, so as matrices on the stored
/// arrays they satisfy  delta = -d^T  exactly: the duality
/// <dE, H> = -<E, delta H> holds to machine precision for all stored fields,
/// with no boundary terms.  d∘d = 0 and delta∘delta = 0 hold at roundoff
/// level for fields whose bc mode keeps the mask's exterior skin silent
/// (always on box masks; full_dirichlet fields on any mask).

namespace kornlab {

namespace detail {

/// out[c] += (sign/h) * (forward difference along `axis`) of in[c], reading
/// zero beyond the box.  Iterates the grid as bundles of axis-aligned lines.
inline void add_forward_diff(const DomainMask& mask, const std::vector<double>& in, int axis,
                             double sign, std::vector<double>& out) {
  const std::size_t s = mask.stride(axis);
  const std::size_t len = static_cast<std::size_t>(mask.shape()[axis]);
  const std::size_t block = s * len;
  const double f = sign / mask.h();
  const std::size_t nv = in.size();
  for (std::size_t hi = 0; hi < nv; hi += block) {
    for (std::size_t lo = 0; lo < s; ++lo) {
      const std::size_t base = hi + lo;
      std::size_t v = base;
      for (std::size_t m = 0; m + 1 < len; ++m, v += s) out[v] += f * (in[v + s] - in[v]);
      out[v] += f * (0.0 - in[v]); // top neighbor outside the box
    }
  }
}

/// out[c] += (sign/h) * (backward difference along `axis`) of in[c].
inline void add_backward_diff(const DomainMask& mask, const std::vector<double>& in, int axis,
                              double sign, std::vector<double>& out) {
  const std::size_t s = mask.stride(axis);
  const std::size_t len = static_cast<std::size_t>(mask.shape()[axis]);
  const std::size_t block = s * len;
  const double f = sign / mask.h();
  const std::size_t nv = in.size();
  for (std::size_t hi = 0; hi < nv; hi += block) {
    for (std::size_t lo = 0; lo < s; ++lo) {
      const std::size_t base = hi + lo;
      out[base] += f * in[base]; // bottom neighbor outside the box
      std::size_t v = base + s;
      for (std::size_t m = 1; m < len; ++m, v += s) out[v] += f * (in[v] - in[v - s]);
    }
  }
}

inline void zero_exterior(const DomainMask& mask, std::vector<double>& g) {
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!mask.is_inside(v)) g[v] = 0.0;
}

} // namespace detail

/// d: q-forms -> (q+1)-forms.  Output carries bc mode `none` and exact zeros
/// at exterior vertices; a fresh field is allocated.
inline FormField exterior_derivative(const FormField& E) {
  const DomainMask& mask = E.mask();
  const int N = mask.dim();
  const int q = E.degree();
  if (q >= N) throw DegreeError("exterior_derivative: no degree above N");
  FormField out(E.mask_ptr(), q + 1, BcMode::none);
  for (const IncidenceEntry& e : incidence_table(N, q))
    detail::add_forward_diff(mask, E.comp(e.source_rank), e.direction - 1,
                             static_cast<double>(e.sign), out.comp(e.target_rank));
  for (int c = 0; c < out.components(); ++c) detail::zero_exterior(mask, out.comp(c));
  return out;
}

/// delta: q-forms -> (q-1)-forms, the exact negative transpose of d.
inline FormField coderivative(const FormField& H) {
  const DomainMask& mask = H.mask();
  const int N = mask.dim();
  const int q = H.degree();
  if (q <= 0) throw DegreeError("coderivative: no degree below 0");
  FormField out(H.mask_ptr(), q - 1, BcMode::none);
  for (const IncidenceEntry& e : incidence_table(N, q - 1))
    detail::add_backward_diff(mask, H.comp(e.target_rank), e.direction - 1,
                              static_cast<double>(e.sign), out.comp(e.source_rank));
  for (int c = 0; c < out.components(); ++c) detail::zero_exterior(mask, out.comp(c));
  return out;
}

/// Vector-calculus views of d and delta in the degrees where they coincide.
inline FormField grad(const FormField& u) {
  if (u.degree() != 0) throw DegreeError("grad expects a 0-form");
  return exterior_derivative(u);
}

inline FormField curl(const FormField& v) {
  if (v.degree() != 1) throw DegreeError("curl expects a 1-form");
  return exterior_derivative(v);
}

/// Adjoint (backward-difference) divergence: <grad u, v> = -<u, div v>.
inline FormField div(const FormField& v) {
  if (v.degree() != 1) throw DegreeError("div expects a 1-form");
  return coderivative(v);
}

/// Row-wise gradient of a vector field: (Grad v)_n = grad v_n.
inline TensorField Grad(const VectorField& v) {
  TensorField T(v.comp.front().mask_ptr());
  for (int n = 0; n < v.dim(); ++n)
    T.rows[static_cast<std::size_t>(n)] = grad(v.comp[static_cast<std::size_t>(n)]);
  return T;
}

/// Row-wise curl: (Curl T)_{n,(j,k)} = D_j T_{nk} - D_k T_{nj}.
inline CurlField Curl(const TensorField& T) {
  CurlField C(T.rows.front().mask_ptr());
  for (int n = 0; n < T.dim(); ++n)
    C.rows[static_cast<std::size_t>(n)] = curl(T.rows[static_cast<std::size_t>(n)]);
  return C;
}

/// Row-wise adjoint divergence: (Div T)_n = div T_n.
inline VectorField Div(const TensorField& T) {
  VectorField d(T.rows.front().mask_ptr());
  for (int n = 0; n < T.dim(); ++n)
    d.comp[static_cast<std::size_t>(n)] = div(T.rows[static_cast<std::size_t>(n)]);
  return d;
}

/// Static shape summary of an operator at a given ambient dimension, used by
/// tests and the CLI to describe what is being assembled.
struct OperatorDescriptor {
  std::string name;
  int input_degree = 0;
  int output_degree = 0;
  int input_components = 0;
  int output_components = 0;
};

inline OperatorDescriptor describe_operator(const std::string& name, int N) {
  OperatorDescriptor d;
  d.name = name;
  if (name == "grad") {
    d.input_degree = 0; d.output_degree = 1;
  } else if (name == "curl") {
    d.input_degree = 1; d.output_degree = 2;
  } else if (name == "div") {
    d.input_degree = 1; d.output_degree = 0;
  } else {
    throw IncompatibleError("describe_operator: unknown operator " + name);
  }
  d.input_components = num_components(N, d.input_degree);
  d.output_components = num_components(N, d.output_degree);
  return d;
}

} // namespace kornlab
