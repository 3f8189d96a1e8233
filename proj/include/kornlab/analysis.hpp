#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "kornlab/diff_ops.hpp"
#include "kornlab/dof_map.hpp"
#include "kornlab/field.hpp"
#include "kornlab/solvers.hpp"

/// Quadratic forms, decompositions, and the inequality chain.
///
/// Everything here reduces to two packed Galerkin operators:
///
///   maxwell_form_operator:  Q(E) = |dE|^2 + |P_{q-1} delta E|^2
///   korn_form_operator:     K(T) = |sym T|^2 + |Curl T|^2
///
/// where P_{q-1} zeroes the (q-1)-form entries constrained under the same bc
/// mode.  Spectra of the first give Poincare-type constants and discrete
/// harmonic spaces; the spectrum of the second gives the sharp constant of
/// the seminorm equivalence that the decomposition chain certifies.

namespace kornlab {

// ---------------------------------------------------------------------------
// operator builders
// ---------------------------------------------------------------------------

/// Galerkin operator of Q(E) = |dE|^2 + |P_{q-1} delta E|^2 on the free DOFs
/// of (mask, q, mode).  Symmetric positive semi-definite; the kernel is the
/// discrete harmonic space of degree q.  The d-term drops at q = N and the
/// delta-term at q = 0 (where Q is the Dirichlet energy).
inline LinearOperator maxwell_form_operator(const MaskPtr& mask, int q, BcMode mode) {
  auto map = std::make_shared<DofMap>(mask, q, mode);
  const int N = mask->dim();
  LinearOperator A;
  A.dim = map->dim();
  A.name = std::string("form_q") + std::to_string(q) + "_" + to_string(mode);
  A.apply = [map, mask, q, N, mode](const std::vector<double>& x, std::vector<double>& y) {
    FormField E = map->unpack(x);
    FormField out(mask, q, BcMode::none);
    if (q < N) {
      // d^T d E = -delta(d E)
      FormField t = coderivative(exterior_derivative(E));
      axpy(-1.0, t, out);
    }
    if (q > 0) {
      // delta^T P^T P delta E = -d(P delta E)
      FormField w = coderivative(E);
      w.set_bc_mode(mode);
      w.constrain();
      FormField t = exterior_derivative(w);
      axpy(-1.0, t, out);
    }
    map->pack(out, y);
  };
  return A;
}

/// Galerkin operator of K(T) = |sym T|^2 + |Curl T|^2 on tensor fields whose
/// rows carry `mode`.  Symmetric positive semi-definite.
inline LinearOperator korn_form_operator(const MaskPtr& mask, BcMode mode) {
  auto map = std::make_shared<TensorDofMap>(mask, mode);
  LinearOperator A;
  A.dim = map->dim();
  A.name = std::string("korn_form_") + to_string(mode);
  A.apply = [map](const std::vector<double>& x, std::vector<double>& y) {
    TensorField T = map->unpack(x);
    TensorField out = sym_part(T); // sym is an L2-orthogonal projection
    for (int n = 0; n < T.dim(); ++n) {
      // row-wise d^T d t_n = -delta(d t_n)
      FormField t = coderivative(exterior_derivative(T.rows[static_cast<std::size_t>(n)]));
      axpy(-1.0, t, out.rows[static_cast<std::size_t>(n)]);
    }
    map->pack(out, y);
  };
  return A;
}

// ---------------------------------------------------------------------------
// spectra: kernels, gaps, constants
// ---------------------------------------------------------------------------

struct SpectralOptions {
  int request = 0;          ///< eigenpairs to compute; 0 = expected_kernel + 3
  int expected_kernel = 0;  ///< starting guess for the kernel cluster size
  double eig_tol = 1e-10;   ///< Ritz residual tolerance (relative to lambda_ref)
  double kernel_rel = 1e-8; ///< kernel threshold relative to max(lambda_ref, 1)
  std::size_t dense_limit = 0; ///< use the dense oracle when dofs <= limit
  EigenOptions eigen;
  std::vector<std::vector<double>> deflation; ///< extra subspace to avoid
};

struct SpectralRecord {
  int q = 0;
  BcMode mode = BcMode::none;
  std::size_t dofs = 0;
  bool dense_path = false;
  double kernel_threshold = 0.0;
  int kernel_dim = 0;
  /// separation of the kernel cluster: lambda_{dim+1} / lambda_dim for a
  /// non-empty kernel, first eigenvalue over the threshold otherwise
  double gap_ratio = std::numeric_limits<double>::quiet_NaN();
  double lambda_min_positive = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN(); ///< 1/sqrt(lambda)
  std::vector<double> eigenvalues; ///< computed batch, ascending
  EigenReport eigen;
};

/// Classifies the bottom of the spectrum of a PSD operator: kernel cluster
/// size, gap, and the first eigenvalue above the kernel.  Grows the batch if
/// the whole batch lands in the kernel cluster.
inline SpectralRecord classify_spectrum(const LinearOperator& A, const SpectralOptions& opts) {
  SpectralRecord rec;
  rec.dofs = A.dim;
  if (A.dim == 0) throw IncompatibleError("classify_spectrum: empty operator");

  if (opts.dense_limit > 0 && A.dim <= opts.dense_limit) {
    rec.dense_path = true;
    rec.eigen = dense_eigen_oracle(A, opts.dense_limit);
    rec.eigenvalues = rec.eigen.eigenvalues;
  } else {
    int k = opts.request > 0 ? opts.request : opts.expected_kernel + 3;
    k = std::min<int>(k, static_cast<int>(A.dim - opts.deflation.size()));
    for (int attempt = 0; attempt < 6; ++attempt) {
      EigenOptions eo = opts.eigen;
      rec.eigen = smallest_eigenpairs(A, k, opts.deflation, opts.eig_tol, eo);
      rec.eigenvalues = rec.eigen.eigenvalues;
      const double thresh = opts.kernel_rel * std::max(rec.eigen.lambda_ref, 1.0);
      int in_kernel = 0;
      for (double lam : rec.eigenvalues)
        if (lam < thresh) ++in_kernel;
      const int cap = static_cast<int>(A.dim - opts.deflation.size());
      if (in_kernel < k || k >= cap) break;
      k = std::min(2 * k + 2, cap); // whole batch in the kernel: look deeper
    }
  }

  rec.kernel_threshold = opts.kernel_rel * std::max(rec.eigen.lambda_ref, 1.0);
  for (double lam : rec.eigenvalues)
    if (lam < rec.kernel_threshold) ++rec.kernel_dim;

  if (rec.kernel_dim > 0 && rec.kernel_dim < static_cast<int>(rec.eigenvalues.size())) {
    const double last_kernel =
        std::max(std::abs(rec.eigenvalues[static_cast<std::size_t>(rec.kernel_dim - 1)]), 1e-300);
    rec.gap_ratio = rec.eigenvalues[static_cast<std::size_t>(rec.kernel_dim)] / last_kernel;
  } else if (rec.kernel_dim == 0 && !rec.eigenvalues.empty()) {
    rec.gap_ratio = rec.eigenvalues.front() / rec.kernel_threshold;
  }

  if (rec.kernel_dim < static_cast<int>(rec.eigenvalues.size())) {
    rec.lambda_min_positive = rec.eigenvalues[static_cast<std::size_t>(rec.kernel_dim)];
    if (rec.lambda_min_positive > 0.0) rec.constant = 1.0 / std::sqrt(rec.lambda_min_positive);
  }
  return rec;
}

/// Spectrum of the degree-q quadratic form under `mode`.  The returned
/// `constant` is 1/sqrt(first eigenvalue above the harmonic kernel): the
/// Poincare constant at q = 0 (full Dirichlet) and the Maxwell-type constant
/// at q = 1 (tangential).
inline SpectralRecord poincare_spectrum(const MaskPtr& mask, int q, BcMode mode,
                                        const SpectralOptions& opts = {}) {
  LinearOperator A = maxwell_form_operator(mask, q, mode);
  SpectralRecord rec = classify_spectrum(A, opts);
  rec.q = q;
  rec.mode = mode;
  return rec;
}

/// Dimension of the discrete harmonic space of degree q (the Betti-number
/// probe).  Alias for the kernel size of poincare_spectrum.
inline SpectralRecord harmonic_spectrum(const MaskPtr& mask, int q, BcMode mode,
                                        const SpectralOptions& opts = {}) {
  return poincare_spectrum(mask, q, mode, opts);
}

/// Kernel eigenfields of the degree-q form, unpacked and L2-normalized.
struct HarmonicBasis {
  std::vector<FormField> fields;
  SpectralRecord spectrum;
};

inline HarmonicBasis harmonic_basis(const MaskPtr& mask, int q, BcMode mode,
                                    const SpectralOptions& opts = {}) {
  HarmonicBasis basis;
  basis.spectrum = poincare_spectrum(mask, q, mode, opts);
  DofMap map(mask, q, mode);
  for (int i = 0; i < basis.spectrum.kernel_dim; ++i) {
    FormField psi = map.unpack(basis.spectrum.eigen.eigenvectors[static_cast<std::size_t>(i)]);
    const double nrm = norm(psi);
    if (!(nrm > 0.0)) throw SolverError("harmonic_basis: zero kernel vector");
    for (int c = 0; c < psi.components(); ++c) scal(1.0 / nrm, psi.comp(c));
    basis.fields.push_back(std::move(psi));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// named constants
// ---------------------------------------------------------------------------

struct ConstantsRecord {
  std::string domain;
  int N = 0;
  double h = 0.0;
  SpectralRecord poincare; ///< q = 0, full Dirichlet
  SpectralRecord maxwell;  ///< q = 1, tangential
  double c_p = std::numeric_limits<double>::quiet_NaN();
  double c_m = std::numeric_limits<double>::quiet_NaN();
  double c_hat = std::numeric_limits<double>::quiet_NaN(); ///< max{2, sqrt(5) c_m}
};

inline ConstantsRecord compute_constants(const MaskPtr& mask, const SpectralOptions& p_opts = {},
                                         SpectralOptions m_opts = {}) {
  ConstantsRecord rec;
  rec.domain = mask->descriptor();
  rec.N = mask->dim();
  rec.h = mask->h();
  rec.poincare = poincare_spectrum(mask, 0, BcMode::full_dirichlet, p_opts);
  // the degree-1 kernel is the first harmonic space; let the batch adapt
  rec.maxwell = poincare_spectrum(mask, 1, BcMode::tangential, m_opts);
  rec.c_p = rec.poincare.constant;
  rec.c_m = rec.maxwell.constant;
  rec.c_hat = std::max(2.0, std::sqrt(5.0) * rec.c_m);
  return rec;
}

// ---------------------------------------------------------------------------
// Helmholtz decomposition of tensor fields
// ---------------------------------------------------------------------------

struct HelmholtzReport {
  VectorField potential;     ///< v, rows in the Dirichlet 0-form space
  TensorField gradient_part; ///< Grad v
  TensorField remainder;     ///< S = T - Grad v, Galerkin-solenoidal
  double pythagoras_defect = 0.0; ///< | |T|^2 - |Grad v|^2 - |S|^2 | / |T|^2
  double solenoid_residual = 0.0; ///< |P0 delta S|, absolute
  double solenoid_defect = 0.0;   ///< |P0 delta S| / |P0 delta T|
  std::vector<SolveReport> solves;
};

/// Splits T into a gradient of a Dirichlet vector potential plus a remainder
/// whose rows are solenoidal against every interior vertex: row-wise, v_n
/// solves <grad v_n, grad w> = <t_n, grad w> for all Dirichlet test functions
/// w, so <S_n, grad w> = 0 and the two parts are L2-orthogonal.
inline HelmholtzReport helmholtz_decompose(const TensorField& T, double cg_tol = 1e-12,
                                           int cg_max_iterations = 100000) {
  const MaskPtr mask = T.rows.front().mask_ptr();
  DofMap pot_map(mask, 0, BcMode::full_dirichlet);
  LinearOperator L = maxwell_form_operator(mask, 0, BcMode::full_dirichlet);

  HelmholtzReport rep{VectorField(mask, BcMode::full_dirichlet), TensorField(mask),
                      TensorField(mask), 0.0, 0.0, 0.0, {}};
  std::vector<double> b;
  for (int n = 0; n < T.dim(); ++n) {
    const FormField& t = T.rows[static_cast<std::size_t>(n)];
    FormField dt = coderivative(t);
    pot_map.pack(dt, b);
    scal(-1.0, b); // rhs of the normal equations: <t, grad w> = <-delta t, w>
    auto [x, solve] = cg_solve(L, b, cg_tol, cg_max_iterations);
    rep.solves.push_back(solve);
    FormField u = pot_map.unpack(x);
    FormField g = grad(u);
    FormField s = t;
    axpy(-1.0, g, s);
    rep.potential.comp[static_cast<std::size_t>(n)] = std::move(u);
    rep.gradient_part.rows[static_cast<std::size_t>(n)] = std::move(g);
    rep.remainder.rows[static_cast<std::size_t>(n)] = std::move(s);
  }

  const double t2 = inner_product(T, T);
  const double g2 = inner_product(rep.gradient_part, rep.gradient_part);
  const double s2 = inner_product(rep.remainder, rep.remainder);
  rep.pythagoras_defect = std::abs(t2 - g2 - s2) / std::max(t2, 1e-300);

  KahanAccumulator num, den;
  for (int n = 0; n < T.dim(); ++n) {
    FormField ws = coderivative(rep.remainder.rows[static_cast<std::size_t>(n)]);
    ws.set_bc_mode(BcMode::full_dirichlet);
    ws.constrain();
    FormField wt = coderivative(T.rows[static_cast<std::size_t>(n)]);
    wt.set_bc_mode(BcMode::full_dirichlet);
    wt.constrain();
    num.add(inner_product(ws, ws));
    den.add(inner_product(wt, wt));
  }
  rep.solenoid_residual = std::sqrt(num.value());
  rep.solenoid_defect = rep.solenoid_residual / std::max(std::sqrt(den.value()), 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// Hodge decomposition of 1-forms
// ---------------------------------------------------------------------------

struct HodgeReport {
  FormField potential;     ///< alpha, Dirichlet 0-form
  FormField exact_part;    ///< d alpha
  FormField harmonic_part; ///< projection onto the degree-1 harmonic space
  FormField coexact_part;  ///< the rest
  int harmonic_dim = 0;
  double pythagoras_defect = 0.0; ///< relative, three-way
  SpectralRecord kernel_spectrum;
  SolveReport solve;
};

/// E = d alpha + gamma + rho with alpha Dirichlet, gamma harmonic (kernel of
/// the degree-1 form under E's bc mode), and rho the remainder.  d alpha is
/// L2-orthogonal to E - d alpha by Galerkin orthogonality and gamma to rho by
/// construction, so the three-way Pythagoras identity holds to solver
/// accuracy.
inline HodgeReport hodge_decompose(const FormField& E, double cg_tol = 1e-12,
                                   const SpectralOptions& kernel_opts = {}) {
  if (E.degree() != 1) throw DegreeError("hodge_decompose: implemented for 1-forms");
  const MaskPtr mask = E.mask_ptr();

  DofMap pot_map(mask, 0, BcMode::full_dirichlet);
  LinearOperator L = maxwell_form_operator(mask, 0, BcMode::full_dirichlet);
  std::vector<double> b;
  FormField dE = coderivative(E);
  pot_map.pack(dE, b);
  scal(-1.0, b);
  auto [x, solve] = cg_solve(L, b, cg_tol, 100000);

  HarmonicBasis basis = harmonic_basis(mask, 1, E.bc_mode(), kernel_opts);

  HodgeReport rep{pot_map.unpack(x), FormField(mask, 1), FormField(mask, 1),
                  FormField(mask, 1), static_cast<int>(basis.fields.size()),
                  0.0, basis.spectrum, solve};
  rep.exact_part = grad(rep.potential);
  FormField S = E;
  axpy(-1.0, rep.exact_part, S);
  for (const FormField& psi : basis.fields) axpy(inner_product(S, psi), psi, rep.harmonic_part);
  rep.coexact_part = S;
  axpy(-1.0, rep.harmonic_part, rep.coexact_part);

  const double e2 = inner_product(E, E);
  const double parts = inner_product(rep.exact_part, rep.exact_part) +
                       inner_product(rep.harmonic_part, rep.harmonic_part) +
                       inner_product(rep.coexact_part, rep.coexact_part);
  rep.pythagoras_defect = std::abs(e2 - parts) / std::max(e2, 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// Korn identity check
// ---------------------------------------------------------------------------

enum class KornVariant {
  dirichlet,         ///< v supported on the free Dirichlet vertex set
  boundary_constant, ///< v carries a constant trace per component on a
                     ///< connected boundary; the check recovers and removes it
};

struct KornReport {
  KornVariant variant = KornVariant::dirichlet;
  double grad_norm = 0.0;
  double sym_norm = 0.0;
  double div_norm = 0.0;
  /// | 2|sym Grad v|^2 - |Grad v|^2 - |div v|^2 | / |Grad v|^2; the identity
  /// is exact for interior-supported v, so this sits at roundoff level
  double identity_defect = 0.0;
  double ratio = 0.0;        ///< |Grad v| / |sym Grad v|, bounded by sqrt(2)
  bool zero_flagged = false; ///< both norms vanished; ratio set to 0 by convention
  std::vector<double> boundary_constants; ///< recovered per component (variant 2)
  double shifted_grad_norm = 0.0; ///< |Grad w| of the field as supplied (variant 2)
  double shifted_sym_norm = 0.0;  ///< |sym Grad w| of the field as supplied
  double shifted_ratio = 0.0;     ///< their quotient (0 when both vanish)
};

/// Backward divergence sum_n D^-_n v_n as a 0-form.
inline FormField backward_divergence(const VectorField& v) {
  FormField E(v.comp.front().mask_ptr(), 1, BcMode::none);
  for (int n = 0; n < v.dim(); ++n) E.comp(n) = v.comp[static_cast<std::size_t>(n)].comp(0);
  return coderivative(E);
}

/// Draws the random input for korn_check: each component is random on the
/// free Dirichlet vertex set; the boundary_constant variant then adds one
/// random constant per component on every inside vertex, so the trace on the
/// boundary is that constant.
inline VectorField random_korn_vector(const MaskPtr& mask, std::uint64_t seed,
                                      KornVariant variant = KornVariant::dirichlet) {
  VectorField v(mask, BcMode::full_dirichlet);
  for (int n = 0; n < v.dim(); ++n)
    v.comp[static_cast<std::size_t>(n)].fill_random(seed + 0x9e3779b9u * static_cast<std::uint64_t>(n + 1));
  if (variant == KornVariant::boundary_constant) {
    UniformStream rng(seed ^ 0x517cc1b727220a95ULL);
    for (int n = 0; n < v.dim(); ++n) {
      const double c = rng.next();
      auto& g = v.comp[static_cast<std::size_t>(n)].comp(0);
      for (std::size_t i = 0; i < g.size(); ++i)
        if (mask->is_inside(i)) g[i] += c;
      v.comp[static_cast<std::size_t>(n)].set_bc_mode(BcMode::none);
    }
  }
  return v;
}

/// First Korn inequality: checks the exact discrete identity
/// 2 |sym Grad v|^2 = |Grad v|^2 + |div v|^2 for Dirichlet-supported v
/// (hence |Grad v| <= sqrt(2) |sym Grad v|).  The boundary_constant variant
/// accepts a field whose components are each constant on a connected
/// boundary, recovers the constants from the trace, removes them, and
/// certifies the recovered Dirichlet field; the norms of the field as
/// supplied are reported alongside.
inline KornReport korn_check(const VectorField& v_in,
                             KornVariant variant = KornVariant::dirichlet) {
  KornReport rep;
  rep.variant = variant;
  const MaskPtr mask = v_in.comp.front().mask_ptr();
  const int N = v_in.dim();

  VectorField v(mask, BcMode::full_dirichlet);

  if (variant == KornVariant::boundary_constant) {
    if (mask->boundary_components() != 1)
      throw DomainError("korn_check: the boundary-constant variant needs a connected boundary");
    std::size_t witness = 0;
    while (witness < mask->num_vertices() && !mask->is_boundary(witness)) ++witness;
    if (witness == mask->num_vertices())
      throw DomainError("korn_check: mask has no boundary vertices");
    rep.shifted_grad_norm = norm(Grad(v_in));
    rep.shifted_sym_norm = norm(sym_part(Grad(v_in)));
    rep.shifted_ratio =
        rep.shifted_sym_norm > 0.0 ? rep.shifted_grad_norm / rep.shifted_sym_norm : 0.0;
    rep.boundary_constants.resize(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
      const auto& gs = v_in.comp[static_cast<std::size_t>(n)].comp(0);
      const double c = gs[witness];
      double dev = 0.0;
      for (std::size_t i = 0; i < gs.size(); ++i)
        if (mask->is_boundary(i)) dev = std::max(dev, std::abs(gs[i] - c));
      if (dev > 1e-12 * std::max(1.0, std::abs(c)))
        throw IncompatibleError("korn_check: component " + std::to_string(n) +
                                " is not constant on the boundary");
      rep.boundary_constants[static_cast<std::size_t>(n)] = c;
      auto& g = v.comp[static_cast<std::size_t>(n)].comp(0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = mask->is_inside(i) ? gs[i] - c : 0.0;
      v.comp[static_cast<std::size_t>(n)].constrain();
    }
  } else {
    for (int n = 0; n < N; ++n) {
      const auto& gs = v_in.comp[static_cast<std::size_t>(n)].comp(0);
      auto& g = v.comp[static_cast<std::size_t>(n)].comp(0);
      for (std::size_t i = 0; i < gs.size(); ++i) {
        if (gs[i] != 0.0 && !dof_is_free(*mask, 0u, i, BcMode::full_dirichlet))
          throw IncompatibleError("korn_check: component " + std::to_string(n) +
                                  " is not supported on the Dirichlet vertex set");
        g[i] = gs[i];
      }
    }
  }

  TensorField G = Grad(v);
  TensorField S = sym_part(G);
  FormField dv = backward_divergence(v);
  const double g2 = inner_product(G, G);
  const double s2 = inner_product(S, S);
  const double d2 = inner_product(dv, dv);
  rep.grad_norm = std::sqrt(g2);
  rep.sym_norm = std::sqrt(s2);
  rep.div_norm = std::sqrt(d2);
  rep.identity_defect = std::abs(2.0 * s2 - g2 - d2) / std::max(g2, 1e-300);
  if (s2 > 0.0) {
    rep.ratio = std::sqrt(g2 / s2);
  } else {
    rep.ratio = 0.0;
    rep.zero_flagged = true;
  }
  return rep;
}

/// Convenience: run korn_check on the random field for this seed.
inline KornReport korn_check(const MaskPtr& mask, std::uint64_t seed,
                             KornVariant variant = KornVariant::dirichlet) {
  return korn_check(random_korn_vector(mask, seed, variant), variant);
}

// ---------------------------------------------------------------------------
// the inequality chain
// ---------------------------------------------------------------------------

struct ChainAssertion {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct ChainReport {
  double t_norm = 0.0;
  double sym_norm = 0.0;
  double curl_norm = 0.0;
  double gradient_norm = 0.0;   ///< |Grad v|
  double remainder_norm = 0.0;  ///< |S|
  double c_m = 0.0;
  double c_hat = 0.0;
  double pythagoras_defect = 0.0;  ///< relative, from the decomposition
  double solenoid_residual = 0.0;  ///< |P0 delta S|, absolute
  double korn_identity_defect = 0.0; ///< relative, on the gradient part
  double remainder_ratio = 0.0;    ///< |S| / (c_m |Curl S|), the step-2 slack
  double margin = 0.0;             ///< rhs/lhs of the final inequality
  std::vector<ChainAssertion> assertions;
  bool all_pass = false;
};

/// Runs the decomposition argument on the supplied tensor field T
/// (full-Dirichlet support expected): split T = Grad v + S against the
/// Dirichlet Laplacian and assert every step of the seminorm estimate,
///   pythagoras       |T|^2 = |Grad v|^2 + |S|^2        (orthogonal split)
///   curl_invariance  Curl S = Curl T                   (Curl Grad v = 0)
///   maxwell_step     |S| <= c_m (|Curl S|^2 + |P0 delta S|^2)^{1/2}
///   korn_step        |Grad v|^2 <= 2 |sym Grad v|^2
///   final_display    |T|^2 <= 4 |sym T|^2 + 5 |S|^2
///   norm_inequality  |T| <= c_hat (|sym T|^2 + |Curl T|^2)^{1/2}
/// with c_hat = max{2, sqrt(5) c_m} for the supplied Maxwell constant.
/// `tol` is the additive slack granted to the floating-point comparisons.
inline ChainReport main_lemma_chain(const TensorField& T, double c_m, double tol = 1e-8,
                                    double cg_tol = 1e-12) {
  ChainReport rep;
  rep.c_m = c_m;
  rep.c_hat = std::max(2.0, std::sqrt(5.0) * c_m);

  HelmholtzReport helm = helmholtz_decompose(T, cg_tol);

  CurlField curlT = Curl(T);
  CurlField curlS = Curl(helm.remainder);
  TensorField symT = sym_part(T);

  rep.t_norm = norm(T);
  rep.sym_norm = norm(symT);
  rep.curl_norm = norm(curlT);
  rep.gradient_norm = norm(helm.gradient_part);
  rep.remainder_norm = norm(helm.remainder);
  rep.pythagoras_defect = helm.pythagoras_defect;
  rep.solenoid_residual = helm.solenoid_residual;

  auto push = [&rep](const std::string& name, double lhs, double rhs) {
    rep.assertions.push_back({name, lhs, rhs, lhs <= rhs});
  };

  push("pythagoras", rep.pythagoras_defect, 1e-9);

  {
    CurlField diff = curlS;
    for (std::size_t n = 0; n < diff.rows.size(); ++n) axpy(-1.0, curlT.rows[n], diff.rows[n]);
    push("curl_invariance", norm(diff), tol * std::max(1.0, rep.curl_norm));
  }

  const double curl_s = norm(curlS);
  const double maxwell_rhs = c_m * std::hypot(curl_s, rep.solenoid_residual);
  push("maxwell_step", rep.remainder_norm, maxwell_rhs + tol * std::max(1.0, rep.t_norm));
  rep.remainder_ratio = rep.remainder_norm / std::max(c_m * curl_s, 1e-300);

  {
    TensorField symG = sym_part(helm.gradient_part);
    FormField dv = backward_divergence(helm.potential);
    const double g2 = inner_product(helm.gradient_part, helm.gradient_part);
    const double s2 = inner_product(symG, symG);
    const double d2 = inner_product(dv, dv);
    rep.korn_identity_defect = std::abs(2.0 * s2 - g2 - d2) / std::max(g2, 1e-300);
    push("korn_step", g2, 2.0 * s2 * (1.0 + tol));
  }

  const double t2 = rep.t_norm * rep.t_norm;
  const double display_rhs =
      4.0 * rep.sym_norm * rep.sym_norm + 5.0 * rep.remainder_norm * rep.remainder_norm;
  push("final_display", t2, display_rhs * (1.0 + tol));

  const double rhs = rep.c_hat * std::hypot(rep.sym_norm, rep.curl_norm);
  push("norm_inequality", rep.t_norm, rhs * (1.0 + tol));
  rep.margin = rhs / std::max(rep.t_norm, 1e-300);

  rep.all_pass = true;
  for (const auto& a : rep.assertions) rep.all_pass = rep.all_pass && a.pass;
  return rep;
}

/// Convenience: run the chain on the random Dirichlet tensor for this seed.
inline ChainReport main_lemma_chain(const MaskPtr& mask, std::uint64_t seed, double c_m,
                                    double tol = 1e-8, double cg_tol = 1e-12) {
  return main_lemma_chain(random_tensor(mask, BcMode::full_dirichlet, seed), c_m, tol, cg_tol);
}

// ---------------------------------------------------------------------------
// sharp constant of the seminorm equivalence
// ---------------------------------------------------------------------------

struct SharpRecord {
  SpectralRecord spectrum; ///< bottom of the Korn form on Dirichlet tensors
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  double c_sharp = std::numeric_limits<double>::quiet_NaN(); ///< 1/sqrt(lambda_min)
};

inline SpectralOptions sharp_spectral_defaults() {
  SpectralOptions opts;
  opts.dense_limit = 4000;
  opts.request = 3;
  // the bottom of this spectrum is O(1) while lambda_max is O(1/h^2); pick
  // the shift well below the smallest eigenvalue instead of the default
  opts.eigen.sigma_rel = 1e-7;
  return opts;
}

/// c_sharp = sup |T| / sqrt(|sym T|^2 + |Curl T|^2) over Dirichlet tensors,
/// computed as the inverse square root of the smallest eigenvalue of the
/// Korn form.  The operator is strictly positive on these masks, so the
/// kernel is expected empty; a non-empty kernel is reported as is (c_sharp
/// infinite), never patched.
inline SharpRecord sharp_constant(const MaskPtr& mask,
                                  const SpectralOptions& opts = sharp_spectral_defaults()) {
  SharpRecord rec;
  LinearOperator K = korn_form_operator(mask, BcMode::full_dirichlet);
  rec.spectrum = classify_spectrum(K, opts);
  if (rec.spectrum.kernel_dim == 0 && !rec.spectrum.eigenvalues.empty()) {
    rec.lambda_min = rec.spectrum.eigenvalues.front();
    if (rec.lambda_min > 0.0) rec.c_sharp = 1.0 / std::sqrt(rec.lambda_min);
  } else {
    rec.lambda_min = rec.spectrum.eigenvalues.empty()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : rec.spectrum.eigenvalues.front();
    rec.c_sharp = std::numeric_limits<double>::infinity();
  }
  return rec;
}

// ---------------------------------------------------------------------------
// elementary operator-norm bound
// ---------------------------------------------------------------------------

/// Upper bound on |Curl T| / |T| from the stencil: each difference quotient
/// has operator norm at most 2/h and every row component feeds N-1 curl
/// entries, giving |Curl T| <= 2 sqrt(2(N-1)) |T| / h <= 2 sqrt(2N) |T| / h.
inline double curl_operator_bound(const DomainMask& mask) {
  return 2.0 * std::sqrt(2.0 * static_cast<double>(mask.dim())) / mask.h();
}

struct CurlBoundCheck {
  double observed = 0.0; ///< |Curl T| / |T| for the sampled field
  double bound = 0.0;
  bool pass = false;
};

inline CurlBoundCheck check_curl_bound(const MaskPtr& mask, std::uint64_t seed) {
  TensorField T = random_tensor(mask, BcMode::none, seed);
  CurlBoundCheck chk;
  chk.bound = curl_operator_bound(*mask);
  chk.observed = norm(Curl(T)) / std::max(norm(T), 1e-300);
  chk.pass = chk.observed <= chk.bound;
  return chk;
}

} // namespace kornlab
