#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kornlab/numerics.hpp"

/// Matrix-free symmetric linear algebra.  All iterations run in a fixed
/// serial order from seeded starting data, so every result is reproducible.
/// Eigen backs the two dense kernels (the Rayleigh-Ritz projection and the
/// reference oracle); everything operator-sized stays matrix-free.

namespace kornlab {

/// Matrix-free symmetric operator on packed coefficient vectors.
struct LinearOperator {
  std::size_t dim = 0;
  std::function<void(const std::vector<double>&, std::vector<double>&)> apply;
  std::string name;

  std::vector<double> operator()(const std::vector<double>& x) const {
    std::vector<double> y(dim, 0.0);
    apply(x, y);
    return y;
  }
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0; ///< final |b - Ax| / max(|b|, tiny)
  double tolerance = 0.0;
  bool converged = false;
};

namespace detail {

inline void project_out(const std::vector<std::vector<double>>& basis, std::vector<double>& x) {
  for (const auto& u : basis) axpy(-kahan_dot(u, x), u, x);
}

} // namespace detail

/// Orthonormalizes `vectors` in place (modified Gram-Schmidt with one
/// re-orthogonalization pass).  Throws DeflationError if the set is
/// numerically rank deficient.
inline std::vector<std::vector<double>> orthonormalize(std::vector<std::vector<double>> vectors) {
  std::vector<std::vector<double>> out;
  for (auto& v : vectors) {
    const double before = kahan_norm(v);
    if (!(before > 0.0)) throw DeflationError("orthonormalize: zero vector in basis");
    detail::project_out(out, v);
    detail::project_out(out, v); // second pass for numerical orthogonality
    const double after = kahan_norm(v);
    if (after < 1e-10 * before)
      throw DeflationError("orthonormalize: basis is numerically rank deficient");
    scal(1.0 / after, v);
    out.push_back(std::move(v));
  }
  return out;
}

/// Conjugate gradients for symmetric positive (semi-)definite systems.
/// With `deflation` given, the residual is repeatedly projected against that
/// subspace, so consistent singular systems converge on the complement.
/// Breakdown to NaN/Inf raises SolverError.
inline std::pair<std::vector<double>, SolveReport> cg_solve(
    const LinearOperator& A, const std::vector<double>& b, double tol, int max_iterations,
    const std::vector<std::vector<double>>& deflation = {}) {
  if (b.size() != A.dim) throw IncompatibleError("cg_solve: rhs dimension mismatch");
  SolveReport rep;
  rep.tolerance = tol;
  std::vector<double> x(A.dim, 0.0);
  std::vector<double> r = b;
  detail::project_out(deflation, r);
  const double bnorm = std::max(kahan_norm(r), 1e-300);
  std::vector<double> p = r;
  std::vector<double> Ap(A.dim);
  double rr = kahan_dot(r, r);
  double best_rr = rr;
  int since_progress = 0;
  int it = 0;
  while (it < max_iterations) {
    if (std::sqrt(rr) <= tol * bnorm) break;
    // Roundoff floor guard: if the residual has not improved for a long
    // stretch, CG has hit attainable accuracy; stop instead of spinning.
    if (rr < 0.99 * best_rr) {
      best_rr = rr;
      since_progress = 0;
    } else if (++since_progress > 250) {
      break;
    }
    A.apply(p, Ap);
    const double pAp = kahan_dot(p, Ap);
    if (!std::isfinite(pAp) || pAp <= 0.0) {
      if (pAp == 0.0) break; // exact kernel direction on a consistent system
      throw SolverError("cg_solve: breakdown (operator not SPD on the search space)");
    }
    const double alpha = rr / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    if (!deflation.empty()) detail::project_out(deflation, r);
    const double rr_new = kahan_dot(r, r);
    if (!std::isfinite(rr_new)) throw SolverError("cg_solve: residual is not finite");
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    ++it;
  }
  detail::project_out(deflation, x);
  rep.iterations = it;
  rep.residual = std::sqrt(rr) / bnorm;
  rep.converged = rep.residual <= tol;
  return {std::move(x), rep};
}

/// Power-iteration estimate of the largest eigenvalue, used to scale kernel
/// thresholds and the spectral shift.  Fixed iteration count, seeded start.
inline double power_lambda_max(const LinearOperator& A, int iterations = 80,
                               std::uint64_t seed = 0x6b8b4567u) {
  UniformStream rng(seed);
  std::vector<double> v(A.dim);
  for (auto& x : v) x = rng.next();
  double nv = kahan_norm(v);
  if (!(nv > 0.0)) return 0.0;
  scal(1.0 / nv, v);
  std::vector<double> w(A.dim);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    A.apply(v, w);
    lambda = kahan_dot(v, w);
    const double nw = kahan_norm(w);
    if (!(nw > 0.0)) return 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
  }
  return std::abs(lambda);
}

struct EigenOptions {
  std::uint64_t seed = 0x2545F4914F6CDD1DULL; ///< start-block seed, overridable
  double sigma_rel = 1e-4;   ///< spectral shift as a fraction of lambda_ref
  int max_sweeps = 80;       ///< outer block-Krylov sweeps
  int block_padding = 4;     ///< extra block columns beyond k
  int max_basis = 0;         ///< accumulated-subspace cap; 0 = automatic
  double cg_tol = 1e-12;     ///< inner solver relative tolerance
  int cg_max_iterations = 200000;
  bool strict = false;       ///< throw SolverError instead of flagging non-convergence
};

struct EigenReport {
  std::vector<double> eigenvalues; ///< ascending, first k
  std::vector<std::vector<double>> eigenvectors;
  std::vector<double> residuals; ///< per pair, |Av - lambda v| / (|v| * max(lambda_ref, 1))
  double lambda_ref = 0.0;       ///< power-iteration estimate of lambda_max
  double sigma = 0.0;            ///< shift used by the inverted iteration
  std::uint64_t seed = 0;
  int deflation_dimension = 0;
  int sweeps = 0;
  double tolerance = 0.0;
  bool converged = false;
  double symmetry_defect = 0.0; ///< dense path only: max |A_ij - A_ji|
};

/// k smallest eigenpairs of a symmetric positive semi-definite operator,
/// orthogonal to an optional deflation subspace.  Implementation: block
/// Krylov accumulation on (A + sigma I)^-1 with CG inner solves, a
/// Rayleigh-Ritz projection on A over the whole accumulated space, and thick
/// restarts at the basis cap.  Accumulation (rather than per-sweep subspace
/// replacement) is what resolves tightly clustered bottoms: once the basis
/// spans the cluster's invariant subspace, Rayleigh-Ritz separates the
/// individual eigenvalues exactly, however small their relative gaps.  The
/// shift keeps exact kernels perfectly representable: they dominate the
/// inverted spectrum instead of breaking the solve.
inline EigenReport smallest_eigenpairs(const LinearOperator& A, int k,
                                       const std::vector<std::vector<double>>& deflation = {},
                                       double tol = 1e-10, const EigenOptions& opts = {}) {
  if (k < 1) throw IncompatibleError("smallest_eigenpairs: k must be >= 1");
  const std::size_t n = A.dim;
  const auto defl = deflation.empty() ? std::vector<std::vector<double>>{} : orthonormalize(deflation);
  if (static_cast<std::size_t>(k) + defl.size() > n)
    throw IncompatibleError("smallest_eigenpairs: k plus deflation exceeds the space dimension");

  EigenReport rep;
  rep.seed = opts.seed;
  rep.tolerance = tol;
  rep.deflation_dimension = static_cast<int>(defl.size());
  rep.lambda_ref = power_lambda_max(A, 80, opts.seed ^ 0x9e3779b9u);
  const double scale = std::max(rep.lambda_ref, 1e-30);
  rep.sigma = std::max(opts.sigma_rel * scale, 1e-30);
  const double res_scale = std::max(rep.lambda_ref, 1.0);

  const std::size_t free_dim = n - defl.size();
  const int m = std::min<int>(static_cast<int>(free_dim), k + std::max(opts.block_padding, 1));
  const std::size_t cap = std::min<std::size_t>(
      free_dim, opts.max_basis > 0 ? static_cast<std::size_t>(opts.max_basis)
                                   : std::max<std::size_t>(static_cast<std::size_t>(6 * m), 96));

  LinearOperator shifted;
  shifted.dim = n;
  shifted.name = A.name + "+sigma";
  shifted.apply = [&A, &rep](const std::vector<double>& x, std::vector<double>& y) {
    A.apply(x, y);
    axpy(rep.sigma, x, y);
  };

  // accumulated orthonormal basis and its image under A
  std::vector<std::vector<double>> basis, abasis;
  basis.reserve(cap);
  abasis.reserve(cap);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cap),
                                            static_cast<Eigen::Index>(cap));

  // appends orth(col - basis basis^T col), returns false for a null direction
  auto append_column = [&](std::vector<double> col) {
    detail::project_out(defl, col);
    const double before = kahan_norm(col);
    if (!(before > 0.0)) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) axpy(-kahan_dot(b, col), b, col);
    const double after = kahan_norm(col);
    if (!(after > 1e-12 * before)) return false;
    scal(1.0 / after, col);
    std::vector<double> acol(n);
    A.apply(col, acol);
    const std::size_t j = basis.size();
    for (std::size_t i = 0; i < j; ++i) {
      const double hij = kahan_dot(basis[i], acol);
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hij;
      H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = hij;
    }
    H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = kahan_dot(col, acol);
    basis.push_back(std::move(col));
    abasis.push_back(std::move(acol));
    return true;
  };

  // deterministic start block
  {
    UniformStream rng(opts.seed);
    for (int j = 0; j < m; ++j) {
      std::vector<double> col(n);
      for (auto& x : col) x = rng.next();
      append_column(std::move(col));
    }
    if (basis.empty()) throw SolverError("smallest_eigenpairs: degenerate start block");
  }

  // current Ritz data over the accumulated basis
  std::vector<double> ritz;         // ascending Ritz values
  Eigen::MatrixXd V;                // basis-coefficient columns
  std::vector<std::vector<double>> ritz_vec, ritz_avec;

  auto rayleigh_ritz = [&]() {
    const Eigen::Index M = static_cast<Eigen::Index>(basis.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(M, M));
    V = es.eigenvectors();
    ritz.assign(es.eigenvalues().data(), es.eigenvalues().data() + M);
    const int want = std::min<int>(m, static_cast<int>(M));
    ritz_vec.assign(static_cast<std::size_t>(want), std::vector<double>(n, 0.0));
    ritz_avec.assign(static_cast<std::size_t>(want), std::vector<double>(n, 0.0));
    for (int j = 0; j < want; ++j) {
      for (Eigen::Index i = 0; i < M; ++i) {
        const double w = V(i, j);
        if (w != 0.0) {
          axpy(w, basis[static_cast<std::size_t>(i)], ritz_vec[static_cast<std::size_t>(j)]);
          axpy(w, abasis[static_cast<std::size_t>(i)], ritz_avec[static_cast<std::size_t>(j)]);
        }
      }
    }
    // residuals |A y - theta y| / max(lambda_ref, 1) of the k wanted pairs
    rep.residuals.assign(static_cast<std::size_t>(std::min(k, want)), 0.0);
    bool all_converged = static_cast<int>(basis.size()) >= k;
    for (int j = 0; j < std::min(k, want); ++j) {
      std::vector<double> r = ritz_avec[static_cast<std::size_t>(j)];
      axpy(-ritz[static_cast<std::size_t>(j)], ritz_vec[static_cast<std::size_t>(j)], r);
      const double res = kahan_norm(r) / res_scale;
      rep.residuals[static_cast<std::size_t>(j)] = res;
      if (res > tol) all_converged = false;
    }
    return all_converged;
  };

  bool converged = rayleigh_ritz();
  int sweep = 0;
  for (; sweep < opts.max_sweeps && !converged; ++sweep) {
    // thick restart: compress to the leading Ritz vectors before growing
    if (basis.size() + static_cast<std::size_t>(m) > cap && basis.size() > static_cast<std::size_t>(2 * m)) {
      const std::size_t keep =
          std::min<std::size_t>(basis.size() - 1, std::max<std::size_t>(static_cast<std::size_t>(3 * m),
                                                                        static_cast<std::size_t>(k + 2 * m)));
      const Eigen::Index M = static_cast<Eigen::Index>(basis.size());
      std::vector<std::vector<double>> nb(keep, std::vector<double>(n, 0.0));
      std::vector<std::vector<double>> nab(keep, std::vector<double>(n, 0.0));
      for (std::size_t j = 0; j < keep; ++j)
        for (Eigen::Index i = 0; i < M; ++i) {
          const double w = V(i, static_cast<Eigen::Index>(j));
          if (w != 0.0) {
            axpy(w, basis[static_cast<std::size_t>(i)], nb[j]);
            axpy(w, abasis[static_cast<std::size_t>(i)], nab[j]);
          }
        }
      basis = std::move(nb);
      abasis = std::move(nab);
      H.setZero();
      for (std::size_t j = 0; j < keep; ++j)
        H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = ritz[j];
    }

    // grow: invert the leading non-settled Ritz vectors (start block on sweep 0)
    int appended = 0;
    const int live = static_cast<int>(ritz_vec.size());
    for (int j = 0; j < live && appended < m; ++j) {
      if (j < static_cast<int>(rep.residuals.size()) && rep.residuals[static_cast<std::size_t>(j)] <= 0.01 * tol)
        continue; // settled pair: inverting it adds nothing new
      auto [y, cg] = cg_solve(shifted, ritz_vec[static_cast<std::size_t>(j)], opts.cg_tol,
                              opts.cg_max_iterations, defl);
      if (!cg.converged && opts.strict)
        throw SolverError("smallest_eigenpairs: inner solve did not converge");
      if (append_column(std::move(y))) ++appended;
      if (basis.size() == free_dim) break;
    }

    converged = rayleigh_ritz();
    if (appended == 0 || basis.size() == free_dim) {
      ++sweep; // saturated: the space is invariant (or everything); RR is final
      break;
    }
  }

  rep.sweeps = sweep;
  rep.converged = converged;
  if (!converged && opts.strict)
    throw SolverError("smallest_eigenpairs: Ritz residuals above tolerance after max sweeps");
  rep.eigenvalues.assign(ritz.begin(), ritz.begin() + std::min<std::size_t>(ritz.size(), static_cast<std::size_t>(k)));
  rep.eigenvectors.assign(ritz_vec.begin(),
                          ritz_vec.begin() + std::min<std::size_t>(ritz_vec.size(), static_cast<std::size_t>(k)));
  return rep;
}

/// Dense reference path: materializes the operator column by column, checks
/// symmetry, and solves the full spectrum with Eigen.  Guarded by a hard DOF
/// cap; larger requests are refused rather than attempted.
inline EigenReport dense_eigen_oracle(const LinearOperator& A, std::size_t dof_limit = 4000) {
  const std::size_t n = A.dim;
  if (n > dof_limit)
    throw DofLimitError("dense_eigen_oracle: " + std::to_string(n) +
                        " DOFs exceed the cap of " + std::to_string(dof_limit));
  Eigen::MatrixXd M(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    A.apply(e, col);
    for (std::size_t i = 0; i < n; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  EigenReport rep;
  rep.symmetry_defect = (M - M.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  rep.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  rep.eigenvectors.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    rep.eigenvectors[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) rep.eigenvectors[j][i] = es.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  rep.lambda_ref = rep.eigenvalues.empty() ? 0.0 : std::abs(rep.eigenvalues.back());
  rep.converged = true;
  return rep;
}

} // namespace kornlab
