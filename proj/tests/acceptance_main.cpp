// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
//
// Every check runs at its stated tolerance against either a closed-form value,
// an independent dense oracle, or an invariant of the discrete complex.  A
// criterion that cannot be met is reported as FAIL with the offending numbers;
// nothing is weakened or skipped silently.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "kornlab/experiment.hpp"

#ifndef KORNLAB_CLI_PATH
#error "KORNLAB_CLI_PATH must point at the command-line binary"
#endif

using namespace kornlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// shipped domain/resolution table
// ---------------------------------------------------------------------------

struct ShippedEntry {
  DomainKind kind;
  int N;
  int res;
  /// expected dim of the degree-1 harmonic space with vanishing tangential
  /// trace (the relative cohomology b_{N-1} of the mask)
  int betti_q1;
};

const std::vector<ShippedEntry>& shipped_table() {
  static const std::vector<ShippedEntry> table = {
      {DomainKind::box, 2, 17, 0},     {DomainKind::box, 2, 33, 0},
      {DomainKind::box, 2, 65, 0},     {DomainKind::box, 3, 9, 0},
      {DomainKind::box, 3, 17, 0},     {DomainKind::box, 4, 9, 0},
      {DomainKind::ball, 2, 17, 0},    {DomainKind::ball, 2, 33, 0},
      {DomainKind::annulus, 2, 17, 1}, {DomainKind::annulus, 2, 33, 1},
      {DomainKind::ball, 3, 17, 0},    {DomainKind::shell, 3, 17, 1},
      {DomainKind::solid_torus, 3, 17, 0},
  };
  return table;
}

std::string entry_name(const ShippedEntry& e) {
  std::ostringstream os;
  os << to_string(e.kind) << e.N << "d@" << e.res;
  return os.str();
}

// Constants are shared between criteria (the Maxwell constant of a mask is
// the same object in criteria 4, 6 and 7); cache the spectra so each is
// computed once and timing stays attributable.
using CacheKey = std::tuple<int, int, int>; // kind, N, res

CacheKey key_of(const ShippedEntry& e) { return {static_cast<int>(e.kind), e.N, e.res}; }

MaskPtr shipped_mask(const ShippedEntry& e) { return unit_domain(e.kind, e.N, e.res); }

std::map<CacheKey, SpectralRecord> g_poincare;
std::map<CacheKey, SpectralRecord> g_maxwell;
std::map<CacheKey, SharpRecord> g_sharp;

const SpectralRecord& cached_poincare(const ShippedEntry& e) {
  auto it = g_poincare.find(key_of(e));
  if (it == g_poincare.end())
    it = g_poincare.emplace(key_of(e), poincare_spectrum(shipped_mask(e), 0,
                                                         BcMode::full_dirichlet))
             .first;
  return it->second;
}

const SpectralRecord& cached_maxwell(const ShippedEntry& e) {
  auto it = g_maxwell.find(key_of(e));
  if (it == g_maxwell.end()) {
    SpectralOptions opts;
    opts.expected_kernel = e.betti_q1; // batch hint only; classification adapts
    it = g_maxwell.emplace(key_of(e),
                           poincare_spectrum(shipped_mask(e), 1, BcMode::tangential, opts))
             .first;
  }
  return it->second;
}

const SharpRecord& cached_sharp(const ShippedEntry& e) {
  auto it = g_sharp.find(key_of(e));
  if (it == g_sharp.end()) it = g_sharp.emplace(key_of(e), sharp_constant(shipped_mask(e))).first;
  return it->second;
}

double c_hat_of(const ShippedEntry& e) {
  return std::max(2.0, std::sqrt(5.0) * cached_maxwell(e).constant);
}

// ---------------------------------------------------------------------------
// criterion 1: d(dE) = 0 and <dE, H> = -<E, delta H> at roundoff scale
// ---------------------------------------------------------------------------

bool criterion1(std::string& detail) {
  const BcMode modes[] = {BcMode::none, BcMode::tangential, BcMode::full_dirichlet};
  const struct {
    int N, res;
  } grids[] = {{2, 17}, {3, 9}, {4, 7}};
  double worst_dd = 0.0, worst_dual = 0.0;
  bool ok = true;
  std::uint64_t seed = 100;
  for (const auto& g : grids) {
    MaskPtr box = unit_domain(DomainKind::box, g.N, g.res);
    const double h = box->h();
    for (int q = 0; q + 2 <= g.N; ++q) {
      for (BcMode mode : modes) {
        FormField E = random_field(box, q, mode, ++seed);
        FormField dd = exterior_derivative(exterior_derivative(E));
        const double rel = norm(dd) * h * h / std::max(norm(E), 1e-300);
        worst_dd = std::max(worst_dd, rel);
        ok = ok && rel <= 1e-13;
      }
      FormField E = random_field(box, q, BcMode::none, ++seed);
      FormField H = random_field(box, q + 1, BcMode::none, ++seed);
      const double lhs = inner_product(exterior_derivative(E), H);
      const double rhs = -inner_product(E, coderivative(H));
      const double rel = std::abs(lhs - rhs) * h / std::max(norm(E) * norm(H), 1e-300);
      worst_dual = std::max(worst_dual, rel);
      ok = ok && rel <= 1e-13;
    }
  }
  detail = "worst scaled d.d " + fmt(worst_dd) + ", worst scaled adjointness " + fmt(worst_dual) +
           " (tolerance 1e-13)";
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 2: the pointwise Korn identity over 10^3 random Dirichlet fields
// ---------------------------------------------------------------------------

bool criterion2(std::string& detail) {
  const double ratio_cap = std::sqrt(2.0) + 1e-10;
  double worst_defect = 0.0, worst_ratio = 0.0;
  bool ok = true;
  for (int N : {2, 3}) {
    MaskPtr box = unit_domain(DomainKind::box, N, N == 2 ? 17 : 9);
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
      KornReport rep = korn_check(box, seed, KornVariant::dirichlet);
      worst_defect = std::max(worst_defect, rep.identity_defect);
      worst_ratio = std::max(worst_ratio, rep.ratio);
      ok = ok && rep.identity_defect <= 1e-13 && rep.ratio <= ratio_cap && !rep.zero_flagged;
    }
  }
  detail = "2000 seeds; worst identity defect " + fmt(worst_defect) + " (tol 1e-13), worst ratio " +
           fmt(worst_ratio) + " (cap sqrt(2)+1e-10)";
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 3: the scalar constant against its closed-form continuum limit
// ---------------------------------------------------------------------------

bool criterion3(std::string& detail) {
  const double exact2 = 1.0 / (kPi * std::sqrt(2.0));
  const double exact3 = 1.0 / (kPi * std::sqrt(3.0));

  const double c17 = cached_poincare({DomainKind::box, 2, 17, 0}).constant;
  const double c33 = cached_poincare({DomainKind::box, 2, 33, 0}).constant;
  const double c65 = cached_poincare({DomainKind::box, 2, 65, 0}).constant;

  const double rel65 = std::abs(c65 - exact2) / exact2;

  // Richardson extrapolation along the dyadic ladder 17 -> 33 -> 65
  const double rate = std::log2((c17 - c33) / (c33 - c65));
  const double limit = c65 + (c65 - c33) / (std::pow(2.0, rate) - 1.0);
  const double rel_extrap = std::abs(limit - exact2) / exact2;

  SpectralRecord p3 = poincare_spectrum(unit_domain(DomainKind::box, 3, 33), 0,
                                        BcMode::full_dirichlet);
  const double rel3 = std::abs(p3.constant - exact3) / exact3;

  const bool ok = std::isfinite(rate) && rel65 <= 0.02 && rel_extrap <= 0.005 && rel3 <= 0.03;
  detail = "square: value off by " + fmt(rel65) + " (cap 0.02), extrapolated off by " +
           fmt(rel_extrap) + " (cap 0.005, order " + fmt(rate) + "); cube: off by " + fmt(rel3) +
           " (cap 0.03)";
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 4: the tangential constant: continuum limit and dense agreement
// ---------------------------------------------------------------------------

bool criterion4(std::string& detail) {
  const double exact = 1.0 / kPi;
  const double c65 = cached_maxwell({DomainKind::box, 2, 65, 0}).constant;
  const double rel65 = std::abs(c65 - exact) / exact;

  MaskPtr small = unit_domain(DomainKind::box, 2, 9);
  SpectralOptions iter_opts; // dense_limit = 0: iterative path
  SpectralRecord it_rec = poincare_spectrum(small, 1, BcMode::tangential, iter_opts);
  SpectralOptions dense_opts;
  dense_opts.dense_limit = 4000;
  SpectralRecord de_rec = poincare_spectrum(small, 1, BcMode::tangential, dense_opts);
  const double rel_oracle = std::abs(it_rec.constant - de_rec.constant) / de_rec.constant;

  const bool ok = rel65 <= 0.03 && de_rec.dense_path && !it_rec.dense_path && rel_oracle <= 1e-8;
  detail = "65^2 value off by " + fmt(rel65) + " (cap 0.03); 9^2 iterative vs dense " +
           fmt(rel_oracle) + " (cap 1e-8)";
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 5: harmonic-space dimensions and kernel gaps across the table
// ---------------------------------------------------------------------------

bool criterion5(std::string& detail) {
  bool ok = true;
  double worst_gap = std::numeric_limits<double>::infinity();
  std::string worst_case = "-";
  std::string mismatches;

  auto grade = [&](const std::string& label, const SpectralRecord& rec, int expected_kernel) {
    if (rec.kernel_dim != expected_kernel) {
      ok = false;
      mismatches += " " + label + " kernel " + std::to_string(rec.kernel_dim) + " (want " +
                    std::to_string(expected_kernel) + ")";
    }
    if (!(rec.gap_ratio >= 10.0)) ok = false;
    if (rec.gap_ratio < worst_gap) {
      worst_gap = rec.gap_ratio;
      worst_case = label;
    }
  };

  // degree-1 spectra with vanishing tangential trace: the relative
  // (Dirichlet) harmonic fields, shared with the Maxwell-constant records
  for (const ShippedEntry& e : shipped_table())
    grade(entry_name(e) + " q=1", cached_maxwell(e), e.betti_q1);

  {
    // the sealed-tube degree-2 class of the solid torus
    const ShippedEntry torus{DomainKind::solid_torus, 3, 17, 0};
    SpectralOptions opts;
    opts.expected_kernel = 1;
    grade("solid_torus3d@17 q=2",
          harmonic_spectrum(shipped_mask(torus), 2, BcMode::tangential, opts), 1);
  }

  detail = "smallest kernel gap " + fmt(worst_gap) + " at " + worst_case + " (floor 10)";
  if (!mismatches.empty()) detail += "; dimension mismatches:" + mismatches;
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 6: the sharp constant never exceeds c_hat, and the full
// decomposition chain holds for random Dirichlet tensors
// ---------------------------------------------------------------------------

bool criterion6(std::string& detail) {
  bool ok = true;
  double worst_slack = -std::numeric_limits<double>::infinity();
  std::string worst_case = "-";
  for (const ShippedEntry& e : shipped_table()) {
    const double c_hat = c_hat_of(e);
    const SharpRecord& sharp = cached_sharp(e);
    const double slack = sharp.c_sharp - c_hat;
    if (!(slack <= 1e-8)) ok = false;
    if (slack > worst_slack) {
      worst_slack = slack;
      worst_case = entry_name(e);
    }
  }

  double min_margin = std::numeric_limits<double>::infinity();
  int chain_failures = 0;
  const ShippedEntry chain_grids[] = {
      {DomainKind::box, 2, 33, 0}, {DomainKind::box, 3, 17, 0}, {DomainKind::box, 4, 9, 0}};
  for (const ShippedEntry& e : chain_grids) {
    MaskPtr mask = shipped_mask(e);
    const double c_m = cached_maxwell(e).constant;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      ChainReport rep = main_lemma_chain(mask, seed, c_m, 1e-8);
      if (!rep.all_pass) ++chain_failures;
      min_margin = std::min(min_margin, rep.margin);
    }
  }
  ok = ok && chain_failures == 0;

  detail = "max c_sharp - c_hat = " + fmt(worst_slack) + " at " + worst_case +
           " (cap 1e-8); 300 chains, " + std::to_string(chain_failures) +
           " failures, min final margin " + fmt(min_margin);
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 7: every constant on operators of <= 4000 unknowns agrees with
// the dense oracle to 1e-8 relative
// ---------------------------------------------------------------------------

bool criterion7(std::string& detail) {
  bool ok = true;
  double worst_rel = 0.0;
  std::string worst_case = "-";
  int compared = 0;
  std::string mismatches;

  auto compare = [&](const std::string& label, int kernel_it, int kernel_de, double c_it,
                     double c_de) {
    ++compared;
    if (kernel_it != kernel_de) {
      ok = false;
      mismatches += " " + label + " kernel " + std::to_string(kernel_it) + " vs " +
                    std::to_string(kernel_de);
      return;
    }
    const double rel = std::abs(c_it - c_de) / std::abs(c_de);
    if (rel > worst_rel) {
      worst_rel = rel;
      worst_case = label;
    }
    if (!(rel <= 1e-8)) ok = false;
  };

  for (const ShippedEntry& e : shipped_table()) {
    MaskPtr mask = shipped_mask(e);

    if (maxwell_form_operator(mask, 0, BcMode::full_dirichlet).dim <= 4000) {
      SpectralOptions dense;
      dense.dense_limit = 4000;
      SpectralRecord de = poincare_spectrum(mask, 0, BcMode::full_dirichlet, dense);
      const SpectralRecord& it = cached_poincare(e); // iterative by construction
      compare(entry_name(e) + " scalar", it.kernel_dim, de.kernel_dim, it.constant, de.constant);
    }

    if (maxwell_form_operator(mask, 1, BcMode::tangential).dim <= 4000) {
      SpectralOptions dense;
      dense.dense_limit = 4000;
      dense.expected_kernel = e.betti_q1; // matches the tangential kernel on this table
      SpectralRecord de = poincare_spectrum(mask, 1, BcMode::tangential, dense);
      const SpectralRecord& it = cached_maxwell(e);
      compare(entry_name(e) + " tangential", it.kernel_dim, de.kernel_dim, it.constant,
              de.constant);
    }

    if (korn_form_operator(mask, BcMode::full_dirichlet).dim <= 4000) {
      const SharpRecord& de = cached_sharp(e); // dense path at these sizes
      SpectralOptions iter = sharp_spectral_defaults();
      iter.dense_limit = 0;
      SharpRecord it = sharp_constant(mask, iter);
      if (!de.spectrum.dense_path) {
        ok = false;
        mismatches += " " + entry_name(e) + " sharp reference not dense";
      } else {
        compare(entry_name(e) + " sharp", it.spectrum.kernel_dim, de.spectrum.kernel_dim,
                it.c_sharp, de.c_sharp);
      }
    }
  }

  detail = std::to_string(compared) + " constants compared, worst relative gap " + fmt(worst_rel) +
           " at " + worst_case + " (cap 1e-8)";
  if (!mismatches.empty()) detail += "; mismatches:" + mismatches;
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 8: byte-identical reports from repeated deterministic runs
// ---------------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return {};
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

bool criterion8(std::string& detail) {
  // the two invocations are byte-identical commands; stdout is captured by the
  // shell so the report text itself carries no run-specific paths
  const std::string base = std::string(KORNLAB_CLI_PATH) +
                           " verify --domain box --N 2 --resolution 9"
                           " --seed 1 --seed 2 --seed 3 --deterministic-sum";
  int codes[2] = {-1, -1};
  for (int i = 0; i < 2; ++i) {
    const std::string cmd =
        base + " > accept_verify_" + char('a' + i) + ".csv 2> /dev/null";
    const int status = std::system(cmd.c_str());
    codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string a = slurp("accept_verify_a.csv");
  const std::string b = slurp("accept_verify_b.csv");
  const bool identical = !a.empty() && a == b;
  const bool ok = identical && codes[0] == 0 && codes[1] == 0;
  detail = "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) +
           ", reports " + (identical ? "byte-identical" : "DIFFER") + " (" +
           std::to_string(a.size()) + " bytes)";
  return ok;
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  bool (*fn)(std::string&);
};

} // namespace

int main() {
  const Criterion criteria[] = {
      {1, "cochain identity and exact adjointness", criterion1},
      {2, "pointwise Korn identity on random Dirichlet fields", criterion2},
      {3, "scalar constant vs continuum limit", criterion3},
      {4, "tangential constant vs continuum limit and dense oracle", criterion4},
      {5, "harmonic dimensions and kernel gaps", criterion5},
      {6, "sharp constant below c_hat and full inequality chains", criterion6},
      {7, "iterative constants vs dense oracle at <= 4000 unknowns", criterion7},
      {8, "deterministic byte-identical reports", criterion8},
  };

  int failures = 0;
  const auto t_start = std::chrono::steady_clock::now();
  for (const Criterion& c : criteria) {
    std::string detail;
    bool pass = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      pass = c.fn(detail);
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1f s) -- %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  std::printf("acceptance: %d/8 criteria passed (%.1f s total)\n", 8 - failures, total);
  return failures == 0 ? 0 : 1;
}
