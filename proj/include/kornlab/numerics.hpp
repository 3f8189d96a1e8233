#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "kornlab/errors.hpp"

namespace kornlab {

/// Compensated (Kahan) accumulator.  Every reduction in the library runs
/// through one of these in a fixed serial order, so results are reproducible
/// bit for bit and the summation error stays at a few ulp independent of the
/// number of terms.
class KahanAccumulator {
public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw IncompatibleError("kahan_dot: size mismatch");
  KahanAccumulator acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(a[i] * b[i]);
  return acc.value();
}

inline double kahan_norm(const std::vector<double>& a) {
  KahanAccumulator acc;
  for (double v : a) acc.add(v * v);
  return std::sqrt(acc.value());
}

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  if (x.size() != y.size()) throw IncompatibleError("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scal(double alpha, std::vector<double>& x) {
  for (double& v : x) v *= alpha;
}

/// Deterministic uniform draw in [-1, 1].  The mapping from raw 64-bit output
/// to double is spelled out here (rather than std::uniform_real_distribution)
/// so streams are identical across standard libraries.
class UniformStream {
public:
  explicit UniformStream(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  double next() {
    // splitmix64 step; fixed algorithm, platform independent
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53; // [0,1)
    return 2.0 * u - 1.0;
  }

private:
  std::uint64_t state_;
};

/// Shortest-round-trip style formatting used by every report writer; fixed
/// format string keeps serialized output byte-stable.
inline std::string format_double(double x, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return std::string(buf);
}

inline bool is_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

} // namespace kornlab
