#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "kornlab/errors.hpp"

/// Combinatorial layer shared by every differential operator: strictly
/// increasing multi-indices label the scalar components of a discrete q-form,
/// and the incidence tables encode which forward difference of which source
/// component lands in which target component, with which sign.

namespace kornlab {

/// Strictly increasing sequence of axis labels, 1-based at the API boundary.
/// A q-form component in ambient dimension N is identified by one of these
/// with degree() == q and entries drawn from {1, ..., N}.
struct MultiIndex {
  std::vector<int> entries; ///< strictly increasing, values in 1..ambient
  int ambient = 0;          ///< ambient dimension N

  int degree() const { return static_cast<int>(entries.size()); }
  bool contains(int axis) const {
    for (int e : entries)
      if (e == axis) return true;
    return false;
  }
  bool operator==(const MultiIndex& o) const {
    return ambient == o.ambient && entries == o.entries;
  }
};

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// One signed adjacency between a degree-q component and a degree-(q+1)
/// component.  Applying the exterior derivative adds
///   sign * (forward difference along `direction` of source component)
/// into the target component; the coderivative is the exact negative
/// transpose of the same table with backward differences.
struct IncidenceEntry {
  MultiIndex source_index; ///< degree q
  MultiIndex target_index; ///< degree q+1, source plus `direction`
  int direction = 0;       ///< inserted axis, 1-based
  int sign = 0;            ///< (-1)^(number of source entries below direction)
  int source_rank = 0;     ///< position of source in lexicographic enumeration
  int target_rank = 0;     ///< position of target in lexicographic enumeration
};

namespace detail {

inline void check_degree(int N, int q, int lo, int hi, const char* who) {
  if (N < 1) throw DegreeError(std::string(who) + ": ambient dimension must be >= 1");
  if (q < lo || q > hi)
    throw DegreeError(std::string(who) + ": degree " + std::to_string(q) +
                      " out of range [" + std::to_string(lo) + "," + std::to_string(hi) +
                      "] for N=" + std::to_string(N));
}

inline std::vector<MultiIndex> build_index_list(int N, int q) {
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(binomial(N, q)));
  std::vector<int> c(q);
  for (int i = 0; i < q; ++i) c[i] = i + 1;
  if (q == 0) {
    out.push_back(MultiIndex{{}, N});
    return out;
  }
  while (true) {
    out.push_back(MultiIndex{c, N});
    // advance to the next strictly increasing tuple in lexicographic order
    int pos = q - 1;
    while (pos >= 0 && c[pos] == N - (q - 1 - pos)) --pos;
    if (pos < 0) break;
    ++c[pos];
    for (int i = pos + 1; i < q; ++i) c[i] = c[i - 1] + 1;
  }
  return out;
}

/// Lexicographic rank of a strictly increasing tuple among all C(N,q) tuples.
inline int combination_rank(const std::vector<int>& c, int N) {
  const int q = static_cast<int>(c.size());
  long rank = 0;
  int prev = 0;
  for (int i = 0; i < q; ++i) {
    for (int v = prev + 1; v < c[i]; ++v) rank += binomial(N - v, q - 1 - i);
    prev = c[i];
  }
  return static_cast<int>(rank);
}

inline std::vector<IncidenceEntry> build_incidence(int N, int q) {
  std::vector<IncidenceEntry> table;
  if (q == N) return table; // no higher degree: empty table, not an error
  const auto sources = build_index_list(N, q);
  table.reserve(sources.size() * static_cast<std::size_t>(N - q));
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const MultiIndex& I = sources[s];
    for (int dir = 1; dir <= N; ++dir) {
      if (I.contains(dir)) continue;
      std::vector<int> t;
      t.reserve(I.entries.size() + 1);
      int smaller = 0;
      bool inserted = false;
      for (int e : I.entries) {
        if (!inserted && e > dir) {
          t.push_back(dir);
          inserted = true;
        }
        if (e < dir) ++smaller;
        t.push_back(e);
      }
      if (!inserted) t.push_back(dir);
      IncidenceEntry entry;
      entry.source_index = I;
      entry.target_index = MultiIndex{t, N};
      entry.direction = dir;
      entry.sign = (smaller % 2 == 0) ? 1 : -1;
      entry.source_rank = static_cast<int>(s);
      entry.target_rank = combination_rank(t, N);
      table.push_back(std::move(entry));
    }
  }
  return table;
}

inline std::vector<std::uint32_t> build_axis_masks(int N, int q) {
  const auto list = build_index_list(N, q);
  std::vector<std::uint32_t> masks;
  masks.reserve(list.size());
  for (const auto& mi : list) {
    std::uint32_t m = 0;
    for (int e : mi.entries) m |= (1u << (e - 1));
    masks.push_back(m);
  }
  return masks;
}

/// Process-wide caches keyed by (N, q).  Tables are immutable once built;
/// the mutex only guards first-use insertion, reads return stable references.
template <typename T, T (*Builder)(int, int)>
const T& cached_table(int N, int q) {
  static std::map<std::pair<int, int>, T> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find({N, q});
  if (it == cache.end()) it = cache.emplace(std::make_pair(N, q), Builder(N, q)).first;
  return it->second;
}

} // namespace detail

/// All C(N,q) multi-indices of degree q in lexicographic order.  This order
/// defines the component layout of every q-form in the library.
inline const std::vector<MultiIndex>& multi_index_list(int N, int q) {
  detail::check_degree(N, q, 0, N, "multi_index_list");
  return detail::cached_table<std::vector<MultiIndex>, detail::build_index_list>(N, q);
}

/// Signed incidence table between degrees q and q+1.  q == N yields an empty
/// table; degrees outside [0, N] are rejected.
inline const std::vector<IncidenceEntry>& incidence_table(int N, int q) {
  detail::check_degree(N, q, 0, N, "incidence_table");
  return detail::cached_table<std::vector<IncidenceEntry>, detail::build_incidence>(N, q);
}

/// Bitmask over axes (bit a-1 for axis a) of each degree-q component, in the
/// same order as multi_index_list.  Used by the boundary-condition rules.
inline const std::vector<std::uint32_t>& component_axis_masks(int N, int q) {
  detail::check_degree(N, q, 0, N, "component_axis_masks");
  return detail::cached_table<std::vector<std::uint32_t>, detail::build_axis_masks>(N, q);
}

inline int num_components(int N, int q) {
  detail::check_degree(N, q, 0, N, "num_components");
  return static_cast<int>(binomial(N, q));
}

} // namespace kornlab
