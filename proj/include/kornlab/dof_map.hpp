#pragma once

#include <cstdint>
#include <vector>

#include "kornlab/field.hpp"

/// Packing between fields and solver vectors.  Solvers see only the free
/// degrees of freedom of a (mask, degree, bc mode) triple, in a fixed order
/// (components lexicographic, vertices row-major), so constrained entries can
/// never leak into a Krylov space or an eigenbasis.

namespace kornlab {

class DofMap {
public:
  DofMap(MaskPtr mask, int q, BcMode mode) : mask_(std::move(mask)), q_(q), mode_(mode) {
    const auto& masks = component_axis_masks(mask_->dim(), q_);
    const std::size_t nv = mask_->num_vertices();
    for (std::size_t c = 0; c < masks.size(); ++c)
      for (std::size_t v = 0; v < nv; ++v)
        if (dof_is_free(*mask_, masks[c], v, mode_)) entries_.push_back({static_cast<int>(c), v});
  }

  std::size_t dim() const { return entries_.size(); }
  const MaskPtr& mask_ptr() const { return mask_; }
  int degree() const { return q_; }
  BcMode mode() const { return mode_; }

  void pack(const FormField& f, std::vector<double>& x) const {
    x.resize(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i)
      x[i] = f.at(entries_[i].comp, entries_[i].vertex);
  }

  /// Writes packed values into the free DOFs of `f` and zeroes the rest.
  void unpack(const std::vector<double>& x, FormField& f) const {
    f.set_zero();
    for (std::size_t i = 0; i < entries_.size(); ++i)
      f.at(entries_[i].comp, entries_[i].vertex) = x[i];
  }

  FormField unpack(const std::vector<double>& x) const {
    FormField f(mask_, q_, mode_);
    unpack(x, f);
    return f;
  }

private:
  struct Entry {
    int comp;
    std::size_t vertex;
  };
  MaskPtr mask_;
  int q_;
  BcMode mode_;
  std::vector<Entry> entries_;
};

/// Row-wise map for tensor fields: N copies of the 1-form map, concatenated.
class TensorDofMap {
public:
  TensorDofMap(MaskPtr mask, BcMode mode) : row_map_(std::move(mask), 1, mode) {}

  std::size_t dim() const { return row_map_.dim() * static_cast<std::size_t>(row_map_.mask_ptr()->dim()); }
  const DofMap& row_map() const { return row_map_; }

  void pack(const TensorField& T, std::vector<double>& x) const {
    const std::size_t rd = row_map_.dim();
    x.resize(dim());
    std::vector<double> tmp;
    for (int n = 0; n < T.dim(); ++n) {
      row_map_.pack(T.rows[static_cast<std::size_t>(n)], tmp);
      std::copy(tmp.begin(), tmp.end(), x.begin() + static_cast<std::ptrdiff_t>(rd * static_cast<std::size_t>(n)));
    }
  }

  void unpack(const std::vector<double>& x, TensorField& T) const {
    const std::size_t rd = row_map_.dim();
    std::vector<double> tmp(rd);
    for (int n = 0; n < T.dim(); ++n) {
      std::copy(x.begin() + static_cast<std::ptrdiff_t>(rd * static_cast<std::size_t>(n)),
                x.begin() + static_cast<std::ptrdiff_t>(rd * static_cast<std::size_t>(n + 1)), tmp.begin());
      row_map_.unpack(tmp, T.rows[static_cast<std::size_t>(n)]);
    }
  }

  TensorField unpack(const std::vector<double>& x) const {
    TensorField T(row_map_.mask_ptr(), row_map_.mode());
    unpack(x, T);
    return T;
  }

private:
  DofMap row_map_;
};

} // namespace kornlab
