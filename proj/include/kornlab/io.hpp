#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kornlab/field.hpp"

/// Plain-text snapshots of fields and tensors.  Values are printed with 17
/// significant digits, so write -> read round-trips bit-exactly on IEEE
/// doubles.  The format is line oriented and greppable on purpose:
///
///   kornlab-field 1
///   dim 2
///   shape 17 17
///   spacing 0.0625
///   domain annulus
///   center 0.5 0.5
///   radii 0.5 0.25 0.5 0.3 0.15
///   degree 1
///   bc tangential
///   components 2
///   component 1
///   <num_vertices values, whitespace separated>
///   ...
///   end
///
/// Lines starting with '#' before the first keyword are skipped, so a
/// counterexample dump can carry a structured header (assertion id, ratios,
/// constants) in front of the snapshot and still load with read_tensor.

namespace kornlab {

namespace detail {

inline void write_mask_header(std::ostream& os, const DomainMask& mask) {
  os << "dim " << mask.dim() << "\n";
  os << "shape";
  for (int s : mask.shape()) os << ' ' << s;
  os << "\n";
  os << "spacing " << format_double(mask.h()) << "\n";
  os << "domain " << to_string(mask.kind()) << "\n";
  const DomainGeometry& g = mask.geometry();
  os << "center";
  for (double c : g.center) os << ' ' << format_double(c);
  os << "\n";
  os << "radii " << format_double(g.radius) << ' ' << format_double(g.inner_radius) << ' '
     << format_double(g.outer_radius) << ' ' << format_double(g.ring_radius) << ' '
     << format_double(g.tube_radius) << "\n";
}

inline void skip_comment_lines(std::istream& is) {
  while (is) {
    is >> std::ws;
    if (is.peek() != '#') break;
    std::string line;
    std::getline(is, line);
  }
}

inline std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw IoError(std::string("snapshot: missing ") + what);
  return tok;
}

inline void expect_keyword(std::istream& is, const std::string& keyword) {
  const std::string tok = next_token(is, keyword.c_str());
  if (tok != keyword) throw IoError("snapshot: expected '" + keyword + "', got '" + tok + "'");
}

inline double read_double(std::istream& is, const char* what) {
  double x = 0.0;
  if (!(is >> x)) throw IoError(std::string("snapshot: bad number for ") + what);
  return x;
}

inline int read_int(std::istream& is, const char* what) {
  int x = 0;
  if (!(is >> x)) throw IoError(std::string("snapshot: bad integer for ") + what);
  return x;
}

inline MaskPtr read_mask_header(std::istream& is) {
  expect_keyword(is, "dim");
  const int N = read_int(is, "dim");
  if (N < 1 || N > 32) throw IoError("snapshot: implausible dimension");
  expect_keyword(is, "shape");
  std::vector<int> shape(static_cast<std::size_t>(N));
  for (auto& s : shape) s = read_int(is, "shape");
  expect_keyword(is, "spacing");
  const double h = read_double(is, "spacing");
  expect_keyword(is, "domain");
  const DomainKind kind = parse_domain_kind(next_token(is, "domain"));
  expect_keyword(is, "center");
  DomainGeometry geo;
  geo.center.resize(static_cast<std::size_t>(N));
  for (auto& c : geo.center) c = read_double(is, "center");
  expect_keyword(is, "radii");
  geo.radius = read_double(is, "radius");
  geo.inner_radius = read_double(is, "inner radius");
  geo.outer_radius = read_double(is, "outer radius");
  geo.ring_radius = read_double(is, "ring radius");
  geo.tube_radius = read_double(is, "tube radius");
  return make_domain(kind, geo, shape, h);
}

inline void write_component_values(std::ostream& os, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << format_double(values[i]);
    os << (((i + 1) % 8 == 0 || i + 1 == values.size()) ? '\n' : ' ');
  }
}

} // namespace detail

inline void write_field(std::ostream& os, const FormField& field) {
  os << "kornlab-field 1\n";
  detail::write_mask_header(os, field.mask());
  os << "degree " << field.degree() << "\n";
  os << "bc " << to_string(field.bc_mode()) << "\n";
  os << "components " << field.components() << "\n";
  for (int c = 0; c < field.components(); ++c) {
    os << "component " << c + 1 << "\n";
    detail::write_component_values(os, field.comp(c));
  }
  os << "end\n";
}

inline FormField read_field(std::istream& is) {
  detail::skip_comment_lines(is);
  detail::expect_keyword(is, "kornlab-field");
  if (detail::read_int(is, "format version") != 1)
    throw IoError("snapshot: unsupported field format version");
  MaskPtr mask = detail::read_mask_header(is);
  detail::expect_keyword(is, "degree");
  const int q = detail::read_int(is, "degree");
  detail::expect_keyword(is, "bc");
  const BcMode bc = parse_bc_mode(detail::next_token(is, "bc"));
  detail::expect_keyword(is, "components");
  const int nc = detail::read_int(is, "components");
  FormField field(mask, q, bc);
  if (nc != field.components()) throw IoError("snapshot: component count mismatch");
  for (int c = 0; c < nc; ++c) {
    detail::expect_keyword(is, "component");
    if (detail::read_int(is, "component index") != c + 1)
      throw IoError("snapshot: components out of order");
    auto& values = field.comp(c);
    for (auto& x : values) x = detail::read_double(is, "value");
  }
  detail::expect_keyword(is, "end");
  return field;
}

inline void write_tensor(std::ostream& os, const TensorField& T) {
  os << "kornlab-tensor 1\n";
  detail::write_mask_header(os, T.mask());
  os << "bc " << to_string(T.rows.front().bc_mode()) << "\n";
  os << "rows " << T.dim() << "\n";
  for (int n = 0; n < T.dim(); ++n) {
    for (int m = 0; m < T.dim(); ++m) {
      os << "entry " << n + 1 << ' ' << m + 1 << "\n";
      detail::write_component_values(os, T.rows[static_cast<std::size_t>(n)].comp(m));
    }
  }
  os << "end\n";
}

inline TensorField read_tensor(std::istream& is) {
  detail::skip_comment_lines(is);
  detail::expect_keyword(is, "kornlab-tensor");
  if (detail::read_int(is, "format version") != 1)
    throw IoError("snapshot: unsupported tensor format version");
  MaskPtr mask = detail::read_mask_header(is);
  detail::expect_keyword(is, "bc");
  const BcMode bc = parse_bc_mode(detail::next_token(is, "bc"));
  detail::expect_keyword(is, "rows");
  const int rows = detail::read_int(is, "rows");
  if (rows != mask->dim()) throw IoError("snapshot: row count mismatch");
  TensorField T(mask, bc);
  for (int n = 0; n < rows; ++n) {
    for (int m = 0; m < rows; ++m) {
      detail::expect_keyword(is, "entry");
      const int rn = detail::read_int(is, "row index");
      const int rm = detail::read_int(is, "column index");
      if (rn != n + 1 || rm != m + 1) throw IoError("snapshot: entries out of order");
      auto& values = T.rows[static_cast<std::size_t>(n)].comp(m);
      for (auto& x : values) x = detail::read_double(is, "value");
    }
  }
  detail::expect_keyword(is, "end");
  return T;
}

inline void save_field(const std::string& path, const FormField& field) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_field(os, field);
  if (!os) throw IoError("write to '" + path + "' failed");
}

inline FormField load_field(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_field(is);
}

inline void save_tensor(const std::string& path, const TensorField& T) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_tensor(os, T);
  if (!os) throw IoError("write to '" + path + "' failed");
}

inline TensorField load_tensor(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_tensor(is);
}

} // namespace kornlab
