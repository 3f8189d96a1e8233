#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kornlab/analysis.hpp"
#include "kornlab/io.hpp"

/// Experiment campaigns behind the command-line tool: run configuration
/// (key/value file plus flag overrides), the five commands (constants,
/// verify, korn, betti, convergence), and report rendering.  Reports are
/// plot-ready tables in CSV or JSON with a fixed, versioned column order;
/// every floating-point cell is printed with 17 significant digits, so for a
/// fixed config and seed the output is byte-stable on one platform.

namespace kornlab {

inline constexpr const char* tool_name = "kornlab";
inline constexpr const char* tool_version = "1.0.0";

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  DomainKind domain = DomainKind::box;
  DomainGeometry geometry{};
  int N = 2;
  std::vector<int> resolutions{17, 33};
  /// Mode for the harmonic/Betti tables and the Korn variant selection
  /// (tangential picks the boundary-constant Korn variant).  The verify
  /// command always draws its tensor fields with full Dirichlet support,
  /// which is the hypothesis of the inequality it certifies.
  BcMode bc_mode = BcMode::tangential;
  std::vector<std::uint64_t> seeds{1};
  double cg_tol = 1e-12;
  double eig_tol = 1e-10;
  double chain_tol = 1e-8;
  std::string format = "csv"; ///< csv | json
  std::string out_path;       ///< in addition to stdout; empty = stdout only
  std::string dump_dir = "."; ///< counterexample snapshots land here
  std::string field_class = "random"; ///< random | gradient | skew (verify)
  bool deterministic_sum = false;     ///< zero timings so reports are byte-stable

  void validate() const {
    if (N < 1 || N > 5) throw ConfigError("config: N must be in [1,5]");
    if (resolutions.empty()) throw ConfigError("config: need at least one resolution");
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
      if (resolutions[i] < 3) throw ConfigError("config: resolutions must be >= 3");
      if (i > 0 && resolutions[i] <= resolutions[i - 1])
        throw ConfigError("config: resolutions must be strictly increasing");
    }
    if (seeds.empty()) throw ConfigError("config: need at least one seed");
    if (!(cg_tol > 0.0) || !(eig_tol > 0.0) || !(chain_tol > 0.0))
      throw ConfigError("config: tolerances must be positive");
    if (format != "csv" && format != "json")
      throw ConfigError("config: format must be csv or json");
    if (field_class != "random" && field_class != "gradient" && field_class != "skew")
      throw ConfigError("config: field_class must be random, gradient or skew");
  }

  /// Every knob with its effective value, defaults included, in a fixed
  /// order; echoed into each report so runs are auditable.
  std::vector<std::pair<std::string, std::string>> echo() const {
    std::vector<std::pair<std::string, std::string>> kv;
    auto list_int = [](const std::vector<int>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
      return s;
    };
    auto list_u64 = [](const std::vector<std::uint64_t>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
      return s;
    };
    kv.emplace_back("domain", to_string(domain));
    kv.emplace_back("N", std::to_string(N));
    kv.emplace_back("resolutions", list_int(resolutions));
    kv.emplace_back("bc_mode", to_string(bc_mode));
    kv.emplace_back("seeds", list_u64(seeds));
    kv.emplace_back("cg_tol", format_double(cg_tol));
    kv.emplace_back("eig_tol", format_double(eig_tol));
    kv.emplace_back("chain_tol", format_double(chain_tol));
    kv.emplace_back("format", format);
    kv.emplace_back("out", out_path);
    kv.emplace_back("dump_dir", dump_dir);
    kv.emplace_back("field_class", field_class);
    kv.emplace_back("deterministic_sum", deterministic_sum ? "true" : "false");
    if (geometry.center.empty()) {
      kv.emplace_back("center", "auto");
    } else {
      std::string s;
      for (std::size_t i = 0; i < geometry.center.size(); ++i)
        s += (i ? " " : "") + format_double(geometry.center[i]);
      kv.emplace_back("center", s);
    }
    kv.emplace_back("radius", format_double(geometry.radius));
    kv.emplace_back("inner_radius", format_double(geometry.inner_radius));
    kv.emplace_back("outer_radius", format_double(geometry.outer_radius));
    kv.emplace_back("ring_radius", format_double(geometry.ring_radius));
    kv.emplace_back("tube_radius", format_double(geometry.tube_radius));
    return kv;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": '" + s + "'");
  }
}

inline int parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": '" + s + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: bad seed for " + key + ": '" + s + "'");
  }
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + s + "'");
}

} // namespace detail

/// Applies one key/value pair to the config.  Shared between the config-file
/// parser and the flag overrides so both spell keys the same way.
inline void apply_config_entry(ExperimentConfig& cfg, std::string key, const std::string& value) {
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "domain") {
    cfg.domain = parse_domain_kind(value);
  } else if (key == "N" || key == "n" || key == "dimension") {
    cfg.N = detail::parse_int(value, key);
  } else if (key == "resolutions" || key == "resolution") {
    cfg.resolutions.clear();
    for (const auto& t : detail::split_list(value))
      cfg.resolutions.push_back(detail::parse_int(t, key));
  } else if (key == "seeds" || key == "seed") {
    cfg.seeds.clear();
    for (const auto& t : detail::split_list(value)) cfg.seeds.push_back(detail::parse_u64(t, key));
  } else if (key == "bc_mode") {
    cfg.bc_mode = parse_bc_mode(value);
  } else if (key == "cg_tol") {
    cfg.cg_tol = detail::parse_double(value, key);
  } else if (key == "eig_tol") {
    cfg.eig_tol = detail::parse_double(value, key);
  } else if (key == "chain_tol") {
    cfg.chain_tol = detail::parse_double(value, key);
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "out") {
    cfg.out_path = value;
  } else if (key == "dump_dir") {
    cfg.dump_dir = value;
  } else if (key == "field_class") {
    cfg.field_class = value;
  } else if (key == "deterministic_sum") {
    cfg.deterministic_sum = detail::parse_bool(value, key);
  } else if (key == "center") {
    cfg.geometry.center.clear();
    for (const auto& t : detail::split_list(value))
      cfg.geometry.center.push_back(detail::parse_double(t, key));
  } else if (key == "radius") {
    cfg.geometry.radius = detail::parse_double(value, key);
  } else if (key == "inner_radius") {
    cfg.geometry.inner_radius = detail::parse_double(value, key);
  } else if (key == "outer_radius") {
    cfg.geometry.outer_radius = detail::parse_double(value, key);
  } else if (key == "ring_radius") {
    cfg.geometry.ring_radius = detail::parse_double(value, key);
  } else if (key == "tube_radius") {
    cfg.geometry.tube_radius = detail::parse_double(value, key);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

/// Key/value config file: `key = value` lines, `#` comments, optional
/// `[section]` headers (ignored; the key namespace is flat).  Applied on top
/// of the supplied defaults.
inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " of '" + path +
                        "' is not 'key = value'");
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  std::string command;
  std::string version = tool_version;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<std::string> notes;
  std::vector<ReportTable> tables;
  std::vector<ConstantsRecord> constants; ///< per resolution where computed
  int checks_passed = 0;
  int checks_failed = 0;
  double worst_ratio = 0.0; ///< command-specific; documented per table
  double elapsed_seconds = 0.0;
  std::string dump_path; ///< first counterexample snapshot, if any
  int exit_code = 0;
};

namespace detail {

inline std::string fmt(double x) { return format_double(x); }

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

} // namespace detail

/// CSV rendering: `#`-prefixed metadata (tool, command, config echo, notes),
/// then each table introduced by `# table <name>` with a fixed header row,
/// then a fixed-order summary table.
inline std::string render_csv(const RunReport& rep) {
  std::ostringstream os;
  os << "# tool " << tool_name << "\n";
  os << "# version " << rep.version << "\n";
  os << "# command " << rep.command << "\n";
  for (const auto& [k, v] : rep.config_echo) os << "# config " << k << " = " << v << "\n";
  for (const auto& n : rep.notes) os << "# note " << n << "\n";
  for (const auto& t : rep.tables) {
    os << "\n# table " << t.name << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << "\n";
    }
  }
  os << "\n# table summary\n";
  os << "checks_passed,checks_failed,worst_ratio,elapsed_seconds,exit_code,dump_path\n";
  os << rep.checks_passed << ',' << rep.checks_failed << ',' << detail::fmt(rep.worst_ratio)
     << ',' << detail::fmt(rep.elapsed_seconds) << ',' << rep.exit_code << ',' << rep.dump_path
     << "\n";
  return os.str();
}

/// JSON rendering: mirrors the CSV content with the same ordering.  Table
/// cells are emitted as strings (printed with 17 significant digits), which
/// keeps non-finite values such as the infinite sharp constant representable.
inline std::string render_json(const RunReport& rep) {
  using detail::json_escape;
  std::ostringstream os;
  os << "{\n";
  os << "  \"tool\": \"" << tool_name << "\",\n";
  os << "  \"version\": \"" << json_escape(rep.version) << "\",\n";
  os << "  \"command\": \"" << json_escape(rep.command) << "\",\n";
  os << "  \"config\": {";
  for (std::size_t i = 0; i < rep.config_echo.size(); ++i)
    os << (i ? ", " : "") << '"' << json_escape(rep.config_echo[i].first) << "\": \""
       << json_escape(rep.config_echo[i].second) << '"';
  os << "},\n";
  os << "  \"notes\": [";
  for (std::size_t i = 0; i < rep.notes.size(); ++i)
    os << (i ? ", " : "") << '"' << json_escape(rep.notes[i]) << '"';
  os << "],\n";
  os << "  \"tables\": [\n";
  for (std::size_t t = 0; t < rep.tables.size(); ++t) {
    const auto& tab = rep.tables[t];
    os << "    {\"name\": \"" << json_escape(tab.name) << "\", \"columns\": [";
    for (std::size_t c = 0; c < tab.columns.size(); ++c)
      os << (c ? ", " : "") << '"' << json_escape(tab.columns[c]) << '"';
    os << "], \"rows\": [\n";
    for (std::size_t r = 0; r < tab.rows.size(); ++r) {
      os << "      [";
      for (std::size_t c = 0; c < tab.rows[r].size(); ++c)
        os << (c ? ", " : "") << '"' << json_escape(tab.rows[r][c]) << '"';
      os << (r + 1 < tab.rows.size() ? "],\n" : "]\n");
    }
    os << (t + 1 < rep.tables.size() ? "    ]},\n" : "    ]}\n");
  }
  os << "  ],\n";
  os << "  \"summary\": {\"checks_passed\": " << rep.checks_passed
     << ", \"checks_failed\": " << rep.checks_failed << ", \"worst_ratio\": \""
     << detail::fmt(rep.worst_ratio) << "\", \"elapsed_seconds\": \""
     << detail::fmt(rep.elapsed_seconds) << "\", \"exit_code\": " << rep.exit_code
     << ", \"dump_path\": \"" << json_escape(rep.dump_path) << "\"}\n";
  os << "}\n";
  return os.str();
}

inline std::string render_report(const RunReport& rep, const std::string& format) {
  return format == "json" ? render_json(rep) : render_csv(rep);
}

/// Prints the report to stdout and, when configured, writes the identical
/// bytes to the output path.
inline void write_report(const RunReport& rep, const ExperimentConfig& cfg) {
  const std::string text = render_report(rep, cfg.format);
  std::cout << text;
  if (!cfg.out_path.empty()) {
    std::ofstream os(cfg.out_path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + cfg.out_path + "' for writing");
    os << text;
    if (!os) throw IoError("write to '" + cfg.out_path + "' failed");
  }
}

// ---------------------------------------------------------------------------
// shared command plumbing
// ---------------------------------------------------------------------------

namespace detail {

inline RunReport start_report(const std::string& command, const ExperimentConfig& cfg) {
  RunReport rep;
  rep.command = command;
  rep.config_echo = cfg.echo();
  return rep;
}

inline void finish_report(RunReport& rep, const ExperimentConfig& cfg, const Stopwatch& clock) {
  rep.elapsed_seconds = cfg.deterministic_sum ? 0.0 : clock.seconds();
  rep.exit_code = rep.checks_failed > 0 ? 1 : 0;
}

inline MaskPtr config_mask(const ExperimentConfig& cfg, int resolution) {
  const double h = 1.0 / (resolution - 1);
  return make_domain(cfg.domain, cfg.geometry,
                     std::vector<int>(static_cast<std::size_t>(cfg.N), resolution), h);
}

inline ConstantsRecord config_constants(const ExperimentConfig& cfg, int resolution) {
  SpectralOptions p, m;
  p.eig_tol = m.eig_tol = cfg.eig_tol;
  p.eigen.cg_tol = m.eigen.cg_tol = std::min(cfg.cg_tol, 1e-10);
  return compute_constants(config_mask(cfg, resolution), p, m);
}

inline const char* variant_name(KornVariant v) {
  return v == KornVariant::dirichlet ? "dirichlet" : "boundary_constant";
}

} // namespace detail

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

/// Poincaré/Maxwell constants and the derived bound per resolution.
/// Table `constants`: resolution, h, c_p, c_m, c_hat, dim_h1d, gap_p, gap_m.
/// One executed check per resolution (the spectra classified cleanly);
/// worst_ratio is the smallest spectral gap ratio seen.
inline RunReport cmd_constants(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  RunReport rep = detail::start_report("constants", cfg);
  ReportTable table{"constants",
                    {"resolution", "h", "c_p", "c_m", "c_hat", "dim_h1d", "gap_p", "gap_m"},
                    {}};
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int res : cfg.resolutions) {
    ConstantsRecord c = detail::config_constants(cfg, res);
    rep.constants.push_back(c);
    table.rows.push_back({std::to_string(res), detail::fmt(c.h), detail::fmt(c.c_p),
                          detail::fmt(c.c_m), detail::fmt(c.c_hat),
                          std::to_string(c.maxwell.kernel_dim),
                          detail::fmt(c.poincare.gap_ratio), detail::fmt(c.maxwell.gap_ratio)});
    worst_gap = std::min(worst_gap, std::min(c.poincare.gap_ratio, c.maxwell.gap_ratio));
    ++rep.checks_passed;
  }
  rep.worst_ratio = worst_gap;
  rep.tables.push_back(std::move(table));
  detail::finish_report(rep, cfg, clock);
  return rep;
}

/// The main certification campaign.  Per resolution: the sharp constant of
/// the seminorm equivalence is compared against c_hat (one check), then every
/// seed runs the full decomposition chain on a tensor of the configured
/// field class (one check per seed; gradient and skew classes assert their
/// specialized inequality as an extra check per seed).  Any failing chain is
/// dumped as a replayable snapshot.  worst_ratio is the largest observed
/// |T| / (c_hat (|sym T|^2 + |Curl T|^2)^{1/2}), which stays <= 1 when
/// everything holds.
inline RunReport cmd_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  RunReport rep = detail::start_report("verify", cfg);
  const double sqrt2 = std::sqrt(2.0);

  ReportTable sharp_table{
      "sharp", {"resolution", "dofs", "lambda_min", "c_sharp", "c_hat", "slack", "pass"}, {}};
  ReportTable chain_table{"chains",
                          {"resolution", "seed", "field_class", "t_norm", "sym_norm", "curl_norm",
                           "grad_norm", "remainder_norm", "remainder_ratio", "margin", "pass"},
                          {}};

  for (int res : cfg.resolutions) {
    const MaskPtr mask = detail::config_mask(cfg, res);
    ConstantsRecord consts = detail::config_constants(cfg, res);
    rep.constants.push_back(consts);

    SpectralOptions sharp_opts = sharp_spectral_defaults();
    sharp_opts.eig_tol = cfg.eig_tol;
    SharpRecord sharp = sharp_constant(mask, sharp_opts);
    const bool sharp_ok = sharp.c_sharp <= consts.c_hat + cfg.chain_tol;
    sharp_ok ? ++rep.checks_passed : ++rep.checks_failed;
    sharp_table.rows.push_back({std::to_string(res), std::to_string(sharp.spectrum.dofs),
                                detail::fmt(sharp.lambda_min), detail::fmt(sharp.c_sharp),
                                detail::fmt(consts.c_hat),
                                detail::fmt(consts.c_hat - sharp.c_sharp),
                                sharp_ok ? "1" : "0"});
    if (!sharp_ok)
      rep.notes.push_back("sharp constant exceeds c_hat at resolution " + std::to_string(res));

    for (std::uint64_t seed : cfg.seeds) {
      TensorField T(mask, BcMode::full_dirichlet);
      if (cfg.field_class == "gradient") {
        VectorField v = random_korn_vector(mask, seed, KornVariant::dirichlet);
        T = Grad(v);
      } else if (cfg.field_class == "skew") {
        T = random_skew_tensor(mask, BcMode::full_dirichlet, seed);
      } else {
        T = random_tensor(mask, BcMode::full_dirichlet, seed);
      }

      ChainReport chain = main_lemma_chain(T, consts.c_m, cfg.chain_tol, cfg.cg_tol);
      chain.all_pass ? ++rep.checks_passed : ++rep.checks_failed;

      // margin as reported is rhs/lhs; track its inverse as the worst ratio
      double ratio = 0.0;
      const double rhs = chain.c_hat * std::hypot(chain.sym_norm, chain.curl_norm);
      if (chain.t_norm == 0.0 && rhs == 0.0) {
        rep.notes.push_back("zero field at seed " + std::to_string(seed) +
                            ": ratio 0/0 reported as 0 (flagged)");
      } else {
        ratio = chain.t_norm / std::max(rhs, 1e-300);
      }
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);

      if (cfg.field_class == "gradient") {
        const bool ok = chain.t_norm <= sqrt2 * chain.sym_norm * (1.0 + cfg.chain_tol);
        ok ? ++rep.checks_passed : ++rep.checks_failed;
        if (!ok)
          rep.notes.push_back("gradient-class ratio above sqrt(2) at seed " +
                              std::to_string(seed));
      } else if (cfg.field_class == "skew") {
        const bool ok = chain.t_norm <= chain.c_hat * chain.curl_norm * (1.0 + cfg.chain_tol);
        ok ? ++rep.checks_passed : ++rep.checks_failed;
        if (!ok)
          rep.notes.push_back("skew-class curl bound violated at seed " + std::to_string(seed));
      }

      chain_table.rows.push_back(
          {std::to_string(res), std::to_string(seed), cfg.field_class,
           detail::fmt(chain.t_norm), detail::fmt(chain.sym_norm), detail::fmt(chain.curl_norm),
           detail::fmt(chain.gradient_norm), detail::fmt(chain.remainder_norm),
           detail::fmt(chain.remainder_ratio), detail::fmt(chain.margin),
           chain.all_pass ? "1" : "0"});

      if (!chain.all_pass) {
        std::string first_fail = "unknown";
        double lhs = 0.0, frhs = 0.0;
        for (const auto& a : chain.assertions)
          if (!a.pass) {
            first_fail = a.name;
            lhs = a.lhs;
            frhs = a.rhs;
            break;
          }
        const std::string path = cfg.dump_dir + "/counterexample_" + to_string(cfg.domain) +
                                 std::to_string(cfg.N) + "d_r" + std::to_string(res) + "_s" +
                                 std::to_string(seed) + ".snapshot";
        std::ofstream os(path);
        if (os) {
          os << "# counterexample " << tool_name << ' ' << rep.version << "\n";
          os << "# command verify\n";
          os << "# assertion " << first_fail << "\n";
          os << "# lhs " << detail::fmt(lhs) << "\n";
          os << "# rhs " << detail::fmt(frhs) << "\n";
          os << "# c_m " << detail::fmt(chain.c_m) << "\n";
          os << "# c_hat " << detail::fmt(chain.c_hat) << "\n";
          os << "# t_norm " << detail::fmt(chain.t_norm) << "\n";
          os << "# sym_norm " << detail::fmt(chain.sym_norm) << "\n";
          os << "# curl_norm " << detail::fmt(chain.curl_norm) << "\n";
          os << "# remainder_ratio " << detail::fmt(chain.remainder_ratio) << "\n";
          os << "# margin " << detail::fmt(chain.margin) << "\n";
          os << "# seed " << seed << "\n";
          write_tensor(os, T);
        }
        if (rep.dump_path.empty()) rep.dump_path = path;
        rep.notes.push_back("chain failed (" + first_fail + ") at resolution " +
                            std::to_string(res) + ", seed " + std::to_string(seed) +
                            "; snapshot: " + path);
      }
    }
  }

  rep.tables.push_back(std::move(sharp_table));
  rep.tables.push_back(std::move(chain_table));
  detail::finish_report(rep, cfg, clock);
  return rep;
}

/// Korn identity suite.  bc_mode full selects the Dirichlet variant;
/// tangential selects the boundary-constant variant (constant trace per
/// component, recovered and removed by the check).  One check per
/// (resolution, seed): identity residual <= 1e-13 relative and ratio
/// <= sqrt(2) + 1e-10.  worst_ratio is max ratio / sqrt(2).
inline RunReport cmd_korn(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  RunReport rep = detail::start_report("korn", cfg);
  const KornVariant variant = cfg.bc_mode == BcMode::tangential ? KornVariant::boundary_constant
                                                                : KornVariant::dirichlet;
  const double sqrt2 = std::sqrt(2.0);
  ReportTable table{"korn",
                    {"resolution", "seed", "variant", "grad_norm", "sym_norm", "div_norm",
                     "identity_defect", "ratio", "shifted_ratio", "zero_flagged", "pass"},
                    {}};
  double worst_defect = 0.0;
  for (int res : cfg.resolutions) {
    const MaskPtr mask = detail::config_mask(cfg, res);
    for (std::uint64_t seed : cfg.seeds) {
      KornReport kr = korn_check(mask, seed, variant);
      const bool ok = kr.identity_defect <= 1e-13 && kr.ratio <= sqrt2 + 1e-10;
      ok ? ++rep.checks_passed : ++rep.checks_failed;
      if (kr.zero_flagged)
        rep.notes.push_back("zero field at seed " + std::to_string(seed) +
                            ": ratio 0/0 reported as 0 (flagged)");
      worst_defect = std::max(worst_defect, kr.identity_defect);
      rep.worst_ratio = std::max(rep.worst_ratio, kr.ratio / sqrt2);
      table.rows.push_back({std::to_string(res), std::to_string(seed),
                            detail::variant_name(variant), detail::fmt(kr.grad_norm),
                            detail::fmt(kr.sym_norm), detail::fmt(kr.div_norm),
                            detail::fmt(kr.identity_defect), detail::fmt(kr.ratio),
                            detail::fmt(kr.shifted_ratio), kr.zero_flagged ? "1" : "0",
                            ok ? "1" : "0"});
    }
  }
  rep.notes.push_back("max identity defect = " + detail::fmt(worst_defect));
  rep.tables.push_back(std::move(table));
  detail::finish_report(rep, cfg, clock);
  return rep;
}

/// Harmonic-space dimensions across all degrees.  Table `betti`: one row per
/// (resolution, q) with the kernel dimension of the form Laplacian under the
/// configured mode and its spectral gap.  One check per row: gap ratio >= 10
/// (kernel clearly separated).  worst_ratio is the smallest gap seen.
inline RunReport cmd_betti(const ExperimentConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  RunReport rep = detail::start_report("betti", cfg);
  ReportTable table{"betti",
                    {"resolution", "q", "mode", "dofs", "kernel_dim", "gap_ratio",
                     "lambda_min_positive", "pass"},
                    {}};
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int res : cfg.resolutions) {
    const MaskPtr mask = detail::config_mask(cfg, res);
    for (int q = 0; q <= cfg.N; ++q) {
      SpectralOptions opts;
      opts.eig_tol = cfg.eig_tol;
      SpectralRecord s = harmonic_spectrum(mask, q, cfg.bc_mode, opts);
      const bool ok = s.gap_ratio >= 10.0;
      ok ? ++rep.checks_passed : ++rep.checks_failed;
      worst_gap = std::min(worst_gap, s.gap_ratio);
      table.rows.push_back({std::to_string(res), std::to_string(q), to_string(s.mode),
                            std::to_string(s.dofs), std::to_string(s.kernel_dim),
                            detail::fmt(s.gap_ratio), detail::fmt(s.lambda_min_positive),
                            ok ? "1" : "0"});
    }
  }
  rep.worst_ratio = worst_gap;
  rep.tables.push_back(std::move(table));
  detail::finish_report(rep, cfg, clock);
  return rep;
}

/// Dyadic sweep of the constants with Richardson extrapolation.  Requires at
/// least three resolutions, each refining the last dyadically (r -> 2r - 1,
/// halving h).  Table `sweep` lists the constants and their relative change
/// against the previous resolution; table `extrapolation` reports, per
/// constant, the observed order, the extrapolated limit, and the last
/// relative change.  One check per constant: last relative change < 5%.
inline RunReport cmd_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.resolutions.size() < 3)
    throw ConfigError("convergence: need at least three resolutions for extrapolation");
  for (std::size_t i = 1; i < cfg.resolutions.size(); ++i)
    if (cfg.resolutions[i] != 2 * cfg.resolutions[i - 1] - 1)
      throw ConfigError("convergence: resolutions must refine dyadically (next = 2r - 1)");
  detail::Stopwatch clock;
  RunReport rep = detail::start_report("convergence", cfg);

  std::vector<double> cps, cms;
  ReportTable sweep{"sweep",
                    {"resolution", "h", "c_p", "c_m", "c_hat", "rel_change_p", "rel_change_m"},
                    {}};
  for (std::size_t i = 0; i < cfg.resolutions.size(); ++i) {
    const int res = cfg.resolutions[i];
    ConstantsRecord c = detail::config_constants(cfg, res);
    rep.constants.push_back(c);
    cps.push_back(c.c_p);
    cms.push_back(c.c_m);
    const double dp = i ? std::abs(cps[i] - cps[i - 1]) / std::max(std::abs(cps[i]), 1e-300) : 0.0;
    const double dm = i ? std::abs(cms[i] - cms[i - 1]) / std::max(std::abs(cms[i]), 1e-300) : 0.0;
    sweep.rows.push_back({std::to_string(res), detail::fmt(c.h), detail::fmt(c.c_p),
                          detail::fmt(c.c_m), detail::fmt(c.c_hat), detail::fmt(dp),
                          detail::fmt(dm)});
  }
  rep.tables.push_back(std::move(sweep));

  ReportTable extra{"extrapolation",
                    {"constant", "order", "limit", "last_rel_change", "pass"},
                    {}};
  auto extrapolate = [&](const char* name, const std::vector<double>& c) {
    const std::size_t k = c.size();
    const double c1 = c[k - 3], c2 = c[k - 2], c3 = c[k - 1];
    double order = std::numeric_limits<double>::quiet_NaN();
    double limit = c3;
    const double num = c1 - c2, den = c2 - c3;
    if (den != 0.0 && num / den > 0.0) {
      order = std::log2(num / den);
      const double factor = std::pow(2.0, order) - 1.0;
      if (factor != 0.0) limit = c3 + (c3 - c2) / factor;
    } else {
      rep.notes.push_back(std::string(name) +
                          ": non-monotone refinement, extrapolation falls back to finest value");
    }
    const double last_change = std::abs(c3 - c2) / std::max(std::abs(c3), 1e-300);
    const bool ok = last_change < 0.05;
    ok ? ++rep.checks_passed : ++rep.checks_failed;
    rep.worst_ratio = std::max(rep.worst_ratio, last_change);
    extra.rows.push_back(
        {name, detail::fmt(order), detail::fmt(limit), detail::fmt(last_change), ok ? "1" : "0"});
  };
  extrapolate("c_p", cps);
  extrapolate("c_m", cms);
  rep.tables.push_back(std::move(extra));
  detail::finish_report(rep, cfg, clock);
  return rep;
}

/// Dispatch by name; unknown commands are a configuration error.
inline RunReport run_command(const std::string& command, const ExperimentConfig& cfg) {
  if (command == "constants") return cmd_constants(cfg);
  if (command == "verify") return cmd_verify(cfg);
  if (command == "korn") return cmd_korn(cfg);
  if (command == "betti") return cmd_betti(cfg);
  if (command == "convergence") return cmd_convergence(cfg);
  throw ConfigError("unknown command: " + command);
}

} // namespace kornlab
