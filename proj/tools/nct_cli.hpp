#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nctorus/checks.hpp"
#include "nctorus/nctorus.hpp"
#include "nctorus/random.hpp"

namespace nct::cli {

using json = nlohmann::json;

inline constexpr std::uint64_t default_seed = 0xA1B2C3D4ULL;

enum exit_code : int { ok = 0, validation = 2, check_failed = 3 };

/// Merged parameters of one subcommand: config file first, flags on top.
class Params {
 public:
  Params(std::string command, std::set<std::string> allowed) : command_(std::move(command)), allowed_(std::move(allowed)) {}

  void load_config(const std::string& path) {
    const std::string text = io::read_file(path);
    const json j = io::parse_json(text, path);
    if (!j.is_object()) throw rejected_input(path + ":1:1: config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      const std::string where = path + ":" + std::to_string(key_line(text, key));
      if (key == "command") {
        if (!value.is_string() || value.get<std::string>() != command_)
          throw rejected_input(where + ": config is for a different command");
        continue;
      }
      if (!allowed_.count(key)) throw rejected_input(where + ": unknown key '" + key + "' for " + command_);
      values_[key] = value;
      origin_[key] = where;
    }
  }

  void set_flag(const std::string& name, const std::string& v) {
    values_[name] = v;
    origin_[name] = "--" + name;
  }

  bool has(const std::string& name) const { return values_.count(name) != 0; }

  std::int64_t integer(const std::string& name, std::int64_t fallback) const {
    if (!has(name)) return fallback;
    const json& v = values_.at(name);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      try {
        std::size_t used = 0;
        const long long x = std::stoll(s, &used, 0);
        if (used == s.size()) return x;
      } catch (const std::exception&) {
      }
    }
    fail(name, "expected an integer");
  }

  std::uint64_t unsigned_integer(const std::string& name, std::uint64_t fallback) const {
    if (!has(name)) return fallback;
    const json& v = values_.at(name);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      try {
        std::size_t used = 0;
        if (!s.empty() && s[0] != '-') {
          const unsigned long long x = std::stoull(s, &used, 0);
          if (used == s.size()) return x;
        }
      } catch (const std::exception&) {
      }
    }
    fail(name, "expected an unsigned 64-bit integer");
  }

  double real(const std::string& name, double fallback) const {
    if (!has(name)) return fallback;
    const json& v = values_.at(name);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_real(name, v.get<std::string>());
    fail(name, "expected a number");
  }

  Rational rational(const std::string& name, Rational fallback) const {
    if (!has(name)) return fallback;
    const json& v = values_.at(name);
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return parse_rational(name, v.get<std::string>());
    fail(name, "expected a rational \"p/q\"");
  }

  std::string text(const std::string& name, const std::string& fallback = "") const {
    if (!has(name)) return fallback;
    const json& v = values_.at(name);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
      return s;
    }
    return v.dump();
  }

  std::vector<std::string> list(const std::string& name) const {
    std::vector<std::string> out;
    std::stringstream ss(text(name));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }

  std::vector<Rational> rational_list(const std::string& name) const {
    std::vector<Rational> out;
    for (const auto& s : list(name)) out.push_back(parse_rational(name, s));
    return out;
  }

  std::vector<double> real_list(const std::string& name) const {
    std::vector<double> out;
    for (const auto& s : list(name)) out.push_back(parse_real(name, s));
    return out;
  }

  /// "M,L" grid specification.
  std::pair<int, double> grid(const std::string& name, std::pair<int, double> fallback) const {
    if (!has(name)) return fallback;
    const auto parts = list(name);
    if (parts.size() != 2) fail(name, "expected M,L");
    const double m = parse_real(name, parts[0]);
    if (m != std::floor(m) || m < 2 || m > (1 << 24)) fail(name, "M must be an integer power of two");
    return {static_cast<int>(m), parse_real(name, parts[1])};
  }

  /// Theta given as upper-triangle entries; rational when every entry is "p/q" or an integer.
  SkewMatrix theta(const std::string& name, int d) const {
    const auto parts = list(name);
    if (parts.empty()) fail(name, "empty theta");
    bool exact = true;
    for (const auto& p : parts) exact = exact && p.find_first_of(".eE") == std::string::npos;
    const int dim = d > 0 ? d : checked_dim(name, parts.size());
    if (SkewMatrix::upper_size(dim) != parts.size())
      fail(name, "expected " + std::to_string(SkewMatrix::upper_size(dim)) + " upper-triangle entries for d = " + std::to_string(dim));
    if (exact) {
      std::vector<Rational> u;
      for (const auto& p : parts) u.push_back(parse_rational(name, p));
      return SkewMatrix(dim, u);
    }
    std::vector<double> u;
    for (const auto& p : parts) u.push_back(parse_real(name, p));
    return SkewMatrix(dim, u);
  }

  [[noreturn]] void fail(const std::string& name, const std::string& msg) const {
    throw rejected_input(origin_.at(name) + ": " + msg);
  }

 private:
  static std::size_t key_line(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 1 : io::line_column(text, pos).first;
  }

  int checked_dim(const std::string& name, std::size_t n) const {
    try {
      return io::dim_from_upper(n);
    } catch (const rejected_input& e) {
      fail(name, e.what());
    }
  }

  Rational parse_rational(const std::string& name, const std::string& s) const {
    try {
      return Rational::parse(s);
    } catch (const std::exception& e) {
      fail(name, "bad rational '" + s + "': " + e.what());
    }
  }

  double parse_real(const std::string& name, const std::string& s) const {
    if (s.find('/') != std::string::npos) return parse_rational(name, s).to_double();
    try {
      std::size_t used = 0;
      const double x = std::stod(s, &used);
      if (used == s.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    fail(name, "expected a number, got '" + s + "'");
  }

  std::string command_;
  std::set<std::string> allowed_;
  std::map<std::string, json> values_;
  std::map<std::string, std::string> origin_;
};

struct Context {
  const Params& p;
  std::ostream& out;
  int jobs;
  std::uint64_t seed;
  std::string out_path;

  void emit(const std::string& content) const {
    if (!out_path.empty()) io::write_atomic(out_path, content);
  }
  void emit_json(const json& j) const { emit(j.dump(2) + "\n"); }
};

namespace detail {

inline std::string fmt(double v) { return nct::detail::fmt_double(v); }

inline json coeff_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline std::string poly_text(const NCPolynomial& a) {
  if (a.terms().empty()) return "0";
  std::string s;
  for (const auto& [m, c] : a.terms()) {
    if (!s.empty()) s += " + ";
    s += "(" + fmt(c.real()) + (c.imag() < 0 ? "-" : "+") + fmt(std::abs(c.imag())) + "i) u^" + m.str();
  }
  return s;
}

/// Exact polynomial when theta is rational and every coefficient is a Gaussian integer.
inline std::optional<ExactPolynomial> exact_copy(const NCPolynomial& a) {
  if (!a.theta().is_rational()) return std::nullopt;
  ExactPolynomial e(a.theta());
  for (const auto& [m, c] : a.terms()) {
    if (c.real() != std::floor(c.real()) || c.imag() != std::floor(c.imag()) || std::abs(c.real()) > 1e15 ||
        std::abs(c.imag()) > 1e15)
      return std::nullopt;
    e.add_term(m, CyclotomicCoeff::integer(static_cast<std::int64_t>(c.real()), static_cast<std::int64_t>(c.imag())));
  }
  return e;
}

inline PairTable pairs_from_spec(const Params& p, int d, std::uint64_t seed) {
  PairTable table;
  const std::string spec = p.text("theta", "identity-pairs");
  if (spec == "identity-pairs") {
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) table.emplace(std::make_pair(j, k), clock_shift(1, 2));
    return table;
  }
  if (spec == "random") {
    Rng rng = case_rng(seed, static_cast<std::uint64_t>(d));
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        const long long q = uniform_int(rng, 1, 3);
        table.emplace(std::make_pair(j, k), clock_shift(uniform_int(rng, 0, q - 1), q));
      }
    return table;
  }
  const SkewMatrix th = p.theta("theta", d);
  if (!th.is_rational()) p.fail("theta", "finite representations need rational entries");
  for (int j = 0; j < th.dim(); ++j)
    for (int k = j + 1; k < th.dim(); ++k) {
      const Rational r = th.exact(j, k).frac();
      table.emplace(std::make_pair(j, k), clock_shift(r.num(), r.den()));
    }
  return table;
}

inline Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  const std::string text = io::read_file(path);
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw rejected_input(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw rejected_input(path + ":" + std::to_string(lineno) + ": row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.size() != rows.front().size()) throw rejected_input(path + ": expected a square matrix");
  Eigen::MatrixXd m(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j) + 0.0);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace detail

inline int cmd_algebra(const Context& c) {
  if (!c.p.has("input")) throw rejected_input("algebra needs --input");
  const std::string path = c.p.text("input");
  const json j = io::parse_json(io::read_file(path), path);
  if (!j.is_object()) throw rejected_input(path + ": expected an object with polynomials a and b");
  for (const auto& [key, _] : j.items())
    if (key != "a" && key != "b") throw rejected_input(path + ": unknown key '" + key + "'");
  if (!j.contains("a")) throw rejected_input(path + ": missing polynomial a");
  const NCPolynomial a = io::polynomial_from_json(j.at("a"));
  const std::optional<NCPolynomial> b =
      j.contains("b") ? std::optional<NCPolynomial>(io::polynomial_from_json(j.at("b"), a.theta())) : std::nullopt;

  const auto ea = detail::exact_copy(a);
  const auto eb = b ? detail::exact_copy(*b) : std::nullopt;
  const bool exact = ea.has_value() && (!b || eb.has_value());

  json rep;
  rep["exact"] = exact;
  rep["a"] = io::polynomial_to_json(a);
  NCPolynomial adj = exact ? to_complex(poly_adjoint(*ea)) : poly_adjoint(a);
  rep["adjoint"] = io::polynomial_to_json(adj);
  rep["trace_a"] = detail::coeff_json(exact ? trace(*ea).to_complex() : trace(a));
  json ex = json::array();
  for (int k = 0; k < a.dim(); ++k) ex.push_back(io::polynomial_to_json(exact ? to_complex(cond_expectation(*ea, k)) : cond_expectation(a, k)));
  rep["expectations"] = ex;
  c.out << "mode " << (exact ? "exact" : "floating") << "\n";
  c.out << "trace(a) " << detail::fmt(rep["trace_a"][0].get<double>()) << " " << detail::fmt(rep["trace_a"][1].get<double>()) << "\n";
  if (b) {
    NCPolynomial ab = exact ? to_complex(poly_mul(*ea, *eb)) : poly_mul(a, *b);
    NCPolynomial ba = exact ? to_complex(poly_mul(*eb, *ea)) : poly_mul(*b, a);
    rep["b"] = io::polynomial_to_json(*b);
    rep["product"] = io::polynomial_to_json(ab);
    rep["trace_ab"] = detail::coeff_json(exact ? trace(poly_mul(*ea, *eb)).to_complex() : trace(ab));
    rep["trace_ba"] = detail::coeff_json(exact ? trace(poly_mul(*eb, *ea)).to_complex() : trace(ba));
    c.out << "a*b = " << detail::poly_text(ab) << "\n";
  }
  c.emit_json(rep);
  if (c.out_path.empty()) c.out << rep.dump(2) << "\n";
  return ok;
}

inline int cmd_relations(const Context& c) {
  const auto d = c.p.integer("d", 2);
  if (d < 1 || d > 8) c.p.fail(c.p.has("d") ? "d" : "theta", "d must be in [1, 8]");
  const double tol = c.p.real("tol", 1e-12);
  const long long cap = c.p.integer("cap", default_size_cap);
  const UnitaryTuple t = tensor_construct(static_cast<int>(d), detail::pairs_from_spec(c.p, static_cast<int>(d), c.seed), cap);
  const RelationReport r = verify_relations(t);
  json rep{{"d", d},
           {"size", t.size()},
           {"commutation_residual", r.commutation_residual},
           {"unitarity_residual", r.unitarity_residual},
           {"worst_pair", {r.worst_pair.first, r.worst_pair.second}},
           {"worst_generator", r.worst_generator},
           {"tolerance", tol},
           {"within", r.within(tol)}};
  c.out << "size " << t.size() << "\ncommutation_residual " << detail::fmt(r.commutation_residual) << "\nunitarity_residual "
        << detail::fmt(r.unitarity_residual) << "\nwithin " << (r.within(tol) ? "true" : "false") << "\n";
  c.emit_json(rep);
  return r.within(tol) ? ok : check_failed;
}

inline int cmd_symplectic(const Context& c) {
  SkewMatrix th = c.p.has("input") ? SkewMatrix::from_matrix(detail::read_csv_matrix(c.p.text("input")))
                 : c.p.has("theta") ? c.p.theta("theta", static_cast<int>(c.p.integer("d", 0)))
                                    : throw rejected_input("symplectic needs --input or --theta");
  json rep{{"d", th.dim()}, {"theta", detail::matrix_json(th.matrix())}};
  const auto dec = skew_rank_decompose(th);
  rep["rank"] = dec.rank;
  int code = ok;
  if (dec.rank == th.dim() && th.dim() % 2 == 0) {
    const auto sf = symplectic_normalize(th);
    rep["T"] = detail::matrix_json(sf.T);
    rep["S"] = detail::matrix_json(sf.S);
    rep["residual"] = sf.residual;
    c.out << "rank " << dec.rank << "\nresidual " << detail::fmt(sf.residual) << "\n";
    if (sf.residual > 1e-10) code = check_failed;
  } else {
    rep["basis"] = detail::matrix_json(dec.basis);
    rep["residual"] = dec.residual;
    c.out << "rank " << dec.rank << " (degenerate)\nresidual " << detail::fmt(dec.residual) << "\n";
    if (dec.residual > 1e-10) code = check_failed;
  }
  c.emit_json(rep);
  if (c.out_path.empty()) c.out << rep.dump(2) << "\n";
  return code;
}

inline int cmd_moyal(const Context& c) {
  const std::string method = c.p.text("method", "fourier");
  if (method != "fourier" && method != "direct" && method != "both") c.p.fail("method", "method must be fourier, direct or both");
  GridFunction f = [&] {
    if (c.p.has("f")) return io::decode_grid(io::read_file(c.p.text("f")), c.p.text("f"));
    const auto [M, L] = c.p.grid("grid", {64, 8.0});
    const int d = static_cast<int>(c.p.integer("d", 2));
    return GridFunction::sample(d, L, M, [](std::span<const double> x) {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return cplx(std::exp(-r2 / 2));
    });
  }();
  const GridFunction g = c.p.has("g") ? io::decode_grid(io::read_file(c.p.text("g")), c.p.text("g")) : f;
  f.require_same_grid(g, "moyal");
  const SkewMatrix th = c.p.has("theta") ? c.p.theta("theta", f.dim()) : SkewMatrix(f.dim(), std::vector<double>(SkewMatrix::upper_size(f.dim()), 1.0));
  json rep{{"d", f.dim()}, {"M", f.points_per_axis()}, {"L", f.half_length()}, {"method", method}};
  GridFunction result = f;
  if (method != "direct") {
    result = star_fourier(f, g, th, c.jobs);
    rep["integral"] = detail::coeff_json(result.integral());
    rep["pointwise_integral"] = detail::coeff_json(f.pointwise_product(g).integral());
  }
  if (method != "fourier") {
    const auto d = moyal_direct(f, g, th, c.p.real("max-ops", 2e10), c.jobs);
    rep["boundary_decay"] = d.boundary_decay;
    rep["spectral_tail"] = d.spectral_tail;
    rep["error_estimate"] = d.error_estimate;
    if (std::isfinite(d.resolvable_radius)) rep["resolvable_radius"] = d.resolvable_radius;
    if (method == "both") rep["direct_vs_fourier"] = d.product.max_abs_difference(result);
    else result = d.product;
  }
  rep["boundary_warning"] = result.boundary_warning();
  rep["max_abs"] = result.max_abs();
  for (const auto& [key, v] : rep.items())
    if (key != "d" && key != "M" && key != "method") c.out << key << " " << v.dump() << "\n";
  c.emit(io::encode_grid(result));
  return ok;
}

inline int cmd_weyl(const Context& c) {
  const double th = c.p.real("theta", 1.0);
  const double s = c.p.real("s", 0.37), t = c.p.real("t", 0.37);
  json rep{{"theta", th}, {"s", s}, {"t", t}};
  int code = ok;
  if (c.p.has("grid")) {
    const auto [M, L] = c.p.grid("grid", {64, 8.0});
    const Grid1D g{M, L};
    const auto r = weyl_residual(th, s, t, g);
    rep["M"] = M;
    rep["L"] = L;
    rep["residual"] = r.residual;
    rep["operator_residual"] = r.operator_residual;
    rep["commensurate"] = r.commensurate;
    c.out << "residual " << detail::fmt(r.residual) << "\noperator_residual " << detail::fmt(r.operator_residual)
          << "\ncommensurate " << (r.commensurate ? "true" : "false") << "\n";
  } else {
    std::vector<int> sizes;
    for (double v : c.p.has("sizes") ? c.p.real_list("sizes") : std::vector<double>{64, 128, 256}) {
      if (v != std::floor(v) || !is_power_of_two(static_cast<long long>(v)) || v < 2 || v > 4096)
        c.p.fail("sizes", "sizes must be powers of two in [2, 4096]");
      sizes.push_back(static_cast<int>(v));
    }
    const auto st = weyl_refinement_study(th, s, t, sizes);
    rep["M"] = st.M;
    rep["residuals"] = st.residuals;
    rep["orders"] = st.orders;
    rep["decreasing_or_floor"] = st.decreasing_or_floor;
    for (std::size_t i = 0; i < st.M.size(); ++i) c.out << "M " << st.M[i] << " residual " << detail::fmt(st.residuals[i]) << "\n";
    c.out << "decreasing_or_floor " << (st.decreasing_or_floor ? "true" : "false") << "\n";
    if (!st.decreasing_or_floor) code = check_failed;
  }
  c.emit_json(rep);
  return code;
}

inline int cmd_butterfly(const Context& c) {
  const auto qmax = c.p.integer("qmax", 20);
  if (qmax < 1) c.p.fail(c.p.has("qmax") ? "qmax" : "config", "qmax must be at least 1");
  if (qmax > 200) c.p.fail("qmax", "qmax above the cost guard of 200");
  const auto res = c.p.integer("resolution", 32);
  if (res < 16 || res > 4096) c.p.fail("resolution", "resolution must be in [16, 4096]");
  std::vector<BandSpectrum> spectra;
  for (long long q = 1; q <= qmax; ++q)
    for (long long p = 0; p <= q; ++p)
      if (std::gcd(p, q) == 1) spectra.push_back(amo_spectrum(p, q, static_cast<int>(res), c.jobs));
  std::ostringstream csv;
  write_spectrum_csv(csv, spectra);
  std::size_t bands = 0;
  for (const auto& s : spectra) bands += s.bands.size();
  c.out << "fluxes " << spectra.size() << "\nbands " << bands << "\n";
  if (c.out_path.empty()) c.out << csv.str();
  c.emit(csv.str());
  return ok;
}

inline int cmd_holder(const Context& c) {
  const Rational base = c.p.rational("base", Rational(0));
  const std::vector<Rational> offsets =
      c.p.has("offsets") ? c.p.rational_list("offsets")
                         : std::vector<Rational>{Rational(1, 8), Rational(1, 16), Rational(1, 32), Rational(1, 64), Rational(1, 128)};
  const auto res = c.p.integer("resolution", 128);
  if (res < 16 || res > 4096) c.p.fail("resolution", "resolution must be in [16, 4096]");
  const auto scan = holder_scan(base, offsets, static_cast<int>(res), c.p.integer("qcap", 200), c.jobs);
  std::ostringstream csv;
  write_scan_csv(csv, scan);
  for (const auto& r : scan.rows) c.out << "delta " << r.delta.str() << " distance " << detail::fmt(r.distance) << "\n";
  c.out << "slope " << detail::fmt(scan.slope) << "\nC_fit " << detail::fmt(scan.C_fit) << "\nholder_half_consistent "
        << (scan.holder_half_consistent ? "true" : "false") << "\n";
  c.emit(csv.str());
  const bool within = scan.slope >= 0.4 && scan.slope <= 0.6 && scan.holder_half_consistent;
  return within ? ok : check_failed;
}

inline int cmd_audit(const Context& c) {
  const auto k = c.p.integer("k", 8100);
  const double target = c.p.real("target", 2500);
  const auto levels = c.p.integer("levels", 6);
  if (levels < 1 || levels > 64) c.p.fail("levels", "levels must be in [1, 64]");
  const auto r = audit_interpolation_constants(k, target, static_cast<int>(levels));
  c.out << "k " << r.k << "\ntarget " << detail::fmt(r.target) << "\nstep " << detail::fmt(r.step_value);
  if (r.step_exact) c.out << " (exact " << r.step_exact->str() << ")";
  c.out << "\nslack " << detail::fmt(r.slack) << "\nholds " << (r.holds ? "true" : "false") << "\nlevels_hold "
        << (r.levels_hold ? "true" : "false") << "\nfixed_point " << detail::fmt(r.fixed_point) << "\n";
  json rep{{"k", r.k},
           {"target", r.target},
           {"step", r.step_value},
           {"slack", r.slack},
           {"holds", r.holds},
           {"interior_levels", r.interior_levels},
           {"unit_levels", r.unit_levels},
           {"levels_hold", r.levels_hold},
           {"fixed_point", std::isfinite(r.fixed_point) ? json(r.fixed_point) : json(nullptr)}};
  if (r.step_exact) rep["step_exact"] = r.step_exact->str();
  c.emit_json(rep);
  return r.holds && r.levels_hold ? ok : check_failed;
}

inline int cmd_all_checks(const Context& c) {
  const auto scale = c.p.integer("scale", 1);
  if (scale < 1 || scale > 100) c.p.fail("scale", "scale must be in [1, 100]");
  const auto results = checks::run_property_suite({c.seed, c.jobs, static_cast<int>(scale)});
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    c.out << (r.pass ? "PASS " : "FAIL ") << r.module << ": " << r.name << (r.detail.empty() ? "" : " (" + r.detail + ")") << "\n";
    arr.push_back({{"module", r.module}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  c.emit_json({{"seed", c.seed}, {"results", arr}, {"pass", all}});
  return all ? ok : check_failed;
}

/// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> options;
    int (*fn)(const Context&);
  };
  const std::vector<Command> commands{
      {"algebra", "products, trace and expectations of polynomials from a JSON file", {"input"}, cmd_algebra},
      {"relations", "tensor-construct a tuple from a theta table and verify its relations", {"theta", "d", "tol", "cap"}, cmd_relations},
      {"symplectic", "normalize theta to canonical form (CSV matrix or upper-triangle list)", {"input", "theta", "d"}, cmd_symplectic},
      {"moyal", "star product of grid files", {"f", "g", "theta", "d", "grid", "method", "max-ops"}, cmd_moyal},
      {"weyl", "Weyl-relation residuals of the discretized translation/modulation groups", {"theta", "grid", "s", "t", "sizes"}, cmd_weyl},
      {"butterfly", "almost Mathieu band CSV over p/q with q <= qmax", {"qmax", "resolution"}, cmd_butterfly},
      {"holder", "spectral continuity scan and fitted exponent", {"base", "offsets", "resolution", "qcap"}, cmd_holder},
      {"audit", "interpolation constant bookkeeping", {"k", "target", "levels"}, cmd_audit},
      {"all-checks", "every module's property suite", {"scale"}, cmd_all_checks},
  };
  const std::vector<std::string> common{"config", "out", "jobs", "seed"};

  CLI::App app{"Numerical experiments on noncommutative tori"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    for (const auto* list : {&common, &cmd.options})
      for (const auto& o : *list) opts[cmd.name][o] = sub->add_option("--" + o, raw[cmd.name][o]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return validation;
  }

  for (const auto& cmd : commands) {
    if (!app.got_subcommand(cmd.name)) continue;
    std::set<std::string> allowed(common.begin(), common.end());
    allowed.erase("config");
    allowed.insert(cmd.options.begin(), cmd.options.end());
    Params p(cmd.name, allowed);
    try {
      const auto& o = opts[cmd.name];
      if (o.at("config")->count()) p.load_config(raw[cmd.name]["config"]);
      for (const auto& [name, opt] : o)
        if (name != "config" && opt->count()) p.set_flag(name, raw[cmd.name][name]);
      const auto jobs = p.integer("jobs", 0);
      if (jobs < 0 || jobs > 1024) p.fail("jobs", "jobs must be in [0, 1024]");
      const Context ctx{p, out, resolve_jobs(static_cast<int>(jobs)), p.unsigned_integer("seed", default_seed), p.text("out")};
      return cmd.fn(ctx);
    } catch (const rejected_input& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    } catch (const nct::domain_error& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    } catch (const std::overflow_error& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    } catch (const json::exception& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return validation;
    }
  }
  return validation;
}

}  // namespace nct::cli
