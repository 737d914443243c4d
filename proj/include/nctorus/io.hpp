#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "finite_reps.hpp"
#include "grid.hpp"
#include "rational.hpp"
#include "skew_matrix.hpp"
#include "twisted_algebra.hpp"

namespace nct::io {

using json = nlohmann::json;

/// Writes content to path through a temporary file in the same directory and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw rejected_input("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw rejected_input("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw rejected_input("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Line and column (1-based) of a byte offset in text.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

/// Parses JSON, turning parse errors into rejected_input with "name:line:col: message".
inline json parse_json(const std::string& text, const std::string& name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    const auto cut = msg.find("syntax error");
    if (cut != std::string::npos) msg = msg.substr(cut);
    throw rejected_input(name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

/// A theta entry is a JSON number or a "p/q" string.
inline bool entry_is_exact(const json& v) { return v.is_string() || v.is_number_integer(); }

inline Rational entry_rational(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw rejected_input("theta entry is not rational");
}

inline double entry_double(const json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>()).to_double();
  if (v.is_number()) return v.get<double>();
  throw rejected_input("theta entry must be a number or a \"p/q\" string");
}

inline int dim_from_upper(std::size_t n) {
  int d = 1;
  while (SkewMatrix::upper_size(d) < n) ++d;
  if (SkewMatrix::upper_size(d) != n) throw rejected_input("theta length " + std::to_string(n) + " is not d(d-1)/2");
  return d;
}

inline SkewMatrix theta_from_json(const json& arr, int d = 0) {
  if (!arr.is_array()) throw rejected_input("theta must be an array of upper-triangle entries");
  if (d == 0) d = dim_from_upper(arr.size());
  bool exact = true;
  for (const auto& v : arr) exact = exact && entry_is_exact(v);
  if (exact) {
    std::vector<Rational> u;
    for (const auto& v : arr) u.push_back(entry_rational(v));
    return SkewMatrix(d, u);
  }
  std::vector<double> u;
  for (const auto& v : arr) u.push_back(entry_double(v));
  return SkewMatrix(d, u);
}

inline json theta_to_json(const SkewMatrix& theta) {
  json arr = json::array();
  if (theta.is_rational() && theta.dim() > 1) {
    for (const auto& r : theta.upper_exact()) arr.push_back(r.str());
  } else {
    for (double v : theta.upper()) arr.push_back(v);
  }
  return arr;
}

/// {"d": d, "theta": [...], "terms": [{"m": [...], "re": x, "im": y}, ...]}
inline json polynomial_to_json(const NCPolynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({{"m", m.values()}, {"re", c.real()}, {"im", c.imag()}});
  return {{"d", p.dim()}, {"theta", theta_to_json(p.theta())}, {"terms", terms}};
}

inline NCPolynomial polynomial_from_json(const json& j, const std::optional<SkewMatrix>& theta_override = std::nullopt) {
  if (!j.is_object()) throw rejected_input("polynomial must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "d" && key != "theta" && key != "terms") throw rejected_input("unknown polynomial key '" + key + "'");
  const int d = j.contains("d") ? j.at("d").get<int>() : 0;
  SkewMatrix theta = theta_override ? *theta_override
                                    : (j.contains("theta") ? theta_from_json(j.at("theta"), d)
                                                           : throw rejected_input("polynomial needs theta"));
  NCPolynomial p(theta);
  if (!j.contains("terms")) return p;
  if (!j.at("terms").is_array()) throw rejected_input("terms must be an array");
  for (const auto& t : j.at("terms")) {
    if (!t.is_object() || !t.contains("m")) throw rejected_input("term needs an exponent m");
    for (const auto& [key, _] : t.items())
      if (key != "m" && key != "re" && key != "im") throw rejected_input("unknown term key '" + key + "'");
    const auto m = t.at("m").get<std::vector<std::int64_t>>();
    const double re = t.value("re", 0.0), im = t.value("im", 0.0);
    p.add_term(MultiIndex(m), cplx(re, im));
  }
  return p;
}

/// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.
inline json matrix_to_json(const CMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline CMatrix matrix_from_json(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>(), c = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != r * c) throw rejected_input("matrix data has wrong length");
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) {
      const auto& e = data[static_cast<std::size_t>(i * c + k)];
      m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

inline json tuple_to_json(const UnitaryTuple& t) {
  json mats = json::array();
  for (const auto& m : t.matrices()) mats.push_back(matrix_to_json(m));
  return {{"d", t.count()}, {"size", t.size()}, {"sigma", matrix_to_json(t.sigma())}, {"tol", t.tol()}, {"matrices", mats}};
}

inline UnitaryTuple tuple_from_json(const json& j) {
  std::vector<CMatrix> mats;
  for (const auto& m : j.at("matrices")) mats.push_back(matrix_from_json(m));
  return UnitaryTuple(std::move(mats), matrix_from_json(j.at("sigma")), j.value("tol", 1e-12));
}

namespace detail {

inline void put_f32(std::string& out, float f) {
  auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
}

inline float get_f32(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

}  // namespace detail

/// One JSON header line {"d", "L", "M", "domain"} then M^d little-endian complex64 values.
inline std::string encode_grid(const GridFunction& f) {
  json h = {{"d", f.dim()},
            {"L", f.half_length()},
            {"M", f.points_per_axis()},
            {"domain", f.domain() == Domain::position ? "position" : "frequency"}};
  std::string out = h.dump() + "\n";
  out.reserve(out.size() + f.size() * 8);
  for (const auto& c : f.values()) {
    detail::put_f32(out, static_cast<float>(c.real()));
    detail::put_f32(out, static_cast<float>(c.imag()));
  }
  return out;
}

inline GridFunction decode_grid(const std::string& bytes, const std::string& name = "grid") {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw rejected_input(name + ": missing grid header line");
  const json h = parse_json(bytes.substr(0, nl), name);
  for (const auto& [key, _] : h.items())
    if (key != "d" && key != "L" && key != "M" && key != "domain") throw rejected_input(name + ": unknown header key '" + key + "'");
  const std::string dom = h.value("domain", std::string("position"));
  if (dom != "position" && dom != "frequency") throw rejected_input(name + ": domain must be position or frequency");
  GridFunction f(h.at("d").get<int>(), h.at("L").get<double>(), h.at("M").get<int>(),
                 dom == "position" ? Domain::position : Domain::frequency);
  const std::size_t need = f.size() * 8;
  if (bytes.size() - nl - 1 != need)
    throw rejected_input(name + ": payload has " + std::to_string(bytes.size() - nl - 1) + " bytes, expected " +
                         std::to_string(need));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = cplx(detail::get_f32(p + 8 * i), detail::get_f32(p + 8 * i + 4));
  return f;
}

}  // namespace nct::io
