#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "rational.hpp"

namespace nct {

struct Band {
  double a = 0.0;
  double b = 0.0;
  friend bool operator==(const Band&, const Band&) = default;
};

/// Sorted union of disjoint closed intervals.
struct BandSpectrum {
  std::vector<Band> bands;
  long long p = 0;
  long long q = 1;
  int resolution = 0;

  double min() const { return bands.front().a; }
  double max() const { return bands.back().b; }
  double measure() const {
    double m = 0.0;
    for (const auto& b : bands) m += b.b - b.a;
    return m;
  }
};

/// Sorts intervals and merges those that overlap or nearly touch.
inline std::vector<Band> merge_bands(std::vector<Band> in, double tol = 1e-9) {
  for (const auto& b : in)
    if (!(b.a <= b.b)) throw rejected_input("band with a > b");
  std::sort(in.begin(), in.end(), [](const Band& x, const Band& y) { return x.a < y.a || (x.a == y.a && x.b < y.b); });
  std::vector<Band> out;
  for (const auto& b : in) {
    if (!out.empty() && b.a <= out.back().b + tol)
      out.back().b = std::max(out.back().b, b.b);
    else
      out.push_back(b);
  }
  return out;
}

inline BandSpectrum make_spectrum(std::vector<Band> bands, long long p = 0, long long q = 1, int resolution = 0) {
  return BandSpectrum{merge_bands(std::move(bands)), p, q, resolution};
}

/// q x q Bloch matrix of u + u^* + v + v^* at flux p/q:
/// diagonal 2 cos(k2 + 2 pi j p / q), ones on the cyclic subdiagonal with corner
/// entry e^{i q k1}, plus the adjoint of that shift.
inline CMatrix bloch_matrix(long long p, long long q, double k1, double k2) {
  if (q < 1) throw rejected_input("bloch_matrix needs q >= 1");
  CMatrix h = CMatrix::Zero(q, q);
  const Rational r(p, q);
  for (long long j = 0; j < q; ++j) {
    const double ang = k2 + two_pi * (r * Rational(j)).frac().to_double();
    h(j, j) = 2.0 * std::cos(ang);
  }
  CMatrix s = CMatrix::Zero(q, q);
  for (long long j = 0; j + 1 < q; ++j) s(j + 1, j) = 1.0;
  s(0, q - 1) += std::polar(1.0, static_cast<double>(q) * k1);
  h += s + s.adjoint();
  return h;
}

/// Spectrum of the almost Mathieu operator at flux p/q as the union over a
/// resolution x resolution grid of Bloch phases of the per-band eigenvalue ranges.
///
/// The phase grid covers [0, pi/q]^2, endpoints included; the characteristic
/// polynomial depends on the phases only through cos(q k1) + cos(q k2), so this
/// square already attains every value, including both extremes.
inline BandSpectrum amo_spectrum(long long p, long long q, int resolution, int jobs = 1) {
  if (q < 1) throw rejected_input("amo_spectrum needs q >= 1");
  if (resolution < 16) throw rejected_input("phase resolution must be at least 16");
  const std::size_t nq = static_cast<std::size_t>(q);
  const std::size_t cells = static_cast<std::size_t>(resolution) * resolution;
  std::vector<double> lo(cells * nq);
  const double span = pi / static_cast<double>(q);
  parallel_for(cells, jobs, [&](std::size_t c) {
    const double k1 = span * static_cast<double>(c / resolution) / (resolution - 1);
    const double k2 = span * static_cast<double>(c % resolution) / (resolution - 1);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(bloch_matrix(p, q, k1, k2), Eigen::EigenvaluesOnly);
    for (std::size_t b = 0; b < nq; ++b) lo[c * nq + b] = es.eigenvalues()(static_cast<Eigen::Index>(b));
  });
  std::vector<Band> bands(nq, Band{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t b = 0; b < nq; ++b) {
      bands[b].a = std::min(bands[b].a, lo[c * nq + b]);
      bands[b].b = std::max(bands[b].b, lo[c * nq + b]);
    }
  const long long g = std::gcd(p, q);
  return make_spectrum(std::move(bands), p / g, q / g, resolution);
}

namespace detail {

inline double distance_to_set(double x, const std::vector<Band>& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : s) {
    if (x >= b.a && x <= b.b) return 0.0;
    best = std::min(best, x < b.a ? b.a - x : x - b.b);
  }
  return best;
}

/// sup over A of the distance to B, attained at an endpoint of A or at a gap midpoint of B inside A.
inline double directed_hausdorff(const std::vector<Band>& A, const std::vector<Band>& B) {
  double r = 0.0;
  for (const auto& a : A) {
    r = std::max({r, distance_to_set(a.a, B), distance_to_set(a.b, B)});
    for (std::size_t i = 0; i + 1 < B.size(); ++i) {
      const double mid = 0.5 * (B[i].b + B[i + 1].a);
      if (mid > a.a && mid < a.b) r = std::max(r, distance_to_set(mid, B));
    }
  }
  return r;
}

}  // namespace detail

inline double hausdorff_distance(const BandSpectrum& A, const BandSpectrum& B) {
  if (A.bands.empty() || B.bands.empty()) throw rejected_input("hausdorff_distance of an empty spectrum");
  return std::max(detail::directed_hausdorff(A.bands, B.bands), detail::directed_hausdorff(B.bands, A.bands));
}

struct HolderRow {
  Rational delta;
  double distance = 0.0;
  long long p = 0;
  long long q = 1;
  bool in_fit = false;
};

struct HolderScan {
  Rational base;
  std::vector<HolderRow> rows;
  /// Least-squares fit log D = intercept + slope log delta over rows with D > 0.
  double slope = 0.0;
  double intercept = 0.0;
  /// exp(intercept)
  double C_fit = 0.0;
  /// D(delta) <= C_fit delta^{1/2} on every row.
  bool holder_half_consistent = false;
  std::size_t excluded_rows = 0;
};

/// D(delta) = hausdorff(spec(base), spec(base + delta)) for each offset, and the log-log fit.
inline HolderScan holder_scan(const Rational& base, const std::vector<Rational>& offsets, int resolution,
                              long long q_cap = 200, int jobs = 1) {
  if (offsets.empty()) throw rejected_input("holder_scan needs offsets");
  for (const auto& o : offsets)
    if (o < Rational(0)) throw rejected_input("holder_scan offsets must be non-negative");
  std::vector<Rational> sorted = offsets;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Rational> positive;
  for (const auto& o : sorted)
    if (!o.is_zero() && (positive.empty() || !(positive.back() == o))) positive.push_back(o);
  if (positive.size() < 2) throw rejected_input("holder_scan needs at least two distinct positive offsets");
  auto check_cap = [&](const Rational& r) {
    if (r.den() > q_cap) throw rejected_input("flux denominator " + std::to_string(r.den()) + " exceeds cost guard " + std::to_string(q_cap));
  };
  check_cap(base);
  for (const auto& o : sorted) check_cap(base + o);

  HolderScan out;
  out.base = base;
  const BandSpectrum ref = amo_spectrum(base.num(), base.den(), resolution, jobs);
  for (const auto& o : sorted) {
    const Rational th = base + o;
    HolderRow row{o, 0.0, th.num(), th.den(), false};
    if (!o.is_zero()) row.distance = hausdorff_distance(ref, amo_spectrum(th.num(), th.den(), resolution, jobs));
    row.in_fit = row.distance > 0.0;
    if (!row.in_fit) ++out.excluded_rows;
    out.rows.push_back(row);
  }
  std::vector<double> lx, ly;
  for (const auto& r : out.rows)
    if (r.in_fit) {
      lx.push_back(std::log(r.delta.to_double()));
      ly.push_back(std::log(r.distance));
    }
  if (lx.size() < 2) throw rejected_input("degenerate fit: fewer than two rows with positive distance");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n, my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw rejected_input("degenerate fit: offsets are all equal");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.C_fit = std::exp(out.intercept);
  out.holder_half_consistent = true;
  for (const auto& r : out.rows)
    if (r.distance > out.C_fit * std::sqrt(r.delta.to_double()) * (1 + 1e-12)) out.holder_half_consistent = false;
  return out;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// CSV rows p,q,band_index,a,b with a header line.
inline void write_spectrum_csv(std::ostream& os, const std::vector<BandSpectrum>& spectra) {
  os << "p,q,band_index,a,b\n";
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < s.bands.size(); ++i)
      os << s.p << ',' << s.q << ',' << i << ',' << detail::fmt_double(s.bands[i].a) << ','
         << detail::fmt_double(s.bands[i].b) << '\n';
}

/// CSV rows delta,distance with a header line.
inline void write_scan_csv(std::ostream& os, const HolderScan& scan) {
  os << "delta,distance\n";
  for (const auto& r : scan.rows) os << r.delta.str() << ',' << detail::fmt_double(r.distance) << '\n';
}

}  // namespace nct
