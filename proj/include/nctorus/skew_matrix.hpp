#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rational.hpp"

namespace nct {

/// Real d x d skew-symmetric matrix, stored by its strict upper triangle.
///
/// Upper entries are ordered (0,1), (0,2), ..., (0,d-1), (1,2), ... . When every
/// entry was supplied as a Rational the exact values are kept alongside the
/// floating-point copy, and phase computations downstream stay exact.
class SkewMatrix {
 public:
  SkewMatrix() = default;

  SkewMatrix(int d, const std::vector<double>& upper) : d_(check_dim(d)), m_(Eigen::MatrixXd::Zero(d, d)) {
    if (upper.size() != upper_size(d))
      throw rejected_input("skew matrix of dimension " + std::to_string(d) + " needs " +
                           std::to_string(upper_size(d)) + " upper entries, got " +
                           std::to_string(upper.size()));
    std::size_t idx = 0;
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        const double v = upper[idx++];
        if (!std::isfinite(v)) throw rejected_input("skew matrix entry is not finite");
        m_(j, k) = v;
        m_(k, j) = -v;
      }
  }

  SkewMatrix(int d, const std::vector<Rational>& upper) : d_(check_dim(d)), m_(Eigen::MatrixXd::Zero(d, d)) {
    if (upper.size() != upper_size(d))
      throw rejected_input("skew matrix of dimension " + std::to_string(d) + " needs " +
                           std::to_string(upper_size(d)) + " upper entries, got " +
                           std::to_string(upper.size()));
    exact_.assign(static_cast<std::size_t>(d * d), Rational(0));
    std::size_t idx = 0;
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        const Rational v = upper[idx++];
        exact_[static_cast<std::size_t>(j * d + k)] = v;
        exact_[static_cast<std::size_t>(k * d + j)] = -v;
        m_(j, k) = v.to_double();
        m_(k, j) = -v.to_double();
      }
  }

  /// Builds from a full matrix. Requires exact skew symmetry and a zero diagonal.
  static SkewMatrix from_matrix(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw rejected_input("skew matrix must be square");
    const int d = static_cast<int>(a.rows());
    std::vector<double> upper;
    for (int j = 0; j < d; ++j) {
      if (a(j, j) != 0.0) throw rejected_input("skew matrix has nonzero diagonal");
      for (int k = j + 1; k < d; ++k) {
        if (a(j, k) != -a(k, j)) throw rejected_input("matrix is not skew-symmetric");
        upper.push_back(a(j, k));
      }
    }
    return SkewMatrix(d, upper);
  }

  static SkewMatrix zero(int d) { return SkewMatrix(d, std::vector<Rational>(upper_size(check_dim(d)), Rational(0))); }

  static std::size_t upper_size(int d) { return static_cast<std::size_t>(d) * static_cast<std::size_t>(d - 1) / 2; }

  int dim() const noexcept { return d_; }
  double operator()(int j, int k) const { return m_(j, k); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  bool is_rational() const noexcept { return !exact_.empty() || d_ <= 1; }
  Rational exact(int j, int k) const {
    if (d_ <= 1) return Rational(0);
    if (exact_.empty()) throw rejected_input("skew matrix has no exact representation");
    return exact_[static_cast<std::size_t>(j * d_ + k)];
  }

  std::vector<double> upper() const {
    std::vector<double> out;
    for (int j = 0; j < d_; ++j)
      for (int k = j + 1; k < d_; ++k) out.push_back(m_(j, k));
    return out;
  }
  std::vector<Rational> upper_exact() const {
    std::vector<Rational> out;
    for (int j = 0; j < d_; ++j)
      for (int k = j + 1; k < d_; ++k) out.push_back(exact(j, k));
    return out;
  }

  /// Bilinear form s^T theta t.
  template <class V1, class V2>
  double form(const V1& s, const V2& t) const {
    double acc = 0.0;
    for (int j = 0; j < d_; ++j)
      for (int k = 0; k < d_; ++k)
        if (j != k) acc += static_cast<double>(s[j]) * m_(j, k) * static_cast<double>(t[k]);
    return acc;
  }

  /// Same matrix with every entry multiplied by c.
  SkewMatrix scaled(double c) const {
    std::vector<double> u = upper();
    for (double& v : u) v *= c;
    return SkewMatrix(d_, u);
  }
  SkewMatrix scaled(const Rational& c) const {
    if (!is_rational()) return scaled(c.to_double());
    std::vector<Rational> u = upper_exact();
    for (Rational& v : u) v *= c;
    return SkewMatrix(d_, u);
  }

  /// Principal submatrix on the first k coordinates.
  SkewMatrix leading(int k) const {
    if (k < 1 || k > d_) throw rejected_input("leading block size out of range");
    if (is_rational() && d_ > 1) {
      std::vector<Rational> u;
      for (int j = 0; j < k; ++j)
        for (int l = j + 1; l < k; ++l) u.push_back(exact(j, l));
      return SkewMatrix(k, u);
    }
    std::vector<double> u;
    for (int j = 0; j < k; ++j)
      for (int l = j + 1; l < k; ++l) u.push_back(m_(j, l));
    return SkewMatrix(k, u);
  }

  friend bool operator==(const SkewMatrix& a, const SkewMatrix& b) { return a.d_ == b.d_ && a.m_ == b.m_; }

 private:
  static int check_dim(int d) {
    if (d < 1) throw rejected_input("skew matrix dimension must be at least 1");
    return d;
  }

  int d_ = 0;
  Eigen::MatrixXd m_;
  std::vector<Rational> exact_;
};

}  // namespace nct
