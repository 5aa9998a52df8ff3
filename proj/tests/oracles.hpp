#pragma once

// Test-only reference computations, written from the operator definitions
// rather than from the index formulas used in the library.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "polpath/linalg.hpp"
#include "polpath/qstate.hpp"

namespace oracle {

using polpath::Complex;
using polpath::Matrix2;
using polpath::Matrix4;
using polpath::Vector4;
using polpath::operator*;
using polpath::operator+;
using polpath::operator-;

inline Vector4 ket(char pol, int path) {
  Vector4 v{};
  v[(pol == 'H' ? 0 : 2) + path] = 1.0;
  return v;
}

// |a><b|
inline Matrix4 op(char pol_a, int path_a, char pol_b, int path_b) {
  return polpath::outer(ket(pol_a, path_a), ket(pol_b, path_b));
}

inline Complex tr(const Matrix4& o, const Matrix4& rho) { return polpath::trace(o * rho); }

// Expectation-value definitions of the one-path parameters.
inline std::array<double, 4> opsp(const Matrix4& rho, int p) {
  const Complex i{0.0, 1.0};
  return {tr(op('H', p, 'H', p) + op('V', p, 'V', p), rho).real(),
          tr(op('H', p, 'H', p) - op('V', p, 'V', p), rho).real(),
          tr(op('H', p, 'V', p) + op('V', p, 'H', p), rho).real(),
          (i * tr(op('V', p, 'H', p) - op('H', p, 'V', p), rho)).real()};
}

inline std::array<Complex, 4> tpsp(const Matrix4& rho) {
  const Complex i{0.0, 1.0};
  return {tr(op('H', 0, 'H', 1) + op('V', 0, 'V', 1), rho), tr(op('H', 0, 'H', 1) - op('V', 0, 'V', 1), rho),
          tr(op('H', 0, 'V', 1) + op('V', 0, 'H', 1), rho), i * tr(op('V', 0, 'H', 1) - op('H', 0, 'V', 1), rho)};
}

// I_p (x) B A(phi) assembled from explicit Kronecker products.
inline Matrix4 interferometer_product(double phi) {
  const double r = 1.0 / std::sqrt(2.0);
  const Matrix2 a{{{1.0, 0.0}, {0.0, std::polar(1.0, phi)}}};
  const Matrix2 b{{{r, -r}, {r, r}}};
  const Matrix2 id{{{1.0, 0.0}, {0.0, 1.0}}};
  Matrix4 out{};
  const Matrix2 path = b * a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[2 * i + k][2 * j + l] = id[i][j] * path[k][l];
  return out;
}

inline Eigen::Matrix4cd to_eigen(const Matrix4& m) {
  Eigen::Matrix4cd e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e(i, j) = m[i][j];
  return e;
}

// Ascending eigenvalues from Eigen's Hermitian solver.
inline std::array<double, 4> eigenvalues(const Matrix4& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
  std::array<double, 4> v{};
  for (int k = 0; k < 4; ++k) v[k] = solver.eigenvalues()(k);
  return v;
}

inline double max_abs(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline double max_abs(const std::array<Complex, 4>& a, const std::array<Complex, 4>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

inline std::array<double, 32> phase_grid() {
  std::array<double, 32> g{};
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / 32.0;
  return g;
}

}  // namespace oracle
