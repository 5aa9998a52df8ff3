#pragma once

// Small fixed-size complex matrix helpers shared by every module. Everything
// lives in the 2- or 4-dimensional spaces of a single photon's polarization
// and polarization-path degrees of freedom, so plain std::array storage is
// enough and keeps all values trivially copyable.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>

namespace polpath {

using Complex = std::complex<double>;

template <std::size_t N>
using CVector = std::array<Complex, N>;

template <std::size_t N>
using CMatrix = std::array<std::array<Complex, N>, N>;

using Matrix2 = CMatrix<2>;
using Matrix4 = CMatrix<4>;
using Vector2 = CVector<2>;
using Vector4 = CVector<4>;

inline constexpr Complex kI{0.0, 1.0};

template <std::size_t N>
constexpr CMatrix<N> zero_matrix() {
  CMatrix<N> m{};
  for (auto& row : m) row.fill(Complex{});
  return m;
}

template <std::size_t N>
constexpr CMatrix<N> identity_matrix() {
  auto m = zero_matrix<N>();
  for (std::size_t k = 0; k < N; ++k) m[k][k] = 1.0;
  return m;
}

template <std::size_t N>
CMatrix<N> operator*(const CMatrix<N>& a, const CMatrix<N>& b) {
  auto c = zero_matrix<N>();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      const Complex aik = a[i][k];
      for (std::size_t j = 0; j < N; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

template <std::size_t N>
CVector<N> operator*(const CMatrix<N>& a, const CVector<N>& v) {
  CVector<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) out[i] += a[i][k] * v[k];
  return out;
}

template <std::size_t N>
CMatrix<N> operator+(const CMatrix<N>& a, const CMatrix<N>& b) {
  CMatrix<N> c = a;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] += b[i][j];
  return c;
}

template <std::size_t N>
CMatrix<N> operator-(const CMatrix<N>& a, const CMatrix<N>& b) {
  CMatrix<N> c = a;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] -= b[i][j];
  return c;
}

template <std::size_t N>
CMatrix<N> scaled(const CMatrix<N>& a, Complex factor) {
  CMatrix<N> c = a;
  for (auto& row : c)
    for (auto& x : row) x *= factor;
  return c;
}

template <std::size_t N>
CMatrix<N> adjoint(const CMatrix<N>& a) {
  CMatrix<N> c{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) c[i][j] = std::conj(a[j][i]);
  return c;
}

template <std::size_t N>
Complex trace(const CMatrix<N>& a) {
  Complex t{};
  for (std::size_t k = 0; k < N; ++k) t += a[k][k];
  return t;
}

/// Largest |a_ij - b_ij|.
template <std::size_t N>
double max_abs_diff(const CMatrix<N>& a, const CMatrix<N>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

/// Largest |a_ij - conj(a_ji)|; zero for an exactly Hermitian matrix.
template <std::size_t N>
double hermiticity_defect(const CMatrix<N>& a) {
  double d = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) d = std::max(d, std::abs(a[i][j] - std::conj(a[j][i])));
  return d;
}

/// Largest entrywise deviation of U^dagger U from the identity.
template <std::size_t N>
double unitarity_defect(const CMatrix<N>& u) {
  return max_abs_diff(adjoint(u) * u, identity_matrix<N>());
}

template <std::size_t N>
CMatrix<N> outer(const CVector<N>& ket, const CVector<N>& bra) {
  CMatrix<N> m{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) m[i][j] = ket[i] * std::conj(bra[j]);
  return m;
}

template <std::size_t N>
Complex inner(const CVector<N>& a, const CVector<N>& b) {
  Complex s{};
  for (std::size_t k = 0; k < N; ++k) s += std::conj(a[k]) * b[k];
  return s;
}

/// Kronecker product of two 2x2 matrices; the first factor is the slow index.
Matrix4 kron(const Matrix2& a, const Matrix2& b);

/// Eigen-decomposition of a Hermitian 4x4 matrix.
struct HermitianEigen {
  std::array<double, 4> values;  // ascending
  Matrix4 vectors;               // column k is the eigenvector of values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for Hermitian 4x4 input. Only the Hermitian part
/// of `a` is used. Iterates until the off-diagonal Frobenius norm falls below
/// 1e-14 (scaled by the matrix norm when that exceeds one) or 100 sweeps.
HermitianEigen eigen_hermitian(const Matrix4& a);

/// Singular values (descending) by one-sided Jacobi rotations on the columns.
/// Absolute accuracy is about machine epsilon times the norm, so exactly
/// rank-deficient products come out with singular values near 1e-16 instead
/// of the sqrt(1e-16) a Gram-matrix eigensolve would give.
std::array<double, 4> singular_values(const Matrix4& a);

/// V f(Lambda) V^dagger for a decomposition produced by eigen_hermitian.
template <class F>
Matrix4 spectral_apply(const HermitianEigen& e, F&& f) {
  auto m = zero_matrix<4>();
  for (std::size_t k = 0; k < 4; ++k) {
    const double fk = f(e.values[k]);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        m[i][j] += fk * e.vectors[i][k] * std::conj(e.vectors[j][k]);
  }
  return m;
}

}  // namespace polpath
