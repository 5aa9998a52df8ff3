#include "polpath/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace polpath {

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 m{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) m[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return m;
}

namespace {

double off_diagonal_norm(const Matrix4& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) s += std::norm(a[i][j]);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix4& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (const auto& x : row) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

HermitianEigen eigen_hermitian(const Matrix4& input) {
  constexpr double kOffTolerance = 1e-14;
  constexpr int kMaxSweeps = 100;

  Matrix4 a{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) a[i][j] = 0.5 * (input[i][j] + std::conj(input[j][i]));
  Matrix4 v = identity_matrix<4>();

  const double threshold = kOffTolerance * std::max(1.0, frobenius_norm(a));
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_diagonal_norm(a) > threshold; ++sweep) {
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t q = p + 1; q < 4; ++q) {
        const double r = std::abs(a[p][q]);
        if (r == 0.0) continue;
        // A unit phase makes the (p,q) element real, then a real Jacobi
        // rotation annihilates it.
        const Complex phase = std::conj(a[p][q]) / r;  // e^{-i arg a_pq}
        const double theta = (a[q][q].real() - a[p][p].real()) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        Matrix4 rot = identity_matrix<4>();
        rot[p][p] = c;
        rot[p][q] = s;
        rot[q][p] = -s * phase;
        rot[q][q] = c * phase;

        a = adjoint(rot) * a * rot;
        a[p][q] = a[q][p] = 0.0;
        for (std::size_t k = 0; k < 4; ++k) a[k][k] = a[k][k].real();
        v = v * rot;
      }
    }
  }

  std::array<std::size_t, 4> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x][x].real() < a[y][y].real(); });

  HermitianEigen out{};
  out.sweeps = sweep;
  for (std::size_t k = 0; k < 4; ++k) {
    out.values[k] = a[order[k]][order[k]].real();
    for (std::size_t i = 0; i < 4; ++i) out.vectors[i][k] = v[i][order[k]];
  }
  return out;
}

std::array<double, 4> singular_values(const Matrix4& input) {
  constexpr int kMaxSweeps = 100;
  constexpr double kOrthogonality = 1e-15;

  Matrix4 a = input;
  auto column_dot = [&](std::size_t p, std::size_t q) {
    Complex s{};
    for (std::size_t i = 0; i < 4; ++i) s += std::conj(a[i][p]) * a[i][q];
    return s;
  };

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t q = p + 1; q < 4; ++q) {
        const double alpha = column_dot(p, p).real();
        const double beta = column_dot(q, q).real();
        const Complex gamma = column_dot(p, q);
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= kOrthogonality * std::sqrt(alpha * beta)) continue;
        rotated = true;
        // Same rotation as eigen_hermitian applied to the Gram matrix A^dagger A.
        const Complex phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < 4; ++i) {
          const Complex ap = a[i][p];
          const Complex aq = a[i][q];
          a[i][p] = c * ap - s * phase * aq;
          a[i][q] = s * ap + c * phase * aq;
        }
      }
    }
    if (!rotated) break;
  }

  std::array<double, 4> sv{};
  for (std::size_t k = 0; k < 4; ++k) sv[k] = std::sqrt(column_dot(k, k).real());
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

}  // namespace polpath
