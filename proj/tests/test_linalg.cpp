#include "doctest.h"
#include "oracles.hpp"
#include "polpath/linalg.hpp"
#include "polpath/qstate.hpp"

using namespace polpath;

TEST_CASE("Jacobi eigenvalues agree with an independent Hermitian solver") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto rho = random_density(seed, 1 + static_cast<int>(seed % 4));
    // Shift and scale so the matrix is indefinite and not trace-one.
    Matrix4 m = scaled(rho.entries, 3.0) - scaled(identity_matrix<4>(), 0.4);
    m[0][3] += Complex(0.1, -0.2);
    m[3][0] += Complex(0.1, 0.2);
    const auto mine = eigen_hermitian(m);
    CHECK(oracle::max_abs(mine.values, oracle::eigenvalues(m)) < 1e-13);
    CHECK(mine.sweeps <= 100);
    const Matrix4 back = spectral_apply(mine, [](double x) { return x; });
    CHECK(max_abs_diff(back, m) < 1e-13);
    CHECK(unitarity_defect(mine.vectors) < 1e-13);
  }
}

TEST_CASE("Jacobi handles already diagonal and degenerate input") {
  Matrix4 d = zero_matrix<4>();
  d[0][0] = 1.5;
  d[1][1] = -0.5;
  const auto e = eigen_hermitian(d);
  CHECK(e.sweeps == 0);
  CHECK(e.values[0] == -0.5);
  CHECK(e.values[3] == 1.5);

  const auto id = eigen_hermitian(identity_matrix<4>());
  for (double x : id.values) CHECK(x == 1.0);
}

TEST_CASE("kron uses the first factor as the slow index") {
  const Matrix2 a{{{1.0, 2.0}, {3.0, 4.0}}};
  const Matrix2 b{{{0.0, 1.0}, {1.0, 0.0}}};
  const auto k = kron(a, b);
  CHECK(k[0][1] == Complex(1.0));
  CHECK(k[1][0] == Complex(1.0));
  CHECK(k[2][1] == Complex(3.0));
  CHECK(k[2][3] == Complex(4.0));
  CHECK(k[0][3] == Complex(2.0));
  CHECK(k[0][0] == Complex(0.0));
}

TEST_CASE("one-sided Jacobi singular values agree with Eigen's SVD") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = random_density(seed, 4).entries;
    const auto b = random_density(seed + 500, 1 + static_cast<int>(seed % 4)).entries;
    Matrix4 m = a * b;
    m[1][2] += Complex(0.3, 0.1);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(oracle::to_eigen(m));
    const auto mine = singular_values(m);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(mine[k] - svd.singularValues()(k)) < 1e-13);
  }
}

TEST_CASE("singular values of an exactly rank-one product stay near zero") {
  const auto p = pure_state({1.0, Complex(0.0, 2.0), 0.5, -1.0}).entries;
  const auto sv = singular_values(p * p);
  CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 1; k < 4; ++k) CHECK(sv[k] < 1e-15);
}
