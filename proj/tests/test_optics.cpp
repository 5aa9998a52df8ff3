#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "polpath/optics.hpp"
#include "polpath/stokes.hpp"

using namespace polpath;

namespace {

constexpr double kPi = std::numbers::pi;

// 1 - |<expected|actual>|, zero when equal up to global phase.
double phase_free_defect(const PolarizationState& expected, const PolarizationState& actual) {
  return 1.0 - std::abs(inner(expected.amplitudes, actual.amplitudes));
}

double max_diff(const Vector4& a, const Vector4& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("quarter-wave plate") {
  const auto out_r = apply(qwp(kPi / 4), PolarizationState::r());
  CHECK(std::abs(out_r.amplitudes[0] - kI) < 1e-15);
  CHECK(std::abs(out_r.amplitudes[1]) < 1e-15);
  CHECK(phase_free_defect(PolarizationState::h(), out_r) <= 1e-12);
  CHECK(phase_free_defect(PolarizationState::v(), apply(qwp(kPi / 4), PolarizationState::l())) <= 1e-12);
  for (int k = 0; k < 16; ++k) CHECK(unitarity_defect(qwp(kPi * k / 16.0).entries) <= 1e-12);
}

TEST_CASE("half-wave plate") {
  const auto out_d = apply(hwp(kPi / 8), PolarizationState::d());
  CHECK(std::abs(out_d.amplitudes[0] - 1.0) < 1e-15);
  CHECK(std::abs(out_d.amplitudes[1]) < 1e-15);
  const auto out_a = apply(hwp(kPi / 8), PolarizationState::a());
  CHECK(std::abs(out_a.amplitudes[0]) < 1e-15);
  CHECK(std::abs(out_a.amplitudes[1] - 1.0) < 1e-15);  // +|V>, no sign flip

  const auto h0 = hwp(0.0).entries;
  CHECK(h0[0][0] == Complex(1.0));
  CHECK(h0[1][1] == Complex(-1.0));
  CHECK(h0[0][1] == Complex(0.0));
  for (int k = 0; k < 16; ++k) CHECK(unitarity_defect(hwp(kPi * k / 16.0).entries) <= 1e-12);
}

TEST_CASE("phase shifter and beam splitter") {
  CHECK(max_abs_diff(phase_shifter(0.0).entries, identity_matrix<4>()) == 0.0);

  const double r = 1.0 / std::sqrt(2.0);
  const auto b = path_beam_splitter();
  CHECK(b[0][0] == Complex(r));
  CHECK(b[0][1] == Complex(-r));
  CHECK(b[1][0] == Complex(r));
  CHECK(b[1][1] == Complex(r));

  // B^2 = [[0, -1], [1, 0]] on the path qubit, so |H,0> -> |H,1>.
  const Matrix2 b2 = b * b;
  CHECK(std::abs(b2[0][0]) < 1e-15);
  CHECK(std::abs(b2[0][1] + 1.0) < 1e-15);
  CHECK(std::abs(b2[1][0] - 1.0) < 1e-15);
  const auto bs = beam_splitter().entries;
  const Vector4 twice = bs * (bs * oracle::ket('H', 0));
  CHECK(max_diff(twice, oracle::ket('H', 1)) < 1e-15);
  const Vector4 twice_v1 = bs * (bs * oracle::ket('V', 1));
  CHECK(max_diff(twice_v1, Vector4{0.0, 0.0, -1.0, 0.0}) < 1e-15);

  for (double phi : oracle::phase_grid()) {
    CHECK(unitarity_defect(phase_shifter(phi).entries) <= 1e-12);
    CHECK(unitarity_defect(beam_splitter().entries) <= 1e-12);
  }
}

TEST_CASE("interferometer") {
  const double r = 1.0 / std::sqrt(2.0);
  const Vector4 col0 = interferometer(0.0).entries * oracle::ket('H', 0);
  CHECK(max_diff(col0, Vector4{r, r, 0.0, 0.0}) < 1e-15);

  for (double phi : oracle::phase_grid()) {
    const auto u = interferometer(phi).entries;
    const Complex e = std::polar(1.0, phi);
    CHECK(max_diff(u * oracle::ket('H', 1), Vector4{-e * r, e * r, 0.0, 0.0}) < 1e-15);
    CHECK(max_abs_diff(u, oracle::interferometer_product(phi)) <= 1e-15);
    CHECK(max_abs_diff(u, beam_splitter().entries * phase_shifter(phi).entries) <= 1e-15);
    CHECK(unitarity_defect(u) <= 1e-12);
    for (std::size_t c = 0; c < 4; ++c) {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < 4; ++i) norm2 += std::norm(u[i][c]);
      CHECK(std::abs(norm2 - 1.0) < 1e-15);
    }
  }
}

TEST_CASE("evolve") {
  const auto rho = random_density(21, 3);
  CHECK(max_abs_diff(evolve(BenchUnitary{}, rho).entries, rho.entries) == 0.0);

  const auto bell_out = evolve(interferometer(0.0), bell_pbs_state());
  CHECK(oracle::max_abs(opsp(bell_out, 0).s, {0.5, 0.0, -0.5, 0.0}) < 1e-15);

  BenchUnitary not_unitary;
  not_unitary.entries[0][0] = 1.1;
  CHECK_THROWS_AS(evolve(not_unitary, rho), std::invalid_argument);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto state = random_density(seed, 1 + static_cast<int>(seed % 4));
    const double phi = oracle::phase_grid()[seed % 32];
    const BenchUnitary u{interferometer(phi).entries * plate_on_path(qwp(0.1 * static_cast<double>(seed))).entries};
    const auto out = evolve(u, state);
    CHECK(std::abs(trace(out.entries) - 1.0) < 1e-12);
    CHECK(std::abs(purity(out) - purity(state)) < 1e-12);
    CHECK(oracle::max_abs(oracle::eigenvalues(out.entries), oracle::eigenvalues(state.entries)) < 1e-12);

    // Lossless interferometer: per-n sum over paths is conserved.
    const auto after = evolve(interferometer(phi), state);
    for (std::size_t n = 0; n < 4; ++n)
      CHECK(std::abs(opsp(state, 0).s[n] + opsp(state, 1).s[n] - opsp(after, 0).s[n] - opsp(after, 1).s[n]) < 1e-12);
  }
}

TEST_CASE("plate_on_path") {
  CHECK(max_abs_diff(plate_on_path(PlateUnitary{}).entries, identity_matrix<4>()) == 0.0);
  const Vector4 out = plate_on_path(hwp(kPi / 8)).entries * product_ket(PolarizationState::d(), 0);
  CHECK(max_diff(out, oracle::ket('H', 0)) < 1e-15);
  for (int k = 0; k < 16; ++k) CHECK(unitarity_defect(plate_on_path(qwp(0.2 * k)).entries) <= 1e-12);
}
