#include "polpath/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polpath {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

PlateUnitary qwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return {{{{kInvSqrt2 * (kI + c), kInvSqrt2 * s}, {kInvSqrt2 * s, kInvSqrt2 * (kI - c)}}}};
}

PlateUnitary hwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return {{{{c, s}, {s, -c}}}};
}

Matrix2 path_phase(double phi) { return {{{1.0, 0.0}, {0.0, std::polar(1.0, phi)}}}; }

Matrix2 path_beam_splitter() { return {{{kInvSqrt2, -kInvSqrt2}, {kInvSqrt2, kInvSqrt2}}}; }

BenchUnitary phase_shifter(double phi) { return {kron(identity_matrix<2>(), path_phase(phi))}; }

BenchUnitary beam_splitter() { return {kron(identity_matrix<2>(), path_beam_splitter())}; }

BenchUnitary interferometer(double phi) {
  const Complex e = kInvSqrt2 * std::polar(1.0, phi);
  const Complex one = kInvSqrt2;
  return {{{{one, -e, 0.0, 0.0}, {one, e, 0.0, 0.0}, {0.0, 0.0, one, -e}, {0.0, 0.0, one, e}}}};
}

BenchUnitary plate_on_path(const PlateUnitary& plate) { return {kron(plate.entries, identity_matrix<2>())}; }

PolarizationState apply(const PlateUnitary& u, const PolarizationState& state) {
  return {u.entries * state.amplitudes};
}

DensityMatrix evolve(const BenchUnitary& u, const DensityMatrix& rho) {
  if (unitarity_defect(u.entries) > 1e-10) throw std::invalid_argument("evolve: operator is not unitary");
  return {u.entries * rho.entries * adjoint(u.entries), rho.validated};
}

}  // namespace polpath
