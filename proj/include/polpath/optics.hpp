#pragma once

// Unitaries for the bench elements. 2x2 operators act on polarization
// {|H>, |V>}; 4x4 operators act on the global polarization-path basis.
// Angles are radians, measured from the horizontal to the fast axis.

#include "polpath/qstate.hpp"

namespace polpath {

template <std::size_t N>
struct OpticalUnitary {
  static constexpr std::size_t dim = N;
  CMatrix<N> entries = identity_matrix<N>();
};

using PlateUnitary = OpticalUnitary<2>;
using BenchUnitary = OpticalUnitary<4>;

/// (1/sqrt2) [[i + cos2t, sin2t], [sin2t, i - cos2t]]
PlateUnitary qwp(double theta);
/// [[cos2t, sin2t], [sin2t, -cos2t]]
PlateUnitary hwp(double theta);

/// |0><0| + e^{i phi}|1><1| on the path qubit.
Matrix2 path_phase(double phi);
/// (1/sqrt2)(|0><0| - |0><1| + |1><0| + |1><1|) on the path qubit.
Matrix2 path_beam_splitter();

/// Identity on polarization tensored with the path operator.
BenchUnitary phase_shifter(double phi);
BenchUnitary beam_splitter();
/// Closed form of I_p (x) B A(phi).
BenchUnitary interferometer(double phi);
/// plate (x) identity on the path.
BenchUnitary plate_on_path(const PlateUnitary& plate);

PolarizationState apply(const PlateUnitary& u, const PolarizationState& state);

/// U rho U^dagger. Throws std::invalid_argument when U deviates from unitary
/// by more than 1e-10. The validity flag of rho carries over.
DensityMatrix evolve(const BenchUnitary& u, const DensityMatrix& rho);

}  // namespace polpath
