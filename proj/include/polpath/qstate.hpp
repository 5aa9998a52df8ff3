#pragma once

// Density matrices of one photon's joint polarization and path state.
//
// Basis order is fixed everywhere as {|H,0>, |H,1>, |V,0>, |V,1>}: the
// polarization is the slow index and the path the fast one, so basis index
// = 2 * pol + path with H = 0, V = 1. Formulas written with 1-based rho_jk
// map to entries[j - 1][k - 1].

#include <cstdint>

#include "json.hpp"
#include "polpath/linalg.hpp"

namespace polpath {

enum class Pol : std::size_t { H = 0, V = 1 };

constexpr std::size_t basis_index(Pol pol, std::size_t path) {
  return 2 * static_cast<std::size_t>(pol) + path;
}

struct DensityMatrix {
  Matrix4 entries = zero_matrix<4>();
  // Set only by constructors that guarantee a physical state. Raw linear
  // inversion output keeps it unset.
  bool validated = false;

  Complex operator()(std::size_t row, std::size_t col) const { return entries[row][col]; }
};

/// Single-photon polarization amplitudes over {|H>, |V>}.
struct PolarizationState {
  Vector2 amplitudes{};

  static PolarizationState h();
  static PolarizationState v();
  static PolarizationState d();  // (|H> + |V>)/sqrt2
  static PolarizationState a();  // (|H> - |V>)/sqrt2
  static PolarizationState r();  // (|H> + i|V>)/sqrt2
  static PolarizationState l();  // (|H> - i|V>)/sqrt2
};

/// |pol> (x) |path> as a 4-vector in the global basis.
Vector4 product_ket(const PolarizationState& pol, std::size_t path);

struct ValidityReport {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool is_physical = false;
};

inline constexpr double kPhysicalTolerance = 1e-10;

DensityMatrix pure_state(const Vector4& amplitudes);
/// (|H,0> + |V,1>)/sqrt2, what a PBS makes of a diagonally polarized photon.
DensityMatrix bell_pbs_state();
DensityMatrix maximally_mixed();
/// Ginibre-ensemble state of the given rank (1..4), reproducible per seed.
DensityMatrix random_density(std::uint64_t seed, int rank);

ValidityReport validate_density(const DensityMatrix& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. Throws DataError
/// for unphysical input.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double purity(const DensityMatrix& rho);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// { "basis": ["H0","H1","V0","V1"], "re": 4x4, "im": 4x4 }
nlohmann::json matrix_to_json(const Matrix4& m);
Matrix4 matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DensityMatrix& rho);
/// Parses the matrix; the result is marked validated only if it is physical.
DensityMatrix density_from_json(const nlohmann::json& j);

}  // namespace polpath
