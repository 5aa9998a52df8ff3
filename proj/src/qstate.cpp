#include "polpath/qstate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polpath/errors.hpp"
#include "polpath/random.hpp"

namespace polpath {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr double kPureTolerance = 1e-12;
constexpr double kRankFloor = 1e-13;

// Eigenvector of the largest eigenvalue when the state is pure to within
// kPureTolerance.
bool dominant_pure_vector(const DensityMatrix& rho, Vector4& psi) {
  if (std::abs(purity(rho) - 1.0) > kPureTolerance) return false;
  const auto e = eigen_hermitian(rho.entries);
  for (std::size_t i = 0; i < 4; ++i) psi[i] = e.vectors[i][3];
  return true;
}

void require_physical(const DensityMatrix& rho, const char* what) {
  if (!validate_density(rho).is_physical)
    throw DataError(std::string(what) + ": argument is not a physical density matrix");
}

}  // namespace

PolarizationState PolarizationState::h() { return {{1.0, 0.0}}; }
PolarizationState PolarizationState::v() { return {{0.0, 1.0}}; }
PolarizationState PolarizationState::d() { return {{kInvSqrt2, kInvSqrt2}}; }
PolarizationState PolarizationState::a() { return {{kInvSqrt2, -kInvSqrt2}}; }
PolarizationState PolarizationState::r() { return {{kInvSqrt2, kI * kInvSqrt2}}; }
PolarizationState PolarizationState::l() { return {{kInvSqrt2, -kI * kInvSqrt2}}; }

Vector4 product_ket(const PolarizationState& pol, std::size_t path) {
  Vector4 ket{};
  ket[basis_index(Pol::H, path)] = pol.amplitudes[0];
  ket[basis_index(Pol::V, path)] = pol.amplitudes[1];
  return ket;
}

DensityMatrix pure_state(const Vector4& amplitudes) {
  double norm2 = 0.0;
  for (const auto& c : amplitudes) norm2 += std::norm(c);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw std::invalid_argument("degenerate state vector");
  Vector4 psi = amplitudes;
  for (auto& c : psi) c /= std::sqrt(norm2);
  DensityMatrix rho{outer(psi, psi), true};
  // Diagonal of |psi><psi| is real up to rounding of conj products; pin it.
  for (std::size_t k = 0; k < 4; ++k) rho.entries[k][k] = std::norm(psi[k]);
  return rho;
}

DensityMatrix bell_pbs_state() { return pure_state({kInvSqrt2, 0.0, 0.0, kInvSqrt2}); }

DensityMatrix maximally_mixed() { return {scaled(identity_matrix<4>(), 0.25), true}; }

DensityMatrix random_density(std::uint64_t seed, int rank) {
  if (rank < 1 || rank > 4) throw std::invalid_argument("random_density: rank must be in 1..4");
  auto rng = keyed_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto g = zero_matrix<4>();
  for (std::size_t i = 0; i < 4; ++i)
    for (int k = 0; k < rank; ++k) {
      const double re = normal(rng);
      const double im = normal(rng);
      g[i][k] = {re, im};
    }
  Matrix4 m = g * adjoint(g);
  const double tr = trace(m).real();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      m[i][j] /= tr;
      m[j][i] = std::conj(m[i][j]);
    }
    m[i][i] = m[i][i].real() / tr;
  }
  return {m, true};
}

ValidityReport validate_density(const DensityMatrix& rho) {
  ValidityReport r;
  r.hermiticity_defect = hermiticity_defect(rho.entries);
  r.trace_defect = std::abs(trace(rho.entries) - 1.0);
  r.min_eigenvalue = eigen_hermitian(rho.entries).values[0];
  r.is_physical = r.hermiticity_defect <= kPhysicalTolerance && r.trace_defect <= kPhysicalTolerance &&
                  r.min_eigenvalue >= -kPhysicalTolerance;
  return r;
}

double purity(const DensityMatrix& rho) { return trace(rho.entries * rho.entries).real(); }

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_physical(rho, "fidelity");
  require_physical(sigma, "fidelity");

  double f = 0.0;
  Vector4 psi{};
  if (dominant_pure_vector(rho, psi)) {
    f = inner(psi, sigma.entries * psi).real();
  } else if (dominant_pure_vector(sigma, psi)) {
    f = inner(psi, rho.entries * psi).real();
  } else {
    // F = (sum of singular values of sqrt(rho) sqrt(sigma))^2. Eigenvalues
    // that are zero up to rounding would contribute sqrt(1e-17) ~ 3e-9 each
    // to the square roots, so they are treated as exact zeros.
    auto root = [](const DensityMatrix& m) {
      return spectral_apply(eigen_hermitian(m.entries), [](double x) { return x > kRankFloor ? std::sqrt(x) : 0.0; });
    };
    double root_sum = 0.0;
    for (double x : singular_values(root(rho) * root(sigma))) root_sum += x;
    f = root_sum * root_sum;
  }
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const auto e = eigen_hermitian(rho.entries - sigma.entries);
  double s = 0.0;
  for (double x : e.values) s += std::abs(x);
  return 0.5 * s;
}

nlohmann::json matrix_to_json(const Matrix4& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (const auto& row : m) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ir = nlohmann::json::array();
    for (const auto& x : row) {
      rr.push_back(x.real());
      ir.push_back(x.imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"basis", {"H0", "H1", "V0", "V1"}}, {"re", re}, {"im", im}};
}

Matrix4 matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw DataError("matrix JSON must be an object with \"re\" and \"im\"");
  if (j.contains("basis") && j.at("basis") != nlohmann::json{"H0", "H1", "V0", "V1"})
    throw DataError("matrix JSON basis must be [\"H0\",\"H1\",\"V0\",\"V1\"]");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  auto shape_ok = [](const nlohmann::json& a) {
    if (!a.is_array() || a.size() != 4) return false;
    for (const auto& row : a) {
      if (!row.is_array() || row.size() != 4) return false;
      for (const auto& x : row)
        if (!x.is_number()) return false;
    }
    return true;
  };
  if (!shape_ok(re) || !shape_ok(im)) throw DataError("matrix JSON \"re\"/\"im\" must be 4x4 numeric arrays");
  Matrix4 m{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) m[i][k] = {re[i][k].get<double>(), im[i][k].get<double>()};
  return m;
}

nlohmann::json to_json(const DensityMatrix& rho) { return matrix_to_json(rho.entries); }

DensityMatrix density_from_json(const nlohmann::json& j) {
  DensityMatrix rho{matrix_from_json(j), false};
  rho.validated = validate_density(rho).is_physical;
  return rho;
}

}  // namespace polpath
