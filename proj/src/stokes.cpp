#include "polpath/stokes.hpp"

#include <cmath>
#include <stdexcept>

#include "polpath/errors.hpp"

namespace polpath {

namespace {

constexpr double kHermitianGuard = 1e-9;

void require_hermitian(const DensityMatrix& rho) {
  if (hermiticity_defect(rho.entries) > kHermitianGuard)
    throw std::invalid_argument("Stokes parameters need a Hermitian matrix (defect above 1e-9)");
}

}  // namespace

std::array<double, 4> StokesSet::path_sums() const {
  std::array<double, 4> sums{};
  for (std::size_t n = 0; n < 4; ++n) sums[n] = path0.s[n] + path1.s[n];
  return sums;
}

OnePathStokes opsp(const DensityMatrix& rho, std::size_t path) {
  if (path > 1) throw std::invalid_argument("opsp: path must be 0 or 1");
  require_hermitian(rho);
  const std::size_t h = basis_index(Pol::H, path);
  const std::size_t v = basis_index(Pol::V, path);
  const auto& r = rho.entries;
  // Imaginary residues are at most the Hermiticity defect; keep real parts.
  return {path,
          {(r[h][h] + r[v][v]).real(), (r[h][h] - r[v][v]).real(), (r[h][v] + r[v][h]).real(),
           (kI * (r[h][v] - r[v][h])).real()}};
}

TwoPathStokes tpsp(const DensityMatrix& rho) {
  require_hermitian(rho);
  const auto& r = rho.entries;
  return {{r[1][0] + r[3][2], r[1][0] - r[3][2], r[1][2] + r[3][0], kI * (r[1][2] - r[3][0])}};
}

StokesSet stokes_of(const DensityMatrix& rho) { return {opsp(rho, 0), opsp(rho, 1), tpsp(rho)}; }

DensityMatrix reconstruct(const StokesSet& set) {
  const auto& a = set.path0.s;
  const auto& b = set.path1.s;
  const auto& S = set.cross.S;

  Matrix4 m = zero_matrix<4>();
  m[0][0] = a[0] + a[1];
  m[1][1] = b[0] + b[1];
  m[2][2] = a[0] - a[1];
  m[3][3] = b[0] - b[1];
  m[1][0] = S[0] + S[1];
  m[2][0] = a[2] + kI * a[3];
  m[2][1] = std::conj(S[2]) + kI * std::conj(S[3]);
  m[3][0] = S[2] + kI * S[3];
  m[3][1] = b[2] + kI * b[3];
  m[3][2] = S[0] - S[1];
  for (std::size_t i = 0; i < 4; ++i) {
    m[i][i] *= 0.5;
    for (std::size_t j = 0; j < i; ++j) {
      m[i][j] *= 0.5;
      m[j][i] = std::conj(m[i][j]);
    }
  }
  return {m, false};
}

OnePathStokes predicted_fringe(const StokesSet& set, std::size_t out_path, double phi) {
  if (out_path > 1) throw std::invalid_argument("predicted_fringe: out_path must be 0 or 1");
  const double sign = out_path == 0 ? -1.0 : 1.0;
  const Complex rot = std::polar(1.0, phi);
  const auto sums = set.path_sums();
  OnePathStokes out{out_path, {}};
  for (std::size_t n = 0; n < 4; ++n) out.s[n] = 0.5 * (sums[n] + sign * 2.0 * (set.cross.S[n] * rot).real());
  return out;
}

TwoPathStokes extract_tpsp(const std::array<double, 4>& sums, const OnePathStokes& fringe_at_0,
                           const OnePathStokes& fringe_at_half_pi, std::size_t out_path) {
  if (out_path > 1) throw std::invalid_argument("extract_tpsp: out_path must be 0 or 1");
  const double sign = out_path == 0 ? 1.0 : -1.0;
  TwoPathStokes out;
  for (std::size_t n = 0; n < 4; ++n) {
    const double re = sign * (0.5 * sums[n] - fringe_at_0.s[n]);
    const double im = sign * (fringe_at_half_pi.s[n] - 0.5 * sums[n]);
    out.S[n] = {re, im};
  }
  return out;
}

std::array<double, 4> complementarity_defect(const StokesSet& set_in, const OnePathStokes& fringe_out0,
                                             const OnePathStokes& fringe_out1) {
  const auto sums = set_in.path_sums();
  std::array<double, 4> d{};
  for (std::size_t n = 0; n < 4; ++n) d[n] = std::abs(sums[n] - fringe_out0.s[n] - fringe_out1.s[n]);
  return d;
}

nlohmann::json to_json(const StokesSet& set) {
  std::array<double, 4> re{};
  std::array<double, 4> im{};
  for (std::size_t n = 0; n < 4; ++n) {
    re[n] = set.cross.S[n].real();
    im[n] = set.cross.S[n].imag();
  }
  return {{"s0", set.path0.s}, {"s1", set.path1.s}, {"S_re", re}, {"S_im", im}};
}

StokesSet stokes_from_json(const nlohmann::json& j) {
  auto quad = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 4)
      throw DataError(std::string("Stokes JSON: \"") + key + "\" must be an array of 4 numbers");
    return j.at(key).get<std::array<double, 4>>();
  };
  StokesSet set;
  set.path0.s = quad("s0");
  set.path1.s = quad("s1");
  const auto re = quad("S_re");
  const auto im = quad("S_im");
  for (std::size_t n = 0; n < 4; ++n) set.cross.S[n] = {re[n], im[n]};
  return set;
}

}  // namespace polpath
