#pragma once

// One-path and two-path Stokes parameters of a polarization-path state.
//
// With 0-based indices over {|H,0>, |H,1>, |V,0>, |V,1>}:
//   path 0:  s = (r00 + r22, r00 - r22, r02 + r20, i(r02 - r20))
//   path 1:  s = (r11 + r33, r11 - r33, r13 + r31, i(r13 - r31))
//   cross:   S = (r10 + r32, r10 - r32, r12 + r30, i(r12 - r30))
// (1-based rho_jk is entries[j-1][k-1].)

#include <array>

#include "json.hpp"
#include "polpath/qstate.hpp"

namespace polpath {

struct OnePathStokes {
  std::size_t path = 0;
  std::array<double, 4> s{};
};

struct TwoPathStokes {
  std::array<Complex, 4> S{};
};

struct StokesSet {
  OnePathStokes path0{0, {}};
  OnePathStokes path1{1, {}};
  TwoPathStokes cross{};

  const OnePathStokes& path(std::size_t p) const { return p == 0 ? path0 : path1; }
  /// s(0)_n + s(1)_n, the quantity the interferometer conserves.
  std::array<double, 4> path_sums() const;
};

/// Throws std::invalid_argument if rho deviates from Hermitian by more than 1e-9.
OnePathStokes opsp(const DensityMatrix& rho, std::size_t path);
TwoPathStokes tpsp(const DensityMatrix& rho);
StokesSet stokes_of(const DensityMatrix& rho);

/// Inverse of stokes_of. Hermitian by construction; the trace is
/// s(0)_0 + s(1)_0 and is deliberately left unnormalized.
DensityMatrix reconstruct(const StokesSet& set);

/// Output-arm Stokes parameters after the interferometer at phase phi.
/// Output path 0 (collected by SPM3) takes the minus sign, path 1 (SPM2)
/// the plus sign:  s_nf = 1/2 [s(0)_n + s(1)_n -+ 2 Re(S_n e^{i phi})].
OnePathStokes predicted_fringe(const StokesSet& set, std::size_t out_path, double phi);

/// Recovers S_n from one output arm's Stokes parameters at phi = 0 and
/// phi = pi/2, given sums_n = s(0)_n + s(1)_n of the input arms.
TwoPathStokes extract_tpsp(const std::array<double, 4>& sums, const OnePathStokes& fringe_at_0,
                           const OnePathStokes& fringe_at_half_pi, std::size_t out_path);

/// |s(0)_n + s(1)_n - s(0)_nf - s(1)_nf| per n. Diagnostic only; never throws.
std::array<double, 4> complementarity_defect(const StokesSet& set_in, const OnePathStokes& fringe_out0,
                                             const OnePathStokes& fringe_out1);

/// { "s0": [4], "s1": [4], "S_re": [4], "S_im": [4] }
nlohmann::json to_json(const StokesSet& set);
StokesSet stokes_from_json(const nlohmann::json& j);

}  // namespace polpath
