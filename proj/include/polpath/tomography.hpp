#pragma once

// From detector counts to a density matrix: Stokes estimation, linear
// inversion, and maximum-likelihood refinement over physical states.

#include <array>
#include <optional>
#include <vector>

#include "json.hpp"
#include "polpath/experiment.hpp"
#include "polpath/qstate.hpp"
#include "polpath/stokes.hpp"

namespace polpath {

struct StokesErrors {
  std::array<double, 4> s0{};
  std::array<double, 4> s1{};
  std::array<double, 4> S_re{};
  std::array<double, 4> S_im{};
};

struct StokesEstimate {
  StokesSet set;
  StokesErrors std_errs;
  // Output-arm Stokes parameters, indexed by output path.
  std::array<OnePathStokes, 2> fringe_at_0{};
  std::array<OnePathStokes, 2> fringe_at_half_pi{};
};

/// Estimates all Stokes parameters from a count record. Every arm uses
/// s_0 = 2(N0 + N1)/N_in and s_k = 2(N0 - N1)/N_in, the factor 2 undoing
/// the 1:1 tap-off. Monitor statistics are pooled over phases, s_0 over
/// all runs of an arm; TPSP average the extractions from both output arms.
/// Standard errors propagate the multinomial variance of each run.
/// Throws DataError when a (setting, phase in {0, pi/2}) run is missing or
/// has no photons.
StokesEstimate estimate_stokes(const CountData& data);

/// reconstruct(est.set), optionally divided by its trace. Renormalizing a
/// record whose trace is <= 0.5 throws DataError("degenerate count record").
DensityMatrix linear_inversion(const StokesEstimate& est, bool renormalize);

/// Sixteen reals for a lower-triangular T: t[0..3] is the real diagonal,
/// then (re, im) pairs for T10, T20, T30, T21, T31, T32.
struct MleParams {
  std::array<double, 16> t{};
};

/// rho(t) = T^dagger T / Tr(T^dagger T). Throws std::invalid_argument when
/// the trace vanishes.
DensityMatrix density_from_params(const MleParams& params);

/// Parameters of a physical state close to rho_raw: negative eigenvalues are
/// clipped, the trace restored to one and 1e-6 * I added before factoring.
/// An all-zero matrix maps to the maximally mixed state.
MleParams cholesky_repair(const DensityMatrix& rho_raw);

/// Gaussian negative log-likelihood of a count record, with the detector
/// model evaluated at the nominal plate angles of every run:
///   sum_runs sum_d (n_in p_d - N_d)^2 / (2 max(n_in p_d, 0.5)).
class MleObjective {
 public:
  explicit MleObjective(const CountData& data);
  double operator()(const MleParams& params) const;
  double cost(const DensityMatrix& rho) const;

 private:
  struct Run {
    DetectorEffects effects;
    double n_in;
    std::array<double, kDetectorCount> counts;
  };
  std::vector<Run> runs_;
};

double mle_cost(const MleParams& params, const CountData& data);

struct MleDiagnostics {
  double cost_initial = 0.0;
  double cost_final = 0.0;
  int iterations = 0;  // objective evaluations over both optimizer passes
  bool converged = false;
};

struct Metrics {
  double fidelity = 0.0;
  double trace_distance = 0.0;
  double purity_est = 0.0;
  double purity_ref = 0.0;
};

struct ReconstructionResult {
  std::optional<StokesSet> stokes;
  DensityMatrix rho_linear;
  std::optional<DensityMatrix> rho_mle;
  std::optional<MleDiagnostics> diagnostics;
  std::optional<Metrics> metrics;
};

struct MleOptions {
  double relative_tolerance = 1e-10;
  int max_evaluations = 20000;
  double initial_step = 0.02;
  std::uint64_t restart_seed = 0x5EED;
};

/// Nelder-Mead over the sixteen Cholesky parameters, started from
/// cholesky_repair(init) and restarted once from a freshly perturbed
/// simplex around the first optimum. rho_linear of the result is `init`.
/// Throws NumericalError when the cost stops being finite.
ReconstructionResult mle_fit(const CountData& data, const DensityMatrix& init, const MleOptions& options = {});

/// Fidelity and trace distance of the best available estimate (MLE, else a
/// physical linear inversion) against rho_ref. Throws DataError for an
/// unphysical reference or when no physical estimate exists.
Metrics report(const DensityMatrix& rho_ref, const ReconstructionResult& result);

nlohmann::json to_json(const MleDiagnostics& d);
nlohmann::json to_json(const Metrics& m);
/// { "rho_linear", "rho_mle", "diagnostics", "metrics", "stokes" }; absent parts are null.
nlohmann::json to_json(const ReconstructionResult& result);
ReconstructionResult result_from_json(const nlohmann::json& j);

}  // namespace polpath
