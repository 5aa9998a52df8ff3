#include "polpath/tomography.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "polpath/errors.hpp"
#include "polpath/nelder_mead.hpp"
#include "polpath/random.hpp"

namespace polpath {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kPhaseMatch = 1e-9;
constexpr double kRepairFloor = 1e-6;

bool phase_is(double phase, double target) { return std::abs(phase - target) <= kPhaseMatch; }

using RunFilter = std::function<bool(const CountRun&)>;
using Coefficients = std::array<double, kDetectorCount>;

struct Pooled {
  double value = 0.0;
  double std_err = 0.0;
};

// sum_r sum_d c_d N_rd / sum_r n_r over the selected runs, with variance
// from the multinomial covariance of each run at its observed frequencies.
Pooled pooled_estimate(const CountData& data, const RunFilter& keep, const Coefficients& c) {
  double weighted = 0.0;
  double n_total = 0.0;
  double variance = 0.0;
  for (const auto& run : data.runs) {
    if (!keep(run) || run.n_in <= 0) continue;
    const double n = static_cast<double>(run.n_in);
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t d = 0; d < kDetectorCount; ++d) {
      const double freq = static_cast<double>(run.counts[d]) / n;
      weighted += c[d] * static_cast<double>(run.counts[d]);
      mean += c[d] * freq;
      second += c[d] * c[d] * freq;
    }
    variance += n * std::max(second - mean * mean, 0.0);
    n_total += n;
  }
  if (n_total <= 0.0) throw DataError("estimate_stokes: no photons in the runs needed for an estimate");
  return {weighted / n_total, std::sqrt(variance) / n_total};
}

Coefficients spm_coefficients(std::size_t spm, double c_d0, double c_d1) {
  Coefficients c{};
  c[detector_slot(spm, 0)] = c_d0;
  c[detector_slot(spm, 1)] = c_d1;
  return c;
}

Coefficients operator-(Coefficients a, const Coefficients& b) {
  for (std::size_t d = 0; d < kDetectorCount; ++d) a[d] -= b[d];
  return a;
}

PlateKind kind_for_index(std::size_t k) {
  return k == 1 ? PlateKind::None : (k == 2 ? PlateKind::Hwp : PlateKind::Qwp);
}

void require_runs(const CountData& data) {
  for (std::size_t k = 1; k <= 3; ++k) {
    for (double phase : {0.0, kHalfPi}) {
      const PlateSetting setting{kind_for_index(k)};
      bool present = false;
      for (const auto& run : data.runs)
        if (run.setting == setting && phase_is(run.phase, phase)) {
          if (run.n_in <= 0)
            throw DataError("zero photon budget in run (setting " + std::string(setting.name()) + ", phase " +
                            (phase == 0.0 ? "0" : "pi/2") + ")");
          present = true;
        }
      if (!present)
        throw DataError("missing run: setting " + std::string(setting.name()) + " at phase " +
                        (phase == 0.0 ? "0" : "pi/2"));
    }
  }
}

Matrix4 flip(const Matrix4& m) {
  Matrix4 out{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out[i][j] = m[3 - i][3 - j];
  return out;
}

// Lower-triangular L with L L^dagger = a, for Hermitian positive definite a.
Matrix4 cholesky_lower(const Matrix4& a) {
  Matrix4 l = zero_matrix<4>();
  for (std::size_t j = 0; j < 4; ++j) {
    double diag = a[j][j].real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l[j][k]);
    if (!(diag > 0.0)) throw NumericalError("cholesky_repair: matrix is not positive definite");
    l[j][j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < 4; ++i) {
      Complex s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * std::conj(l[j][k]);
      l[i][j] = s / l[j][j].real();
    }
  }
  return l;
}

constexpr std::array<std::array<std::size_t, 2>, 6> kOffDiagonal{{{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}}};

Matrix4 lower_from_params(const MleParams& p) {
  Matrix4 t = zero_matrix<4>();
  for (std::size_t k = 0; k < 4; ++k) t[k][k] = p.t[k];
  for (std::size_t m = 0; m < kOffDiagonal.size(); ++m)
    t[kOffDiagonal[m][0]][kOffDiagonal[m][1]] = {p.t[4 + 2 * m], p.t[5 + 2 * m]};
  return t;
}

MleParams params_from_lower(const Matrix4& t) {
  MleParams p;
  for (std::size_t k = 0; k < 4; ++k) p.t[k] = t[k][k].real();
  for (std::size_t m = 0; m < kOffDiagonal.size(); ++m) {
    const Complex x = t[kOffDiagonal[m][0]][kOffDiagonal[m][1]];
    p.t[4 + 2 * m] = x.real();
    p.t[5 + 2 * m] = x.imag();
  }
  return p;
}

}  // namespace

StokesEstimate estimate_stokes(const CountData& data) {
  require_runs(data);

  const RunFilter any = [](const CountRun&) { return true; };
  auto with_kind = [](std::size_t k) -> RunFilter {
    const PlateSetting s{kind_for_index(k)};
    return [s](const CountRun& r) { return r.setting == s; };
  };
  auto at_phase = [](double phase) -> RunFilter {
    return [phase](const CountRun& r) { return phase_is(r.phase, phase); };
  };
  auto with_kind_at = [](std::size_t k, double phase) -> RunFilter {
    const PlateSetting s{kind_for_index(k)};
    return [s, phase](const CountRun& r) { return r.setting == s && phase_is(r.phase, phase); };
  };

  StokesEstimate est;
  std::array<std::array<double, 4>*, 2> errs{&est.std_errs.s0, &est.std_errs.s1};

  // Monitor arms: SPM p sees the input state of path p.
  for (std::size_t path = 0; path < 2; ++path) {
    auto& s = path == 0 ? est.set.path0.s : est.set.path1.s;
    const auto total = pooled_estimate(data, any, spm_coefficients(path, 2.0, 2.0));
    s[0] = total.value;
    (*errs[path])[0] = total.std_err;
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto diff = pooled_estimate(data, with_kind(k), spm_coefficients(path, 2.0, -2.0));
      s[k] = diff.value;
      (*errs[path])[k] = diff.std_err;
    }
  }

  // Output arms at phi = 0 and pi/2.
  for (std::size_t q = 0; q < 2; ++q) {
    const std::size_t spm = output_spm(q);
    for (const double phase : {0.0, kHalfPi}) {
      OnePathStokes f{q, {}};
      f.s[0] = pooled_estimate(data, at_phase(phase), spm_coefficients(spm, 2.0, 2.0)).value;
      for (std::size_t k = 1; k <= 3; ++k)
        f.s[k] = pooled_estimate(data, with_kind_at(k, phase), spm_coefficients(spm, 2.0, -2.0)).value;
      (phase == 0.0 ? est.fringe_at_0 : est.fringe_at_half_pi)[q] = f;
    }
  }

  const auto sums = est.set.path_sums();
  const auto from0 = extract_tpsp(sums, est.fringe_at_0[0], est.fringe_at_half_pi[0], 0);
  const auto from1 = extract_tpsp(sums, est.fringe_at_0[1], est.fringe_at_half_pi[1], 1);
  for (std::size_t n = 0; n < 4; ++n) est.set.cross.S[n] = 0.5 * (from0.S[n] + from1.S[n]);

  // The averaged extraction is (f_1(0) - f_0(0))/2 for Re and
  // (f_0(pi/2) - f_1(pi/2))/2 for Im; the input sums cancel.
  const std::size_t spm_out0 = output_spm(0);
  const std::size_t spm_out1 = output_spm(1);
  for (std::size_t n = 0; n < 4; ++n) {
    const double sign_d1 = n == 0 ? 1.0 : -1.0;
    const Coefficients out1 = spm_coefficients(spm_out1, 1.0, sign_d1);
    const Coefficients out0 = spm_coefficients(spm_out0, 1.0, sign_d1);
    const RunFilter at0 = n == 0 ? at_phase(0.0) : with_kind_at(n, 0.0);
    const RunFilter at_half = n == 0 ? at_phase(kHalfPi) : with_kind_at(n, kHalfPi);
    est.std_errs.S_re[n] = pooled_estimate(data, at0, out1 - out0).std_err;
    est.std_errs.S_im[n] = pooled_estimate(data, at_half, out0 - out1).std_err;
  }
  return est;
}

DensityMatrix linear_inversion(const StokesEstimate& est, bool renormalize) {
  DensityMatrix rho = reconstruct(est.set);
  if (renormalize) {
    const double tr = trace(rho.entries).real();
    if (!(tr > 0.5)) throw DataError("degenerate count record");
    rho.entries = scaled(rho.entries, 1.0 / tr);
  }
  rho.validated = false;
  return rho;
}

DensityMatrix density_from_params(const MleParams& params) {
  const Matrix4 t = lower_from_params(params);
  const Matrix4 m = adjoint(t) * t;
  const double tr = trace(m).real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw std::invalid_argument("degenerate MLE parameters");
  DensityMatrix rho;
  for (std::size_t i = 0; i < 4; ++i) {
    rho.entries[i][i] = m[i][i].real() / tr;
    for (std::size_t j = 0; j < i; ++j) {
      rho.entries[i][j] = m[i][j] / tr;
      rho.entries[j][i] = std::conj(rho.entries[i][j]);
    }
  }
  rho.validated = true;
  return rho;
}

MleParams cholesky_repair(const DensityMatrix& rho_raw) {
  if (hermiticity_defect(rho_raw.entries) > 1e-9)
    throw std::invalid_argument("cholesky_repair: input must be Hermitian");

  const auto e = eigen_hermitian(rho_raw.entries);
  double kept = 0.0;
  for (double x : e.values) kept += std::max(x, 0.0);

  Matrix4 repaired;
  if (kept > 0.0) {
    repaired = spectral_apply(e, [kept](double x) { return std::max(x, 0.0) / kept; });
  } else {
    repaired = maximally_mixed().entries;
  }
  for (std::size_t k = 0; k < 4; ++k) repaired[k][k] = repaired[k][k].real() + kRepairFloor;

  // rho = T^dagger T with T lower triangular is a Cholesky factorization of
  // the index-reversed matrix: J rho J = L L^dagger gives T = J L^dagger J.
  const Matrix4 l = cholesky_lower(flip(repaired));
  return params_from_lower(flip(adjoint(l)));
}

MleObjective::MleObjective(const CountData& data) {
  runs_.reserve(data.runs.size());
  for (const auto& run : data.runs) {
    Run r;
    r.effects = detector_effects(run.setting.kind, nominal_angles(run.setting), run.phase);
    r.n_in = static_cast<double>(run.n_in);
    for (std::size_t d = 0; d < kDetectorCount; ++d) r.counts[d] = static_cast<double>(run.counts[d]);
    runs_.push_back(r);
  }
}

double MleObjective::cost(const DensityMatrix& rho) const {
  double total = 0.0;
  for (const auto& run : runs_) {
    const auto p = probabilities_from_effects(run.effects, rho.entries);
    for (std::size_t d = 0; d < kDetectorCount; ++d) {
      const double expected = run.n_in * p[d];
      const double r = expected - run.counts[d];
      total += r * r / (2.0 * std::max(expected, 0.5));
    }
  }
  return total;
}

double MleObjective::operator()(const MleParams& params) const { return cost(density_from_params(params)); }

double mle_cost(const MleParams& params, const CountData& data) { return MleObjective(data)(params); }

ReconstructionResult mle_fit(const CountData& data, const DensityMatrix& init, const MleOptions& options) {
  const MleObjective objective(data);
  MleParams start = cholesky_repair(init);
  // The cost only sees T up to scale; fix the scale so step sizes are meaningful.
  {
    double norm2 = 0.0;
    for (double x : start.t) norm2 += x * x;
    for (double& x : start.t) x /= std::sqrt(norm2);
  }

  MleDiagnostics diag;
  diag.cost_initial = objective(start);
  if (!std::isfinite(diag.cost_initial))
    throw NumericalError("mle_fit: initial cost is not finite");

  const Objective f = [&](std::span<const double> x) {
    MleParams p;
    std::copy(x.begin(), x.end(), p.t.begin());
    double sum = 0.0;
    for (double v : p.t) sum += v * v;
    if (!(sum > 0.0)) return std::numeric_limits<double>::infinity();
    return objective(p);
  };

  std::vector<double> steps(16, options.initial_step);
  NelderMeadOptions nm{options.relative_tolerance, options.max_evaluations};
  auto first = nelder_mead(f, start.t, steps, nm);

  // One restart from the first optimum with a randomly signed, rescaled simplex.
  auto rng = keyed_engine(options.restart_seed, 0);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  for (double& s : steps) s = options.initial_step * scale(rng) * (rng() & 1U ? 1.0 : -1.0);
  nm.max_evaluations = std::max(options.max_evaluations - first.evaluations, 0);
  NelderMeadResult second = first;
  second.evaluations = 0;
  if (nm.max_evaluations > static_cast<int>(steps.size()) + 1) second = nelder_mead(f, first.x, steps, nm);

  const auto& best = second.f < first.f ? second : first;
  MleParams best_params;
  std::copy(best.x.begin(), best.x.end(), best_params.t.begin());

  diag.cost_final = std::min(best.f, diag.cost_initial);
  diag.iterations = first.evaluations + second.evaluations;
  diag.converged = best.converged;
  if (!std::isfinite(diag.cost_final)) {
    std::ostringstream msg;
    msg << "mle_fit: optimizer produced a non-finite cost (initial " << diag.cost_initial << ", evaluations "
        << diag.iterations << ")";
    throw NumericalError(msg.str());
  }

  ReconstructionResult result;
  result.rho_linear = init;
  result.rho_mle = best.f <= diag.cost_initial ? density_from_params(best_params) : density_from_params(start);
  result.diagnostics = diag;
  return result;
}

Metrics report(const DensityMatrix& rho_ref, const ReconstructionResult& result) {
  if (!validate_density(rho_ref).is_physical) throw DataError("report: reference state is not physical");
  const DensityMatrix* estimate = nullptr;
  if (result.rho_mle) {
    estimate = &*result.rho_mle;
  } else if (validate_density(result.rho_linear).is_physical) {
    estimate = &result.rho_linear;
  } else {
    throw DataError("report: linear inversion is unphysical and no MLE estimate is available");
  }
  return {fidelity(*estimate, rho_ref), trace_distance(*estimate, rho_ref), purity(*estimate), purity(rho_ref)};
}

nlohmann::json to_json(const MleDiagnostics& d) {
  return {{"cost_initial", d.cost_initial},
          {"cost_final", d.cost_final},
          {"iterations", d.iterations},
          {"converged", d.converged}};
}

nlohmann::json to_json(const Metrics& m) {
  return {{"fidelity", m.fidelity},
          {"trace_distance", m.trace_distance},
          {"purity_est", m.purity_est},
          {"purity_ref", m.purity_ref}};
}

nlohmann::json to_json(const ReconstructionResult& result) {
  nlohmann::json j;
  j["rho_linear"] = to_json(result.rho_linear);
  j["rho_mle"] = result.rho_mle ? to_json(*result.rho_mle) : nlohmann::json(nullptr);
  j["diagnostics"] = result.diagnostics ? to_json(*result.diagnostics) : nlohmann::json(nullptr);
  j["metrics"] = result.metrics ? to_json(*result.metrics) : nlohmann::json(nullptr);
  j["stokes"] = result.stokes ? to_json(*result.stokes) : nlohmann::json(nullptr);
  return j;
}

ReconstructionResult result_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rho_linear")) throw DataError("reconstruction JSON needs \"rho_linear\"");
  auto present = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
  try {
    ReconstructionResult r;
    r.rho_linear = DensityMatrix{matrix_from_json(j.at("rho_linear")), false};
    if (present("rho_mle")) r.rho_mle = density_from_json(j.at("rho_mle"));
    if (present("diagnostics")) {
      const auto& d = j.at("diagnostics");
      r.diagnostics = MleDiagnostics{d.at("cost_initial").get<double>(), d.at("cost_final").get<double>(),
                                     d.at("iterations").get<int>(), d.at("converged").get<bool>()};
    }
    if (present("metrics")) {
      const auto& m = j.at("metrics");
      r.metrics = Metrics{m.at("fidelity").get<double>(), m.at("trace_distance").get<double>(),
                          m.at("purity_est").get<double>(), m.at("purity_ref").get<double>()};
    }
    if (present("stokes")) r.stokes = stokes_from_json(j.at("stokes"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed reconstruction JSON: ") + e.what());
  }
}

}  // namespace polpath
