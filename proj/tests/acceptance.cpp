// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "polpath/optics.hpp"
#include "polpath/qstate.hpp"
#include "polpath/stokes.hpp"
#include "polpath/tomography.hpp"

using namespace polpath;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Outcome {
  bool passed;
  std::string detail;
};

double run_criterion(int id, const char* name, double time_limit_s, const std::function<Outcome()>& body,
                     int& failures) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string timing = std::to_string(secs).substr(0, 6) + " s";
  if (time_limit_s > 0) {
    timing += " (limit " + std::to_string(static_cast<int>(time_limit_s)) + " s)";
    if (secs > time_limit_s) o.passed = false;
  }
  std::printf("%s  %2d  %-36s %s  [%s]\n", o.passed ? "PASS" : "FAIL", id, name, o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
  if (!o.passed) ++failures;
  return secs;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

DensityMatrix ginibre(std::uint64_t seed) { return random_density(seed, 1 + static_cast<int>(seed % 4)); }

std::array<double, 4> diff_opsp(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  std::array<double, 4> d{};
  for (std::size_t n = 0; n < 4; ++n) d[n] = std::abs(a[n] - b[n]);
  return d;
}

double max_of(const std::array<double, 4>& a) { return *std::max_element(a.begin(), a.end()); }

double tpsp_diff(const TwoPathStokes& a, const TwoPathStokes& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < 4; ++n) d = std::max(d, std::abs(a.S[n] - b.S[n]));
  return d;
}

double amplitude_error(const PolarizationState& a, const PolarizationState& b) {
  return std::max(std::abs(a.amplitudes[0] - b.amplitudes[0]), std::abs(a.amplitudes[1] - b.amplitudes[1]));
}

std::vector<double> phase_grid() {
  std::vector<double> g(32);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * std::numbers::pi * k / g.size();
  return g;
}

CountData sample(const DensityMatrix& rho, std::int64_t n, std::uint64_t seed, double jitter = 0.0) {
  ExperimentConfig cfg;
  cfg.n_photons_total = n;
  cfg.seed = seed;
  cfg.angle_jitter_sigma = jitter;
  return simulate(rho, cfg);
}

ReconstructionResult tomograph(const CountData& data) {
  return mle_fit(data, linear_inversion(estimate_stokes(data), true));
}

std::array<double, 16> flatten(const StokesSet& s) {
  std::array<double, 16> out{};
  for (std::size_t n = 0; n < 4; ++n) {
    out[n] = s.path0.s[n];
    out[4 + n] = s.path1.s[n];
    out[8 + n] = s.cross.S[n].real();
    out[12 + n] = s.cross.S[n].imag();
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

int main() {
  int failures = 0;

  run_criterion(1, "exact reconstruction identity", 5.0, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto rho = ginibre(seed);
      worst = std::max(worst, max_abs_diff(reconstruct(stokes_of(rho)).entries, rho.entries));
    }
    return Outcome{worst <= 1e-12, fmt("1000 states, max error %.2e (tol 1e-12)", worst)};
  }, failures);

  run_criterion(2, "fringe law vs evolved state", 5.0, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto rho = ginibre(1000 + seed);
      const auto set = stokes_of(rho);
      for (double phi : phase_grid()) {
        const auto evolved = evolve(interferometer(phi), rho);
        for (std::size_t q = 0; q < 2; ++q)
          worst = std::max(worst, max_of(diff_opsp(opsp(evolved, q).s, predicted_fringe(set, q, phi).s)));
      }
    }
    return Outcome{worst <= 1e-12, fmt("100 states x 32 phases, max error %.2e (tol 1e-12)", worst)};
  }, failures);

  run_criterion(3, "complementarity", 0.0, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto rho = ginibre(1000 + seed);
      const auto set = stokes_of(rho);
      for (double phi : phase_grid()) {
        const auto evolved = evolve(interferometer(phi), rho);
        worst = std::max(worst, max_of(complementarity_defect(set, opsp(evolved, 0), opsp(evolved, 1))));
      }
    }
    return Outcome{worst <= 1e-12, fmt("100 states x 32 phases, max defect %.2e (tol 1e-12)", worst)};
  }, failures);

  run_criterion(4, "TPSP extraction identity", 0.0, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto rho = ginibre(2000 + seed);
      const auto set = stokes_of(rho);
      const auto truth = tpsp(rho);
      for (std::size_t q = 0; q < 2; ++q) {
        const auto got = extract_tpsp(set.path_sums(), predicted_fringe(set, q, 0.0), predicted_fringe(set, q, kHalfPi), q);
        worst = std::max(worst, tpsp_diff(got, truth));
      }
    }
    return Outcome{worst <= 1e-12, fmt("1000 states, both paths, max error %.2e (tol 1e-12)", worst)};
  }, failures);

  run_criterion(5, "wave-plate conversions", 0.0, [] {
    const auto hwp8 = hwp(std::numbers::pi / 8);
    const auto qwp4 = qwp(std::numbers::pi / 4);
    auto overlap = [](const OpticalUnitary<2>& u, const PolarizationState& in, const PolarizationState& want) {
      return std::abs(inner(want.amplitudes, apply(u, in).amplitudes));
    };
    const double worst_hwp = std::max(
        amplitude_error(apply(hwp8, PolarizationState::d()), PolarizationState::h()),
        amplitude_error(apply(hwp8, PolarizationState::a()), PolarizationState::v()));
    const double min_qwp = std::min(overlap(qwp4, PolarizationState::r(), PolarizationState::h()),
                                    overlap(qwp4, PolarizationState::l(), PolarizationState::v()));
    return Outcome{worst_hwp <= 1e-15 && min_qwp >= 1.0 - 1e-12,
                   fmt("hwp(pi/8) max amplitude error %.2e, qwp(pi/4) min overlap 1-%.2e", worst_hwp, 1.0 - min_qwp)};
  }, failures);

  run_criterion(6, "noiseless end-to-end", 10.0, [] {
    double worst = 0.0;
    ExperimentConfig cfg;
    cfg.n_photons_total = 6'000'000'000'000;
    cfg.exact_counts = true;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto rho = ginibre(3000 + seed);
      const auto back = linear_inversion(estimate_stokes(simulate(rho, cfg)), false);
      worst = std::max(worst, max_abs_diff(back.entries, rho.entries));
    }
    return Outcome{worst <= 1e-10, fmt("200 states, max error %.2e (tol 1e-10)", worst)};
  }, failures);

  run_criterion(7, "statistical tomography, 6e6 photons", 120.0, [] {
    int bell_ok = 0;
    int mixed_ok = 0;
    double worst_f = 1.0;
    double worst_td = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto fb = fidelity(*tomograph(sample(bell_pbs_state(), 6'000'000, 4000 + seed)).rho_mle, bell_pbs_state());
      const auto tm = trace_distance(*tomograph(sample(maximally_mixed(), 6'000'000, 5000 + seed)).rho_mle, maximally_mixed());
      bell_ok += fb >= 0.99;
      mixed_ok += tm <= 0.02;
      worst_f = std::min(worst_f, fb);
      worst_td = std::max(worst_td, tm);
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "Bell F>=0.99 in %d/20 (min %.6f), mixed TD<=0.02 in %d/20 (max %.5f)", bell_ok,
                  worst_f, mixed_ok, worst_td);
    return Outcome{bell_ok >= 19 && mixed_ok >= 19, buf};
  }, failures);

  run_criterion(8, "MLE physicality, 6e4 photons", 0.0, [] {
    int physical = 0;
    int monotone = 0;
    int unphysical_linear = 0;
    for (std::uint64_t k = 0; k < 50; ++k) {
      // Alternate near-pure and random states: low rank is where linear inversion breaks.
      const auto rho = k % 2 ? random_density(6000 + k, 1 + static_cast<int>(k % 3)) : bell_pbs_state();
      const auto data = sample(rho, 60'000, 7000 + k);
      const auto linear = linear_inversion(estimate_stokes(data), true);
      if (!validate_density(linear).is_physical) ++unphysical_linear;
      const auto result = mle_fit(data, linear);
      physical += validate_density(*result.rho_mle).is_physical;
      monotone += result.diagnostics->cost_final <= MleObjective(data)(cholesky_repair(linear));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "physical %d/50, cost <= repaired init %d/50, unphysical linear inversions %d/50",
                  physical, monotone, unphysical_linear);
    return Outcome{physical == 50 && monotone == 50, buf};
  }, failures);

  run_criterion(9, "shot-noise error scaling", 0.0, [] {
    const auto rho = random_density(8000, 4);
    const auto truth = flatten(stokes_of(rho));
    auto mean_error = [&](std::int64_t n) {
      double sum = 0.0;
      for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto got = flatten(estimate_stokes(sample(rho, n, 9000 + seed)).set);
        for (std::size_t k = 0; k < got.size(); ++k) sum += std::abs(got[k] - truth[k]);
      }
      return sum / (50.0 * truth.size());
    };
    const double ratio = mean_error(60'000) / mean_error(6'000'000);
    return Outcome{ratio >= 5.0 && ratio <= 15.0, fmt("error ratio 6e4 -> 6e6 is %.3f (want 10 +- 50%%)", ratio)};
  }, failures);

  run_criterion(10, "angle jitter 0.02 rad", 0.0, [] {
    std::vector<double> f;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      f.push_back(fidelity(*tomograph(sample(bell_pbs_state(), 6'000'000, 10'000 + seed, 0.02)).rho_mle, bell_pbs_state()));
    const double med = median(f);
    return Outcome{med >= 0.95, fmt("median Bell fidelity %.5f over 20 seeds (min %.5f)", med,
                                     *std::min_element(f.begin(), f.end()))};
  }, failures);

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
