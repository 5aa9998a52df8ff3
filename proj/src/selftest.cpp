#include "polpath/selftest.hpp"

#include <cmath>
#include <numbers>

#include "polpath/experiment.hpp"
#include "polpath/optics.hpp"
#include "polpath/tomography.hpp"

namespace polpath {

namespace {

constexpr double kIdentityTol = 1e-12;

class Check {
 public:
  Check(std::string name, double tolerance) : result_{std::move(name), true, 0.0, tolerance} {}
  void observe(double deviation) {
    if (!(deviation <= result_.tolerance)) result_.passed = false;
    if (std::isnan(deviation) || deviation > result_.worst) result_.worst = deviation;
  }
  SelftestCheck done() const { return result_; }

 private:
  SelftestCheck result_;
};

double max_diff(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < 4; ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

double max_diff(const TwoPathStokes& a, const TwoPathStokes& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < 4; ++n) d = std::max(d, std::abs(a.S[n] - b.S[n]));
  return d;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options) {
  constexpr std::size_t kGrid = 32;
  std::vector<SelftestCheck> out;

  Check round_trip("reconstruct(stokes(rho)) == rho", kIdentityTol);
  Check fringe("OPSP of U(phi) rho U(phi)^dagger match fringe formulas", kIdentityTol);
  Check complement("complementarity of input and output OPSP", kIdentityTol);
  Check extraction("TPSP extraction from either output arm", kIdentityTol);
  Check pipeline("exact-count pipeline recovers the state", 1e-10);

  for (std::size_t k = 0; k < options.states; ++k) {
    const auto rho = random_density(k, 4);
    const auto set = stokes_of(rho);
    round_trip.observe(max_abs_diff(options.reconstructor(set).entries, rho.entries));

    for (std::size_t g = 0; g < kGrid; ++g) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(g) / kGrid;
      const auto evolved = evolve(interferometer(phi), rho);
      const auto f0 = predicted_fringe(set, 0, phi);
      const auto f1 = predicted_fringe(set, 1, phi);
      fringe.observe(std::max(max_diff(opsp(evolved, 0).s, f0.s), max_diff(opsp(evolved, 1).s, f1.s)));
      const auto defect = complementarity_defect(set, opsp(evolved, 0), opsp(evolved, 1));
      complement.observe(*std::max_element(defect.begin(), defect.end()));
    }

    const auto sums = set.path_sums();
    for (std::size_t q = 0; q < 2; ++q) {
      const auto s = extract_tpsp(sums, predicted_fringe(set, q, 0.0), predicted_fringe(set, q, std::numbers::pi / 2), q);
      extraction.observe(max_diff(s, set.cross));
    }

    if (k < 20) {
      ExperimentConfig cfg;
      cfg.n_photons_total = 6'000'000'000'000;
      cfg.exact_counts = true;
      const auto est = estimate_stokes(simulate(rho, cfg));
      pipeline.observe(max_abs_diff(options.reconstructor(est.set).entries, rho.entries));
    }
  }

  Check plates("wave plates map D,A,R,L onto H,V", kIdentityTol);
  const auto h = PolarizationState::h();
  const auto v = PolarizationState::v();
  auto overlap_defect = [](const PolarizationState& a, const PolarizationState& b) {
    return 1.0 - std::abs(inner(a.amplitudes, b.amplitudes));
  };
  plates.observe(overlap_defect(apply(hwp(std::numbers::pi / 8), PolarizationState::d()), h));
  plates.observe(overlap_defect(apply(hwp(std::numbers::pi / 8), PolarizationState::a()), v));
  plates.observe(overlap_defect(apply(qwp(std::numbers::pi / 4), PolarizationState::r()), h));
  plates.observe(overlap_defect(apply(qwp(std::numbers::pi / 4), PolarizationState::l()), v));

  Check unitary("bench operators are unitary", kIdentityTol);
  for (std::size_t g = 0; g < 16; ++g) {
    const double angle = std::numbers::pi * static_cast<double>(g) / 8.0;
    unitary.observe(unitarity_defect(qwp(angle).entries));
    unitary.observe(unitarity_defect(hwp(angle).entries));
    unitary.observe(unitarity_defect(interferometer(angle).entries));
    unitary.observe(max_abs_diff(interferometer(angle).entries,
                                 beam_splitter().entries * phase_shifter(angle).entries));
  }

  for (const auto* c : {&round_trip, &fringe, &complement, &extraction, &pipeline, &plates, &unitary})
    out.push_back(c->done());
  return out;
}

}  // namespace polpath
