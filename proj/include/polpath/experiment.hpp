#pragma once

// Monte-Carlo model of the tomography bench.
//
// A photon in path p first meets a 1:1 tap-off. Reflected photons go to the
// monitor SPM p; transmitted photons cross the interferometer (phase phi on
// path 1, then the beam splitter) and are collected by SPM3 (output path 0)
// or SPM2 (output path 1). Each SPM applies its wave plate (if any) and a
// PBS sends H to detector D0 and V to D1.

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "polpath/optics.hpp"
#include "polpath/qstate.hpp"

namespace polpath {

enum class PlateKind { None, Hwp, Qwp };

/// Which wave plate every SPM carries during a run. The nominal fast-axis
/// angle is fixed by the kind: none, HWP at pi/8 (s2), QWP at pi/4 (s3).
struct PlateSetting {
  PlateKind kind = PlateKind::None;

  double nominal_angle() const;
  /// Stokes index n = 1, 2, 3 measured by the PBS difference signal.
  std::size_t stokes_index() const;
  std::string_view name() const;
  static PlateSetting from_name(std::string_view name);

  friend bool operator==(const PlateSetting&, const PlateSetting&) = default;
};

PlateUnitary plate_unitary(PlateKind kind, double angle);

inline constexpr std::size_t kSpmCount = 4;
inline constexpr std::size_t kDetectorCount = 8;

/// Detector slot = 2 * spm + d, d = 0 for the transmitted (H) PBS port.
constexpr std::size_t detector_slot(std::size_t spm, std::size_t d) { return 2 * spm + d; }
/// "SPM0.D0" ... "SPM3.D1", in slot order.
std::string_view detector_id(std::size_t slot);

/// SPM collecting output path q of the interferometer: q = 0 -> SPM3, q = 1 -> SPM2.
constexpr std::size_t output_spm(std::size_t out_path) { return out_path == 0 ? 3 : 2; }

using SpmAngles = std::array<double, kSpmCount>;
using DetectorEffects = std::array<Matrix4, kDetectorCount>;
using DetectorProbabilities = std::array<double, kDetectorCount>;

SpmAngles nominal_angles(const PlateSetting& setting);

/// Positive operators E_d with p_d = Tr(E_d rho); they sum to the identity.
DetectorEffects detector_effects(PlateKind kind, const SpmAngles& angles, double phi);

/// Throws DataError for an unphysical rho.
DetectorProbabilities detector_probabilities(const DensityMatrix& rho, const PlateSetting& setting, double phi);
DetectorProbabilities detector_probabilities(const DensityMatrix& rho, PlateKind kind, const SpmAngles& angles,
                                             double phi);
/// Tr(E_d rho) without the physicality check; tiny negative rounding is clipped.
DetectorProbabilities probabilities_from_effects(const DetectorEffects& effects, const Matrix4& rho);

/// nominal + N(0, sigma^2). Returns nominal untouched (and draws nothing) for sigma = 0.
double realized_angle(double nominal, double sigma, std::mt19937_64& rng);

enum class BudgetPolicy { EqualSplit };

struct ExperimentConfig {
  std::uint64_t n_photons_total = 0;
  std::vector<double> phases{0.0, 1.5707963267948966};
  std::vector<PlateSetting> settings{{PlateKind::None}, {PlateKind::Hwp}, {PlateKind::Qwp}};
  std::uint64_t seed = 0;
  double angle_jitter_sigma = 0.0;
  BudgetPolicy budget_policy = BudgetPolicy::EqualSplit;
  // Deterministic mode: counts are n_in * p rounded to integers that still
  // sum to n_in (largest remainder). No sampling, no jitter.
  bool exact_counts = false;
  unsigned threads = 1;
};

struct CountRun {
  PlateSetting setting;
  SpmAngles angles{};  // realized plate angle per SPM
  double phase = 0.0;
  std::int64_t n_in = 0;
  std::array<std::int64_t, kDetectorCount> counts{};
};

struct CountData {
  std::vector<CountRun> runs;
};

/// One run per (setting, phase) pair, settings-major. Throws
/// std::invalid_argument for an invalid config and DataError for an
/// unphysical state. Run k draws from its own stream keyed on (seed, k), so
/// the result does not depend on cfg.threads.
CountData simulate(const DensityMatrix& rho, const ExperimentConfig& cfg);

/// EqualSplit budgets: floor division, remainder to the first runs.
std::vector<std::int64_t> split_budget(std::uint64_t total, std::size_t runs);

/// { "runs": [ { "setting", "angles": {"SPM0".."SPM3"}, "phase", "n_in", "counts": {id: n} } ] }
nlohmann::json to_json(const CountData& data);
CountData counts_from_json(const nlohmann::json& j);

}  // namespace polpath
