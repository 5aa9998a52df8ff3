#include "polpath/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "polpath/errors.hpp"
#include "polpath/random.hpp"

namespace polpath {

namespace {

constexpr std::array<std::string_view, kDetectorCount> kDetectorIds{
    "SPM0.D0", "SPM0.D1", "SPM1.D0", "SPM1.D1", "SPM2.D0", "SPM2.D1", "SPM3.D0", "SPM3.D1"};
constexpr std::array<std::string_view, kSpmCount> kSpmIds{"SPM0", "SPM1", "SPM2", "SPM3"};

// Effect of detector d behind a plate, restricted to one path mode.
Matrix4 port_effect(const PlateUnitary& plate, std::size_t d, std::size_t path) {
  Matrix2 pol_projector = zero_matrix<2>();
  pol_projector[d][d] = 1.0;
  Matrix2 path_projector = zero_matrix<2>();
  path_projector[path][path] = 1.0;
  const Matrix2 pulled_back = adjoint(plate.entries) * pol_projector * plate.entries;
  return kron(pulled_back, path_projector);
}

std::array<std::int64_t, kDetectorCount> exact_counts(const DetectorProbabilities& p, std::int64_t n) {
  std::array<std::int64_t, kDetectorCount> counts{};
  std::array<double, kDetectorCount> remainder{};
  std::int64_t assigned = 0;
  for (std::size_t d = 0; d < kDetectorCount; ++d) {
    const double expected = static_cast<double>(n) * p[d];
    counts[d] = static_cast<std::int64_t>(std::floor(expected));
    remainder[d] = expected - static_cast<double>(counts[d]);
    assigned += counts[d];
  }
  std::array<std::size_t, kDetectorCount> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % kDetectorCount, ++assigned) ++counts[order[k]];
  return counts;
}

std::array<std::int64_t, kDetectorCount> sampled_counts(const DetectorProbabilities& p, std::int64_t n,
                                                        std::mt19937_64& rng) {
  std::array<std::int64_t, kDetectorCount> counts{};
  std::int64_t remaining = n;
  double mass = 1.0;
  for (std::size_t d = 0; d + 1 < kDetectorCount && remaining > 0; ++d) {
    const double q = mass > 0.0 ? std::clamp(p[d] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> binomial(remaining, q);
    counts[d] = binomial(rng);
    remaining -= counts[d];
    mass -= p[d];
  }
  counts[kDetectorCount - 1] += remaining;
  return counts;
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.phases.empty()) throw std::invalid_argument("experiment config: phase list is empty");
  if (cfg.settings.empty()) throw std::invalid_argument("experiment config: setting list is empty");
  const auto runs = cfg.phases.size() * cfg.settings.size();
  if (cfg.n_photons_total < runs)
    throw std::invalid_argument("experiment config: photon budget " + std::to_string(cfg.n_photons_total) +
                                " is smaller than the number of runs (" + std::to_string(runs) + ")");
  if (!(cfg.angle_jitter_sigma >= 0.0) || !std::isfinite(cfg.angle_jitter_sigma))
    throw std::invalid_argument("experiment config: angle jitter sigma must be finite and >= 0");
  for (double phi : cfg.phases)
    if (!std::isfinite(phi)) throw std::invalid_argument("experiment config: phases must be finite");
}

}  // namespace

double PlateSetting::nominal_angle() const {
  switch (kind) {
    case PlateKind::Hwp:
      return std::numbers::pi / 8.0;
    case PlateKind::Qwp:
      return std::numbers::pi / 4.0;
    case PlateKind::None:
      break;
  }
  return 0.0;
}

std::size_t PlateSetting::stokes_index() const {
  switch (kind) {
    case PlateKind::Hwp:
      return 2;
    case PlateKind::Qwp:
      return 3;
    case PlateKind::None:
      break;
  }
  return 1;
}

std::string_view PlateSetting::name() const {
  switch (kind) {
    case PlateKind::Hwp:
      return "hwp";
    case PlateKind::Qwp:
      return "qwp";
    case PlateKind::None:
      break;
  }
  return "none";
}

PlateSetting PlateSetting::from_name(std::string_view name) {
  if (name == "none") return {PlateKind::None};
  if (name == "hwp") return {PlateKind::Hwp};
  if (name == "qwp") return {PlateKind::Qwp};
  throw DataError("unknown plate setting \"" + std::string(name) + "\" (expected none, hwp or qwp)");
}

PlateUnitary plate_unitary(PlateKind kind, double angle) {
  switch (kind) {
    case PlateKind::Hwp:
      return hwp(angle);
    case PlateKind::Qwp:
      return qwp(angle);
    case PlateKind::None:
      break;
  }
  return {};
}

std::string_view detector_id(std::size_t slot) { return kDetectorIds.at(slot); }

SpmAngles nominal_angles(const PlateSetting& setting) {
  SpmAngles a;
  a.fill(setting.nominal_angle());
  return a;
}

DetectorEffects detector_effects(PlateKind kind, const SpmAngles& angles, double phi) {
  const Matrix4 u = interferometer(phi).entries;
  const Matrix4 u_dag = adjoint(u);
  DetectorEffects effects{};
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t path = 0; path < 2; ++path) {
      // Monitor arm: path p reaches SPM p with probability 1/2.
      effects[detector_slot(path, d)] = scaled(port_effect(plate_unitary(kind, angles[path]), d, path), 0.5);
      // Interferometer arm: the other half, evolved by U(phi).
      const std::size_t spm = output_spm(path);
      const Matrix4 out = port_effect(plate_unitary(kind, angles[spm]), d, path);
      effects[detector_slot(spm, d)] = scaled(u_dag * out * u, 0.5);
    }
  }
  return effects;
}

DetectorProbabilities probabilities_from_effects(const DetectorEffects& effects, const Matrix4& rho) {
  DetectorProbabilities p{};
  for (std::size_t d = 0; d < kDetectorCount; ++d) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) s += (effects[d][i][j] * rho[j][i]).real();
    p[d] = std::max(s, 0.0);
  }
  return p;
}

DetectorProbabilities detector_probabilities(const DensityMatrix& rho, PlateKind kind, const SpmAngles& angles,
                                             double phi) {
  if (!validate_density(rho).is_physical)
    throw DataError("detector_probabilities: state is not a physical density matrix");
  return probabilities_from_effects(detector_effects(kind, angles, phi), rho.entries);
}

DetectorProbabilities detector_probabilities(const DensityMatrix& rho, const PlateSetting& setting, double phi) {
  return detector_probabilities(rho, setting.kind, nominal_angles(setting), phi);
}

double realized_angle(double nominal, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return nominal;
  std::normal_distribution<double> normal(0.0, sigma);
  return nominal + normal(rng);
}

std::vector<std::int64_t> split_budget(std::uint64_t total, std::size_t runs) {
  std::vector<std::int64_t> budget(runs, static_cast<std::int64_t>(total / runs));
  for (std::size_t k = 0; k < total % runs; ++k) ++budget[k];
  return budget;
}

CountData simulate(const DensityMatrix& rho, const ExperimentConfig& cfg) {
  check_config(cfg);
  if (!validate_density(rho).is_physical) throw DataError("simulate: state is not a physical density matrix");

  CountData data;
  for (const auto& setting : cfg.settings)
    for (double phi : cfg.phases) {
      CountRun run;
      run.setting = setting;
      run.phase = phi;
      data.runs.push_back(run);
    }
  const auto budget = split_budget(cfg.n_photons_total, data.runs.size());

  auto fill_run = [&](std::size_t k) {
    CountRun& run = data.runs[k];
    run.n_in = budget[k];
    auto rng = keyed_engine(cfg.seed, k);
    const double sigma = (cfg.exact_counts || run.setting.kind == PlateKind::None) ? 0.0 : cfg.angle_jitter_sigma;
    for (auto& angle : run.angles) angle = realized_angle(run.setting.nominal_angle(), sigma, rng);
    const auto p = probabilities_from_effects(detector_effects(run.setting.kind, run.angles, run.phase), rho.entries);
    run.counts = cfg.exact_counts ? exact_counts(p, run.n_in) : sampled_counts(p, run.n_in, rng);
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.threads, 1, data.runs.size());
  if (workers == 1) {
    for (std::size_t k = 0; k < data.runs.size(); ++k) fill_run(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < data.runs.size(); k += workers) fill_run(k);
      });
  }
  return data;
}

nlohmann::json to_json(const CountData& data) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : data.runs) {
    nlohmann::json angles = nlohmann::json::object();
    for (std::size_t s = 0; s < kSpmCount; ++s) angles[std::string(kSpmIds[s])] = run.angles[s];
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t d = 0; d < kDetectorCount; ++d) counts[std::string(kDetectorIds[d])] = run.counts[d];
    runs.push_back({{"setting", std::string(run.setting.name())},
                    {"angles", angles},
                    {"phase", run.phase},
                    {"n_in", run.n_in},
                    {"counts", counts}});
  }
  return {{"runs", runs}};
}

CountData counts_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("runs") || !j.at("runs").is_array())
    throw DataError("count record must be an object with a \"runs\" array");
  CountData data;
  std::size_t index = 0;
  for (const auto& r : j.at("runs")) {
    const std::string where = "run " + std::to_string(index++);
    try {
      CountRun run;
      run.setting = PlateSetting::from_name(r.at("setting").get<std::string>());
      run.phase = r.at("phase").get<double>();
      run.n_in = r.at("n_in").get<std::int64_t>();
      if (run.n_in < 0) throw DataError("negative n_in");
      run.angles = nominal_angles(run.setting);
      if (r.contains("angles"))
        for (std::size_t s = 0; s < kSpmCount; ++s) run.angles[s] = r.at("angles").at(std::string(kSpmIds[s])).get<double>();
      std::int64_t total = 0;
      for (std::size_t d = 0; d < kDetectorCount; ++d) {
        run.counts[d] = r.at("counts").at(std::string(kDetectorIds[d])).get<std::int64_t>();
        if (run.counts[d] < 0) throw DataError("negative count for " + std::string(kDetectorIds[d]));
        total += run.counts[d];
      }
      if (total != run.n_in)
        throw DataError("counts sum to " + std::to_string(total) + " but n_in is " + std::to_string(run.n_in));
      data.runs.push_back(run);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": malformed run (" + e.what() + ")");
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return data;
}

}  // namespace polpath
