#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "polpath/errors.hpp"
#include "polpath/experiment.hpp"
#include "polpath/selftest.hpp"
#include "polpath/stokes.hpp"
#include "polpath/tomography.hpp"

namespace polpath::cli {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": invalid JSON (" + e.what() + ")");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("failed writing " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

DensityMatrix read_state(const std::string& path) {
  auto rho = density_from_json(read_json(path));
  if (!rho.validated) throw DataError(path + ": state is not a physical density matrix");
  return rho;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_angle_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(parse_angle(token));
  if (out.empty()) throw std::invalid_argument("empty phase list");
  return out;
}

struct GenStateArgs {
  std::string kind;
  std::optional<std::uint64_t> seed;
  int rank = 4;
  std::string out;
};

struct SimulateArgs {
  std::string state;
  std::uint64_t photons = 0;
  std::string phases = "0,pi/2";
  double jitter = 0.0;
  std::optional<std::uint64_t> seed;
  bool exact = false;
  unsigned threads = 1;
  std::string out;
};

struct ReconstructArgs {
  std::string counts;
  std::string mle = "on";
  std::string reference;
  std::string out;
};

struct FringeArgs {
  std::string state;
  std::string out;
  int points = 64;
};

struct ReportArgs {
  std::string result;
  std::string reference;
  std::string out;
};

int gen_state(const GenStateArgs& a, std::ostream& out) {
  DensityMatrix rho;
  if (a.kind == "bell") {
    rho = bell_pbs_state();
  } else if (a.kind == "h0") {
    rho = pure_state({1.0, 0.0, 0.0, 0.0});
  } else if (a.kind == "mixed") {
    rho = maximally_mixed();
  } else {
    if (!a.seed) throw std::invalid_argument("--kind random requires --seed");
    rho = random_density(*a.seed, a.rank);
    if (!validate_density(rho).is_physical) throw NumericalError("generated state failed validation");
  }
  write_json(a.out, to_json(rho));
  out << "wrote " << a.kind << " state to " << a.out << "\n";
  return kOk;
}

int simulate_cmd(const SimulateArgs& a, std::ostream& out) {
  if (!a.exact && !a.seed) throw std::invalid_argument("simulate requires --seed unless --exact is given");
  const auto rho = read_state(a.state);
  ExperimentConfig cfg;
  cfg.n_photons_total = a.photons;
  cfg.phases = parse_angle_list(a.phases);
  cfg.seed = a.seed.value_or(0);
  cfg.angle_jitter_sigma = a.jitter;
  cfg.exact_counts = a.exact;
  cfg.threads = a.threads;
  const auto data = simulate(rho, cfg);
  write_json(a.out, to_json(data));
  out << "wrote " << data.runs.size() << " runs to " << a.out << "\n";
  return kOk;
}

int reconstruct_cmd(const ReconstructArgs& a, std::ostream& out) {
  const auto data = counts_from_json(read_json(a.counts));
  const auto est = estimate_stokes(data);
  const auto rho_linear = linear_inversion(est, false);

  ReconstructionResult result;
  if (a.mle == "on") {
    result = mle_fit(data, rho_linear);
  } else {
    result.rho_linear = rho_linear;
  }
  result.stokes = est.set;
  if (!a.reference.empty()) result.metrics = report(read_state(a.reference), result);

  write_json(a.out, to_json(result));
  const auto validity = validate_density(result.rho_linear);
  out << "linear inversion: min eigenvalue " << validity.min_eigenvalue
      << (validity.is_physical ? " (physical)" : " (unphysical)") << "\n";
  if (result.diagnostics)
    out << "mle: cost " << result.diagnostics->cost_initial << " -> " << result.diagnostics->cost_final << " in "
        << result.diagnostics->iterations << " evaluations\n";
  if (result.metrics) out << "fidelity " << result.metrics->fidelity << "\n";
  return kOk;
}

int fringe_cmd(const FringeArgs& a, std::ostream& out) {
  if (a.points < 2) throw std::invalid_argument("--points must be at least 2");
  const auto set = stokes_of(read_state(a.state));
  std::string csv = "phi,s0f_p0,s1f_p0,s2f_p0,s3f_p0,s0f_p1,s1f_p1,s2f_p1,s3f_p1\n";
  for (int k = 0; k < a.points; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / a.points;
    csv += format_double(phi);
    for (std::size_t q = 0; q < 2; ++q)
      for (double x : predicted_fringe(set, q, phi).s) csv += "," + format_double(x);
    csv += "\n";
  }
  write_text(a.out, csv);
  out << "wrote " << a.points << " fringe rows to " << a.out << "\n";
  return kOk;
}

int report_cmd(const ReportArgs& a, std::ostream& out) {
  auto result = result_from_json(read_json(a.result));
  if (!a.reference.empty()) result.metrics = report(read_state(a.reference), result);

  const auto lin = validate_density(result.rho_linear);
  out << "linear inversion: trace defect " << lin.trace_defect << ", min eigenvalue " << lin.min_eigenvalue
      << (lin.is_physical ? " (physical)" : " (unphysical)") << "\n";
  if (result.rho_mle) {
    const auto mle = validate_density(*result.rho_mle);
    out << "mle estimate: min eigenvalue " << mle.min_eigenvalue << ", purity " << purity(*result.rho_mle) << "\n";
  }
  if (result.diagnostics) {
    const auto& d = *result.diagnostics;
    out << "mle cost: " << d.cost_initial << " -> " << d.cost_final << " (" << d.iterations << " evaluations"
        << (d.converged ? ", converged" : "") << ")\n";
  }
  if (result.metrics) {
    const auto& m = *result.metrics;
    out << "fidelity " << m.fidelity << "\ntrace distance " << m.trace_distance << "\npurity (estimate) "
        << m.purity_est << "\npurity (reference) " << m.purity_ref << "\n";
    if (!a.out.empty()) write_json(a.out, to_json(m));
  } else if (!a.out.empty()) {
    throw std::invalid_argument("--out needs metrics: pass --reference or a result that already has them");
  }
  return kOk;
}

int selftest_cmd(bool corrupt, std::ostream& out) {
  SelftestOptions options;
  if (corrupt)
    options.reconstructor = [](const StokesSet& set) {
      auto rho = reconstruct(set);
      rho.entries[0][3] *= -1.0;
      rho.entries[3][0] *= -1.0;
      return rho;
    };
  bool all = true;
  for (const auto& c : run_selftest(options)) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << "  (worst " << c.worst << ", tol " << c.tolerance << ")\n";
    all = all && c.passed;
  }
  out << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all ? kOk : kSelftestFailed;
}

}  // namespace

double parse_angle(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  const auto pi_pos = text.find("pi");
  try {
    if (pi_pos == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    std::string coeff = text.substr(0, pi_pos);
    if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
    double scale = 1.0;
    if (coeff == "-") {
      scale = -1.0;
    } else if (!coeff.empty() && coeff != "+") {
      std::size_t used = 0;
      scale = std::stod(coeff, &used);
      if (used != coeff.size()) throw std::invalid_argument(text);
    }
    const std::string rest = text.substr(pi_pos + 2);
    double denom = 1.0;
    if (!rest.empty()) {
      if (rest.front() != '/') throw std::invalid_argument(text);
      std::size_t used = 0;
      denom = std::stod(rest.substr(1), &used);
      if (used != rest.size() - 1 || denom == 0.0) throw std::invalid_argument(text);
    }
    return scale * std::numbers::pi / denom;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse angle \"" + raw + "\"");
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polarization-path single-photon tomography bench. All angles are in radians."};
  app.require_subcommand(1);

  GenStateArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-state", "Write a density matrix JSON file");
  gen_cmd->add_option("--kind", gen.kind, "bell | h0 | mixed | random")
      ->required()
      ->check(CLI::IsMember({"bell", "h0", "mixed", "random"}));
  gen_cmd->add_option("--seed", gen.seed, "Seed for --kind random");
  gen_cmd->add_option("--rank", gen.rank, "Rank for --kind random (1..4)")->check(CLI::Range(1, 4));
  gen_cmd->add_option("--out", gen.out, "Output JSON path")->required();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate bench counts for a state");
  sim_cmd->add_option("--state", sim.state, "State JSON")->required();
  sim_cmd->add_option("--photons", sim.photons, "Total photon budget over all runs")->required();
  sim_cmd->add_option("--phases", sim.phases, "Comma-separated interferometer phases in radians (e.g. 0,pi/2)");
  sim_cmd->add_option("--jitter", sim.jitter, "Std. dev. of wave-plate angle errors in radians")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim.seed, "RNG seed (required unless --exact)");
  sim_cmd->add_flag("--exact", sim.exact, "Deterministic counts n*p instead of sampling");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads; output does not depend on it")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--out", sim.out, "Output count JSON")->required();

  ReconstructArgs rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Reconstruct a state from counts");
  rec_cmd->add_option("--counts", rec.counts, "Count JSON")->required();
  rec_cmd->add_option("--mle", rec.mle, "on | off")->check(CLI::IsMember({"on", "off"}));
  rec_cmd->add_option("--reference", rec.reference, "Reference state JSON for metrics");
  rec_cmd->add_option("--out", rec.out, "Output reconstruction JSON")->required();

  FringeArgs fr;
  auto* fringe = app.add_subcommand("fringe", "Write predicted output-arm Stokes fringes as CSV");
  fringe->add_option("--state", fr.state, "State JSON")->required();
  fringe->add_option("--out", fr.out, "Output CSV")->required();
  fringe->add_option("--points", fr.points, "Number of phases over [0, 2pi)");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Summarize a reconstruction JSON");
  rep_cmd->add_option("--result", rep.result, "Reconstruction JSON")->required();
  rep_cmd->add_option("--reference", rep.reference, "Reference state JSON");
  rep_cmd->add_option("--out", rep.out, "Write metrics JSON here");

  bool corrupt = false;
  auto* self = app.add_subcommand("selftest", "Check the exact identities of the bench end to end");
  self->add_flag("--corrupt-reconstruction", corrupt, "Negative control: break the reconstruction matrix")
      ->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen_cmd->parsed()) return gen_state(gen, out);
    if (sim_cmd->parsed()) return simulate_cmd(sim, out);
    if (rec_cmd->parsed()) return reconstruct_cmd(rec, out);
    if (fringe->parsed()) return fringe_cmd(fr, out);
    if (rep_cmd->parsed()) return report_cmd(rep, out);
    if (self->parsed()) return selftest_cmd(corrupt, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace polpath::cli
