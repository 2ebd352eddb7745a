#include <CLI11.hpp>
#include <json.hpp>
#include <spdc/coincidence.hpp>
#include <spdc/error.hpp>
#include <spdc/output.hpp>
#include <spdc/phase_matching.hpp>
#include <spdc/scenario.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifndef SPDC_VERSION
#define SPDC_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace spdc;

constexpr int kExitConfig = 2;
constexpr int kExitRings = 3;
constexpr int kExitNumeric = 4;

struct ExitWith {
  int code;
};

struct Globals {
  std::string config_path;
  std::string out;
  int workers{1};
  bool seedless{false};
  std::vector<std::string> argv;
};

void report(const std::string &code, const std::string &msg) {
  std::fflush(stdout);
  std::cerr << "ERROR " << code << ": " << msg << std::endl;
}

scenario::Scenario load(const Globals &g) {
  if (g.config_path.empty()) {
    report("Config", "--config is required");
    throw ExitWith{kExitConfig};
  }
  try {
    return scenario::load_scenario_file(g.config_path);
  } catch (const Error &e) {
    std::fflush(stdout);
    std::cerr << "ERROR " << e.what() << std::endl;
    throw ExitWith{kExitConfig};
  }
}

void require_out(const Globals &g) {
  if (g.out.empty()) {
    report("Config", "--out is required for this command");
    throw ExitWith{kExitConfig};
  }
}

/// Writes outputs and, when --out is set, the manifest.
class Run {
public:
  Run(const Globals &g, json scenario) : g_(g) {
    m_.scenario = std::move(scenario);
    m_.tool_version = SPDC_VERSION;
    m_.command_line = g.argv;
    m_.started_utc = output::utc_now();
  }

  void write(const std::string &path, const std::string &content) { files_.write(path, content); }

  void finish() {
    if (g_.out.empty()) return;
    m_.finished_utc = output::utc_now();
    m_.files = files_.files();
    output::write_file(g_.out + ".manifest.json", m_.to_json().dump(2) + "\n");
  }

private:
  const Globals &g_;
  output::RunManifest m_;
  output::FileSet files_;
};

json direction_json(const optics::Direction &d) { return {{"theta_rad", d.theta()}, {"phi_rad", d.phi()}}; }

int cmd_rings(const Globals &g, std::optional<int> n_phi) {
  scenario::Scenario s = load(g);
  if (n_phi) {
    if (*n_phi < 1) {
      report("Config", "--n-phi must be positive");
      return kExitConfig;
    }
    s.rings.n_phi = *n_phi;
  }
  auto [bs, bi] = engine::case_branches(s.engine.pol_case);
  matching::IndexModel model(s.engine.crystal, s.engine.pump, s.engine.wavelengths, s.engine.medium, bs, bi);
  auto [sig, idl] = scenario::solve_scenario_rings(s, g.workers);
  std::string csv = output::ring_csv(sig, idl, model, s.rings.fit);
  output::RingSummary sum = output::summarize_rings(sig, idl, s.rings.fit);

  Run run(g, scenario::scenario_to_json(s));
  if (g.out.empty()) {
    std::cout << csv;
  } else {
    run.write(g.out + ".csv", csv);
    json side = {{"scenario", scenario::scenario_to_json(s)},
                 {"scenario_hash", scenario::scenario_hash(s)},
                 {"samples", sum.samples},
                 {"converged", sum.converged},
                 {"max_fit_deviation_signal_rad", sum.max_fit_deviation_signal},
                 {"max_fit_deviation_idler_rad", sum.max_fit_deviation_idler},
                 {"max_residual_per_um", sum.max_residual}};
    run.write(g.out + ".json", side.dump(2) + "\n");
    std::printf("samples %zu converged %zu\n", sum.samples, sum.converged);
    std::printf("max |theta - fit| signal %.6e rad idler %.6e rad\n", sum.max_fit_deviation_signal,
                sum.max_fit_deviation_idler);
    std::printf("max |dkz| %.3e rad/um\n", sum.max_residual);
  }
  run.finish();
  std::size_t failed = sum.samples - sum.converged;
  if (static_cast<double>(failed) > 0.05 * static_cast<double>(sum.samples)) {
    report("ConvergenceFailure", std::to_string(failed) + " of " + std::to_string(sum.samples) +
                                     " ring samples did not converge");
    return kExitRings;
  }
  return 0;
}

int cmd_coincidence(const Globals &g) {
  scenario::Scenario s = load(g);
  require_out(g);
  scenario::ResolvedCoincidence rc = scenario::resolve_coincidence(s);
  engine::AmplitudeGrid grid = engine::coincidence_grid(rc.config, g.workers);
  grid.scenario_hash = scenario::scenario_hash(s);

  Run run(g, scenario::scenario_to_json(s));
  run.write(g.out + ".csv", output::grid_csv(grid, false));
  run.write(g.out + "_normalized.csv", output::grid_csv(grid, true));
  run.write(g.out + ".pgm", output::grid_pgm(grid));
  json side = {{"scenario", scenario::scenario_to_json(s)},
               {"scenario_hash", grid.scenario_hash},
               {"quantity", engine::to_string(grid.quantity)},
               {"n_theta", grid.theta.size()},
               {"n_phi", grid.phi.size()},
               {"max_value", grid.max_value()},
               {"nonfinite_count", grid.nonfinite_count},
               {"idler_detector", direction_json(rc.config.idler_detector)},
               {"conjugate_signal", {{"theta_rad", rc.conjugate_theta}, {"phi_rad", rc.conjugate_phi}}}};
  if (s.coincidence.singles) {
    engine::AmplitudeGrid singles = engine::singles_grid(rc.config, *s.coincidence.singles, g.workers);
    run.write(g.out + "_singles.csv", output::grid_csv(singles, false));
    side["singles_max_value"] = singles.max_value();
  }
  run.write(g.out + ".json", side.dump(2) + "\n");
  run.finish();
  std::printf("grid %zu x %zu max %.9e nonfinite %zu\n", grid.theta.size(), grid.phi.size(), grid.max_value(),
              grid.nonfinite_count);
  return 0;
}

int cmd_spectrum(const Globals &g) {
  scenario::Scenario s = load(g);
  const auto &sp = s.spectrum;
  engine::OAMSpectrum spec;
  if (sp.source == scenario::SpectrumSource::Synthetic) {
    std::vector<double> phi = engine::uniform_azimuths(sp.n_phi);
    std::vector<engine::cplx> a(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j)
      a[j] = (1.0 + sp.synthetic_modulation * std::cos(phi[j])) * std::polar(1.0, sp.synthetic_m * phi[j]);
    spec = engine::oam_spectrum_from_samples(phi, a);
  } else {
    scenario::ResolvedCoincidence rc = scenario::resolve_coincidence(s);
    engine::IdlerLock lock = engine::AntipodalLock{};
    if (!sp.antipodal_lock) lock = engine::FixedLock{rc.config.idler_detector};
    if (sp.source == scenario::SpectrumSource::Ring) {
      scenario::Scenario ring = s;
      ring.rings.n_phi = sp.n_phi;
      auto [sig, idl] = scenario::solve_scenario_rings(ring, g.workers);
      spec = engine::oam_spectrum(rc.config, sig, idl, lock, g.workers);
    } else {
      auto [sig, idl] = engine::fixed_circles(rc.conjugate_theta, rc.config.idler_detector.theta(), sp.n_phi,
                                              s.engine.wavelengths);
      spec = engine::oam_spectrum(rc.config, sig, idl, lock, g.workers);
    }
  }
  json weights = json::object();
  for (const auto &[m, w] : spec.weights) weights[std::to_string(m)] = w;
  json out = {{"weights", weights}, {"dominant_m", spec.dominant_m}, {"symmetry_defect", spec.symmetry_defect}};
  Run run(g, scenario::scenario_to_json(s));
  std::string text = out.dump(2) + "\n";
  if (!g.out.empty()) run.write(g.out + ".json", text);
  std::cout << text;
  run.finish();
  return 0;
}

int cmd_ximax(const Globals &g, int l, int p) {
  double xi = matching::find_xi_max(l, p);
  std::printf("%.8f\n", xi);
  std::fflush(stdout);
  std::cerr << "WARNING xi_max: the value 15.9491 quoted for (l=4, p=0) is not a maximum of "
               "e^-xi xi^l L_p^l(xi)^2; for p = 0 the maximum is at xi = l\n";
  if (!g.out.empty()) {
    Run run(g, json{{"l", l}, {"p", p}});
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8f\n", xi);
    run.write(g.out + ".txt", buf);
    run.finish();
  }
  return 0;
}

int cmd_polarizability(const Globals &g, const std::string &case_name) {
  scenario::Scenario s = load(g);
  require_out(g);
  if (!case_name.empty()) {
    static const std::pair<const char *, chi2::PolarizationCase> cases[] = {
        {"oo", chi2::PolarizationCase::OO},
        {"ee", chi2::PolarizationCase::EE},
        {"eo", chi2::PolarizationCase::EO},
        {"oe", chi2::PolarizationCase::OE}};
    bool found = false;
    for (const auto &[name, c] : cases)
      if (case_name == name) s.engine.pol_case = c, found = true;
    if (!found) {
      report("Config", "--case must be one of oo | ee | eo | oe");
      return kExitConfig;
    }
  }
  scenario::ResolvedCoincidence rc = scenario::resolve_coincidence(s);
  engine::AmplitudeGrid grid = engine::interaction_grid(rc.config, s.polarizability.placement, g.workers);
  grid.scenario_hash = scenario::scenario_hash(s);
  Run run(g, scenario::scenario_to_json(s));
  run.write(g.out + ".csv", output::grid_csv(grid, false));
  json side = {{"scenario", scenario::scenario_to_json(s)},
               {"scenario_hash", grid.scenario_hash},
               {"quantity", engine::to_string(grid.quantity)},
               {"case", chi2::to_string(s.engine.pol_case)},
               {"max_abs_value", grid.max_value()},
               {"idler_detector", direction_json(rc.config.idler_detector)}};
  run.write(g.out + ".json", side.dump(2) + "\n");
  run.finish();
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Ring, coincidence and OAM-spectrum simulator for type-II down-conversion"};
  app.require_subcommand(1);
  Globals g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  app.add_option("--config", g.config_path, "scenario JSON file");
  app.add_option("--out", g.out, "output prefix");
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--seedless", g.seedless, "reserved");
  app.set_version_flag("--version", SPDC_VERSION);

  auto *rings = app.add_subcommand("rings", "solve signal and idler rings");
  std::optional<int> n_phi;
  rings->add_option("--n-phi", n_phi, "number of azimuths (overrides the config)");
  auto *coinc = app.add_subcommand("coincidence", "coincidence grid with CSV, PGM and JSON sidecar");
  auto *spectrum = app.add_subcommand("spectrum", "OAM spectrum as JSON on stdout");
  auto *ximax = app.add_subcommand("ximax", "transverse maximum xi* for (l, p)");
  int l = 0, p = 0;
  ximax->add_option("--l", l, "azimuthal index")->required()->check(CLI::Range(0, 20));
  ximax->add_option("--p", p, "radial index")->check(CLI::Range(0, 20));
  auto *pol = app.add_subcommand("polarizability", "interaction energy grid");
  std::string case_name;
  pol->add_option("--case", case_name, "oo | ee | eo | oe");
  for (auto *sub : {rings, coinc, spectrum, ximax, pol}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    report("Config", e.what());
    return kExitConfig;
  }
  if (g.seedless) {
    report("InvalidArgument", "--seedless is reserved; the simulator uses no random numbers");
    return kExitConfig;
  }

  try {
    if (*rings) return cmd_rings(g, n_phi);
    if (*coinc) return cmd_coincidence(g);
    if (*spectrum) return cmd_spectrum(g);
    if (*ximax) return cmd_ximax(g, l, p);
    if (*pol) return cmd_polarizability(g, case_name);
  } catch (const ExitWith &e) {
    return e.code;
  } catch (const Error &e) {
    std::fflush(stdout);
    std::cerr << "ERROR " << e.what() << std::endl;
    return e.code() == ErrorCode::Config || e.code() == ErrorCode::Io ? kExitConfig : kExitNumeric;
  } catch (const std::exception &e) {
    report("Internal", e.what());
    return kExitNumeric;
  }
  return 0;
}
