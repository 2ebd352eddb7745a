#pragma once
#include <json.hpp>
#include <optional>
#include <spdc/coincidence.hpp>
#include <spdc/phase_matching.hpp>
#include <string>

namespace spdc::scenario {

using nlohmann::json;

enum class DetectorMode {
  RingPoint, ///< idler ring point at a given azimuth, from the coupled ring solve
  Explicit,  ///< fixed lab direction
};

enum class GridMode {
  AroundConjugate, ///< centred on the signal point conjugate to the detector
  Explicit,
};

enum class SpectrumSource {
  Ring,      ///< solved signal and idler rings
  Circle,    ///< fixed polar circles through the detector-conjugate pair
  Synthetic, ///< injected samples g (1 + modulation cos phi) e^{i m phi}
};

struct RingsSection {
  int n_phi{360};
  matching::RingSolverOptions options;
  matching::FitConstants fit;
};

struct CoincidenceSection {
  DetectorMode detector_mode{DetectorMode::RingPoint};
  double detector_ring_phi{0.0};
  optics::Direction detector{optics::Direction::lab(0.0, 0.0)};
  GridMode grid_mode{GridMode::AroundConjugate};
  double theta_half_width{0.015};
  double phi_half_width{0.2};
  int n_theta{256};
  int n_phi{256};
  engine::GridAxis theta_axis{0.06, 0.10, 256};
  engine::GridAxis phi_axis{optics::kPi - 0.2, optics::kPi + 0.2, 256};
  std::optional<engine::SinglesWindow> singles;
};

struct SpectrumSection {
  SpectrumSource source{SpectrumSource::Ring};
  int n_phi{256};
  bool antipodal_lock{true};
  int synthetic_m{4};
  double synthetic_modulation{0.0};
};

struct PolarizabilitySection {
  engine::IdlerPlacement placement{engine::IdlerPlacement::Antipodal};
};

/// One parsed config file. The engine scenario carries the crystal, pump and wavelengths;
/// detector and grid are filled by resolve_coincidence.
struct Scenario {
  engine::ScenarioConfig engine;
  RingsSection rings;
  CoincidenceSection coincidence;
  SpectrumSection spectrum;
  PolarizabilitySection polarizability;
  pump::QuadratureSpec quadrature;
};

/// Strict parse: unknown keys and missing unit suffixes are Config errors.
Scenario scenario_from_json(const json &doc);
/// Io on unreadable files, Config on malformed JSON.
Scenario load_scenario_file(const std::string &path);

json scenario_to_json(const Scenario &s);
/// git-style SHA-1 of the compact canonical echo.
std::string scenario_hash(const Scenario &s);

struct ResolvedCoincidence {
  engine::ScenarioConfig config; ///< detector and signal grid filled in
  double conjugate_theta{0.0};   ///< signal polar angle conjugate to the detector
  double conjugate_phi{0.0};
};

ResolvedCoincidence resolve_coincidence(const Scenario &s);

/// Ring solve on the uniform grid of s.rings.n_phi azimuths.
std::pair<matching::RingSolution, matching::RingSolution> solve_scenario_rings(const Scenario &s, int workers);

} // namespace spdc::scenario
