#pragma once
#include <complex>
#include <functional>
#include <map>
#include <span>
#include <spdc/crystal_optics.hpp>
#include <spdc/phase_matching.hpp>
#include <spdc/polarizability.hpp>
#include <spdc/pump_spectrum.hpp>
#include <string>
#include <variant>
#include <vector>

namespace spdc::engine {

using cplx = std::complex<double>;
using optics::Direction;

inline constexpr double kSpeedOfLight = 0.299792458; ///< um/fs

/// Inclusive linear axis; a single node sits at lo.
struct GridAxis {
  double lo{0.0};
  double hi{0.0};
  int n{1};

  std::vector<double> values() const;
};

enum class GroupIndex {
  Phase,            ///< dk = (n/c) dw with the phase index
  FiniteDifference, ///< n_g = n - lambda dn/dlambda, central difference
};

struct ScenarioConfig {
  optics::CrystalConfig crystal;
  pump::PumpBeam pump;
  matching::Wavelengths wavelengths;
  chi2::PolarizationCase pol_case{chi2::PolarizationCase::OE};
  matching::MediumModel medium{matching::MediumModel::Anisotropic};
  Direction idler_detector{Direction::lab(0.0, 0.0)};
  GridAxis signal_theta{0.06, 0.10, 64};
  GridAxis signal_phi{optics::kPi - 0.2, optics::kPi + 0.2, 64};
  bool include_polarizability{false};
  bool include_jacobian{true};
  GroupIndex group_index{GroupIndex::Phase};
  pump::SpectrumForm spectrum_form{pump::SpectrumForm::Exact};

  void validate() const;
};

/// Branch assignment (signal, idler) for a polarization case.
std::pair<optics::Branch, optics::Branch> case_branches(chi2::PolarizationCase c);

/// Evaluates amplitudes and probabilities for one scenario. Immutable after construction.
class Engine {
public:
  explicit Engine(const ScenarioConfig &scenario);

  const ScenarioConfig &scenario() const { return s_; }
  const matching::IndexModel &model() const { return model_; }

  pump::DeltaK delta_k_of(const Direction &dir_s, const Direction &dir_i) const;

  /// Interaction energy per unit pump field for the configured case.
  double polarizability_factor(const Direction &dir_s, const Direction &dir_i) const;
  /// [V_I if include_polarizability] * psi_tilde(Delta k)
  cplx amplitude(const Direction &dir_s, const Direction &dir_i) const;
  /// k^2 sin(theta) (n_g/c) * k'^2 sin(theta') (n'_g/c), or 1 without the Jacobian.
  double jacobian(const Direction &dir_s, const Direction &dir_i) const;
  /// |J F|^2
  double probability(const Direction &dir_s, const Direction &dir_i) const;

private:
  double group_index_signal(const Direction &d) const;
  double group_index_idler(const Direction &d) const;

  ScenarioConfig s_;
  matching::IndexModel model_;
};

enum class Quantity { Amplitude, Probability, InteractionEnergy };

const char *to_string(Quantity q);

/// theta rows by phi columns.
struct AmplitudeGrid {
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> values;         ///< real data (probability, V_I, or |amplitude|)
  std::vector<cplx> complex_values;   ///< filled for Quantity::Amplitude
  Quantity quantity{Quantity::Probability};
  std::string scenario_hash;
  std::size_t nonfinite_count{0};

  std::size_t index(std::size_t i, std::size_t j) const { return i * phi.size() + j; }
  double at(std::size_t i, std::size_t j) const { return values[index(i, j)]; }
  double max_value() const;
};

AmplitudeGrid coincidence_grid(const ScenarioConfig &scenario, int workers = 1);
AmplitudeGrid amplitude_grid(const ScenarioConfig &scenario, int workers = 1);

enum class IdlerPlacement {
  Detector,  ///< the configured idler detector direction
  Antipodal, ///< detector polar angle at phi_s + pi
};

/// V_I over the signal grid.
AmplitudeGrid interaction_grid(const ScenarioConfig &scenario, IdlerPlacement placement, int workers = 1);

/// Idler integration window for singles maps.
struct SinglesWindow {
  GridAxis idler_theta{0.06, 0.10, 2};
  GridAxis idler_phi{-0.2, 0.2, 2};
  int theta_nodes{24};
  int phi_nodes{24};
};

/// Coincidence probability integrated over the idler window (d theta' d phi'), Gauss-Legendre.
AmplitudeGrid singles_grid(const ScenarioConfig &scenario, const SinglesWindow &window, int workers = 1);

/// Tensor Gauss-Legendre integral of f over [a0, a1] x [b0, b1] in a fixed summation order.
double integrate_2d(double a0, double a1, int na, double b0, double b1, int nb,
                    const std::function<double(double, double)> &f);

struct OAMSpectrum {
  std::map<int, double> weights;
  int dominant_m{0};
  double symmetry_defect{0.0};
};

struct AntipodalLock {};
struct FixedLock {
  Direction detector;
};
using IdlerLock = std::variant<AntipodalLock, FixedLock>;

/// Azimuthal harmonic weights of the amplitude along the signal ring. Needs a uniform grid
/// phi_j = phi_0 + 2 pi j / n with n >= 64 converged samples.
OAMSpectrum oam_spectrum(const ScenarioConfig &scenario, const matching::RingSolution &signal,
                         const matching::RingSolution &idler, const IdlerLock &lock, int workers = 1);

/// Harmonic decomposition of raw samples a_j taken at uniform phi_j.
OAMSpectrum oam_spectrum_from_samples(std::span<const double> phi, std::span<const cplx> samples);

/// Circles of fixed polar angle: signal at theta_s, idler at theta_i with phi_i = phi_s + pi.
std::pair<matching::RingSolution, matching::RingSolution>
fixed_circles(double theta_s, double theta_i, int n, const matching::Wavelengths &wl);

/// Uniform azimuth grid phi_j = 2 pi j / n.
std::vector<double> uniform_azimuths(int n);

} // namespace spdc::engine
