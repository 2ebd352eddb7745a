#pragma once
#include <functional>
#include <span>
#include <spdc/crystal_optics.hpp>
#include <spdc/pump_spectrum.hpp>
#include <utility>
#include <vector>

namespace spdc::matching {

using optics::Branch;
using optics::CrystalConfig;
using optics::Direction;
using optics::Vec3;
using pump::PumpBeam;

struct Wavelengths {
  double signal_um{0.7022};
  double idler_um{0.7022};
  double pump_um{0.3511};

  static Wavelengths degenerate(double pump_um) { return {2.0 * pump_um, 2.0 * pump_um, pump_um}; }
  /// Throws EnergyMismatch unless 1/ls + 1/li = 1/lp to 1e-9 (relative to 1/lp).
  void check_energy() const;
};

enum class MediumModel {
  Anisotropic, ///< direction-dependent extraordinary indexes
  Isotropic,   ///< every index frozen at its pump-axis value
};

/// In-medium wave numbers for one (crystal, pump, wavelengths) configuration.
/// Defaults to Type-II: ordinary signal, extraordinary idler.
class IndexModel {
public:
  IndexModel(const CrystalConfig &crystal, const PumpBeam &pump, const Wavelengths &wl,
             MediumModel medium = MediumModel::Anisotropic, Branch signal = Branch::Ordinary,
             Branch idler = Branch::Extraordinary);

  double n_signal(const Direction &lab) const;
  double n_idler(const Direction &lab) const;
  double n_pump() const { return n_pump_; }

  double k_signal(const Direction &lab) const { return k0_signal_ * n_signal(lab); }
  double k_idler(const Direction &lab) const { return k0_idler_ * n_idler(lab); }
  double k_pump() const { return k_pump_; }

  Vec3 k_signal_vec(const Direction &lab) const { return k_signal(lab) * lab.unit_vector(); }
  Vec3 k_idler_vec(const Direction &lab) const { return k_idler(lab) * lab.unit_vector(); }

  /// Index with the wavelength shifted by d_lambda (used for finite-difference group indexes).
  double n_signal_at(const Direction &lab, double lambda_um) const;
  double n_idler_at(const Direction &lab, double lambda_um) const;

  const CrystalConfig &crystal() const { return crystal_; }
  const Wavelengths &wavelengths() const { return wl_; }
  MediumModel medium() const { return medium_; }
  Branch signal_branch() const { return signal_branch_; }
  Branch idler_branch() const { return idler_branch_; }

private:
  double index(Branch b, const Direction &lab, double lambda_um) const;

  CrystalConfig crystal_;
  Wavelengths wl_;
  MediumModel medium_;
  Branch signal_branch_, idler_branch_;
  double k0_signal_, k0_idler_;
  double k_pump_;
  double n_pump_;
  double n_signal_axis_, n_idler_axis_;
};

/// Delta k_z = k(dir_s) cos(theta_s) + k'(dir_i) cos(theta_i) - k_P.
double longitudinal_mismatch(const IndexModel &model, const Direction &dir_s, const Direction &dir_i);
double longitudinal_mismatch(const CrystalConfig &crystal, const PumpBeam &pump, double lambda_s,
                             double lambda_i, const Direction &dir_s, const Direction &dir_i);

/// rho_k^2 of the pair (transverse part of k_s + k_i).
double transverse_rho_sq(const IndexModel &model, const Direction &dir_s, const Direction &dir_i);

/// rho_k^2 - (k_P / z_R) xi*.
double transverse_mismatch(const IndexModel &model, const PumpBeam &pump, const Direction &dir_s,
                           const Direction &dir_i, double xi_star);

enum class RingBranch { Signal, Idler };

struct RingSample {
  double phi{0.0};
  double theta{0.0};
  double residual{0.0};            ///< |Delta k_z| at the solution (rad/um)
  double transverse_residual{0.0}; ///< |rho_k^2 - target| ((rad/um)^2); zero target in sequential mode
  bool converged{false};
};

struct RingSolution {
  std::vector<RingSample> samples;
  RingBranch branch{RingBranch::Signal};
  Wavelengths wavelengths;

  std::size_t converged_count() const;
};

enum class Pairing {
  Antipodal, ///< phi_i = phi_s + pi
  Scan,      ///< phi_i relaxed to the local minimum of rho_k^2 near phi_s + pi
};

enum class SolveMode {
  Coupled,    ///< Delta k_z = 0 together with rho_k^2 = (k_P/z_R) xi*
  Sequential, ///< Delta k_z = 0 with equal transverse momenta
};

struct RingSolverOptions {
  Pairing pairing{Pairing::Antipodal};
  SolveMode mode{SolveMode::Coupled};
  double xi_star{-1.0};    ///< negative: use find_xi_max(l, p) of the pump
  double theta_max{0.5};   ///< bracketing window (0, theta_max)
  int scan_steps{400};
  int workers{1};
};

/// Signal ring sampled at phi_grid and the paired idler ring.
std::pair<RingSolution, RingSolution> solve_rings(const IndexModel &model, const PumpBeam &pump,
                                                  std::span<const double> phi_grid,
                                                  const RingSolverOptions &options = {});

struct FitConstants {
  double zeta{0.034};
  double eta{0.797};
  double nu{0.0016};
  double mu{3.45}; ///< listed with the fit but unused by the ring expressions

  void validate() const;
};

double ring_fit_eval(const FitConstants &constants, double phi, RingBranch branch);

/// Largest interior local maximum of e^{-xi} xi^l L_p^l(xi)^2 on (0, 4(l+2p+3)].
double find_xi_max(int l, int p);

/// Polar angle of each ring as a function of its own azimuth.
struct RingShape {
  std::function<double(double)> signal_theta;
  std::function<double(double)> idler_theta;

  static RingShape from_fit(const FitConstants &constants = {});
  /// Periodic linear interpolation over converged samples.
  static RingShape from_solution(const RingSolution &signal, const RingSolution &idler);
};

struct ConjugateAzimuths {
  double plus;
  double minus;
};

/// Roots in phi' of the transverse condition bracketed on either side of phi_s + pi.
/// The signal polar angle is taken at phi_s and the idler polar angle at phi_s + pi; both
/// stay fixed while phi' varies.
ConjugateAzimuths solve_conjugate_azimuth(const IndexModel &model, const PumpBeam &pump,
                                          const RingShape &shape, double phi_s, double xi_star);

enum class AzimuthBranch { Plus, Minus };

double azimuth_fit_eval(double phi, AzimuthBranch branch);

} // namespace spdc::matching
