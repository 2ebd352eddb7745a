#pragma once
#include <complex>
#include <spdc/crystal_optics.hpp>

namespace spdc::pump {

using cplx = std::complex<double>;
using optics::Vec3;

inline constexpr int kMaxModeIndex = 20;

/// Generalized Laguerre polynomial L_p^l(x) by the three-term recurrence; l, p <= 20.
double laguerre(int p, int l, double x);

struct PumpBeam {
  double lambda_um{0.3511};     ///< vacuum wavelength
  int l{0};                     ///< azimuthal index
  int p{0};                     ///< radial index
  double z_rayleigh_um{2.0e4};
  cplx amplitude{1.0, 0.0};     ///< A_lp
  double k_p{0.0};              ///< in-medium wave number (rad/um)
  Vec3 polarization{1.0, 0.0, 0.0}; ///< lab-frame unit vector

  double waist_sq() const { return 2.0 * z_rayleigh_um / k_p; }
  double waist() const;
  void validate() const;

  /// k_p from the extraordinary pump index along the lab z axis (tilt theta_c).
  static PumpBeam in_crystal(const optics::CrystalConfig &crystal, double lambda_um, int l, int p,
                             double z_rayleigh_um, cplx amplitude = {1.0, 0.0},
                             Vec3 polarization = Vec3::UnitX());
};

struct DeltaK {
  double dkx{0.0}, dky{0.0}, dkz{0.0};

  double rho_sq() const { return dkx * dkx + dky * dky; }
  double azimuth() const;
  double xi(const PumpBeam &beam) const { return beam.z_rayleigh_um / beam.k_p * rho_sq(); }

  /// Delta k = k_s + k_i - k_P z_hat.
  static DeltaK from_pair(const Vec3 &k_signal, const Vec3 &k_idler, double k_p);
  /// Transverse magnitude from xi, at azimuth alpha.
  static DeltaK from_xi(const PumpBeam &beam, double xi, double alpha, double dkz);
};

/// Laguerre-Gaussian mode with vortex phase e^{+i l phi} and Gouy phase (2p+l+1) atan(z/z_R).
cplx lg_amplitude(const PumpBeam &beam, double r, double phi, double z);

struct QuadratureSpec {
  int r_nodes{64};
  int phi_nodes{64};
  int z_nodes{16};
  double r_cutoff_waists{6.0};
  double tolerance{1e-9};
  int max_doublings{3};

  void validate() const;
};

/// Transform of the mode over the slab z in [z0 - l_c/2, z0 + l_c/2] by tensor Gauss-Legendre
/// quadrature with the cylindrical Jacobian r. Node counts double until two successive
/// results agree to `tolerance` relative to the integral of |integrand|.
cplx psi_tilde_numeric(const PumpBeam &beam, double crystal_length, double z0, const DeltaK &dk,
                       const QuadratureSpec &spec = {});

enum class SpectrumForm {
  Exact,   ///< closed form of the quadrature integral at z0 = 0
  Printed, ///< the published closed form, kept for comparison
};

cplx psi_tilde_analytic(const PumpBeam &beam, double crystal_length, const DeltaK &dk,
                        SpectrumForm form = SpectrumForm::Exact);

/// Argument x of the longitudinal sinc(x).
double sinc_argument(const PumpBeam &beam, double crystal_length, double dkz, double xi,
                     SpectrumForm form = SpectrumForm::Exact);

double sinc(double x);

/// |prefactor|^2 multiplying e^{-xi} xi^l L^2 sinc^2.
double spectrum_prefactor_sq(const PumpBeam &beam, double crystal_length,
                             SpectrumForm form = SpectrumForm::Exact);

double prob_density(const PumpBeam &beam, double crystal_length, const DeltaK &dk,
                    SpectrumForm form = SpectrumForm::Exact);
double f_transv(const PumpBeam &beam, double crystal_length, double xi,
                SpectrumForm form = SpectrumForm::Exact);
double f_long(const PumpBeam &beam, double crystal_length, double dkz, double xi,
              SpectrumForm form = SpectrumForm::Exact);

/// e^{-xi} xi^l L_p^l(xi)^2
double transverse_shape(int l, int p, double xi);

/// True when l_c / z_R exceeds 0.1 (the closed forms assume a thin crystal).
bool thick_crystal(const PumpBeam &beam, double crystal_length);

/// Time window T(dw) = exp[i dw (t - tau/2)] sin(dw tau/2)/(dw/2); dw in rad/fs, tau and t in fs.
cplx time_window(double delta_omega, double tau, double t = 0.0);

/// Term-by-term comparison of the printed form against a reference value.
struct PrintedResiduals {
  double prefactor_ratio; ///< |printed/reference| with the sinc factors divided out
  double phase_offset;    ///< arg(printed/reference), wrapped to (-pi, pi]
  double sinc_offset;     ///< printed minus exact sinc argument
};

PrintedResiduals printed_residuals(const PumpBeam &beam, double crystal_length, const DeltaK &dk,
                                   cplx reference);

} // namespace spdc::pump
